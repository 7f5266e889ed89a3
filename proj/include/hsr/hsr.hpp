#pragma once

#include "hsr/statfun.hpp"
#include "hsr/random.hpp"
#include "hsr/scenario.hpp"
#include "hsr/channel.hpp"
#include "hsr/analytics.hpp"
#include "hsr/protocol.hpp"
#include "hsr/parallel.hpp"
#include "hsr/montecarlo.hpp"
#include "hsr/config.hpp"
#include "hsr/result_table.hpp"
#include "hsr/figures.hpp"
