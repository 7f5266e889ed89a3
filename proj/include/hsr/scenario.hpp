#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsr/statfun.hpp"

namespace hsr {

enum class Scheme { Proposed, DasBlanket, DasSingle, Traditional };
enum class Cell { Serving, Target };
enum class AntennaId { Front = 1, Rear = 2 };
// How a selection-scheme cell picks its transmitting RAU.
enum class RauSelection { MaxRss, MeanPathloss };

inline constexpr std::array<Scheme, 4> kAllSchemes = {Scheme::Proposed, Scheme::DasBlanket,
                                                      Scheme::DasSingle, Scheme::Traditional};
inline constexpr std::array<Cell, 2> kCells = {Cell::Serving, Cell::Target};

inline constexpr bool has_rear_antenna(Scheme s) { return s != Scheme::DasSingle; }
inline constexpr bool uses_rau_selection(Scheme s) {
  return s == Scheme::Proposed || s == Scheme::DasSingle;
}

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::DasBlanket: return "das_b";
    case Scheme::DasSingle: return "das_s";
    case Scheme::Traditional: return "traditional";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  if (name == "das-b" || name == "blanket") return Scheme::DasBlanket;
  if (name == "das-s" || name == "single") return Scheme::DasSingle;
  return std::nullopt;
}

inline std::string_view to_string(AntennaId a) { return a == AntennaId::Front ? "front" : "rear"; }
inline std::string_view to_string(Cell c) { return c == Cell::Serving ? "serving" : "target"; }

struct NodePosition {
  double along_track;  // m
  double offset;       // m, perpendicular distance from the track
};

/// Geometry and radio parameters of one run. Defaults are the reference
/// scenario: two cells 3 km apart, four RAUs per cell.
struct Scenario {
  double ds = 3000.0;     // inter-BS distance, m
  double dr = 750.0;      // inter-RAU spacing, m
  double d0 = 100.0;      // BS to track, m
  double du = 60.0;       // RAU to track, m
  double train_length = 200.0;  // m, also the front/rear antenna separation
  double speed = 100.0;   // m/s
  int n_raus = 4;
  double tx_power = 86.0;       // dBm per cell
  double shadow_sigma = 4.0;    // dB
  // Per-cell overrides of shadow_sigma.
  std::optional<double> shadow_sigma_serving;
  std::optional<double> shadow_sigma_target;
  double pathloss_a = 31.5;     // dB intercept
  double pathloss_gamma = 3.5;  // path-loss exponent
  double hysteresis = 2.0;      // dB
  double threshold = -30.0;     // dBm
  double measurement_step = 10.0;  // m
  double noise_density = -145.0;   // dBm/Hz; carried for completeness, RSS is noise-free
  Scheme scheme = Scheme::Proposed;
  RauSelection selection = RauSelection::MaxRss;

  [[nodiscard]] double sigma(Cell c) const {
    const auto& o = c == Cell::Serving ? shadow_sigma_serving : shadow_sigma_target;
    return o.value_or(shadow_sigma);
  }

  [[nodiscard]] Scenario with_scheme(Scheme s) const {
    Scenario copy = *this;
    copy.scheme = s;
    return copy;
  }

  /// Throws DomainError naming the first violated constraint.
  void validate() const {
    auto check = [](bool ok, const char* what) {
      if (!ok) throw DomainError(std::string("scenario: ") + what);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    check(finite(ds) && ds > 0.0, "ds > 0");
    check(finite(dr) && dr > 0.0 && dr <= ds, "0 < dr <= ds");
    check(finite(d0) && d0 >= 0.0, "d0 >= 0");
    check(finite(du) && du >= 0.0, "du >= 0");
    check(n_raus >= 1, "n_raus >= 1");
    check(finite(train_length) && train_length >= 0.0, "train_length >= 0");
    check(finite(speed) && speed > 0.0, "speed > 0");
    check(finite(shadow_sigma) && shadow_sigma > 0.0, "shadow_sigma > 0");
    check(!shadow_sigma_serving || *shadow_sigma_serving > 0.0, "shadow_sigma_serving > 0");
    check(!shadow_sigma_target || *shadow_sigma_target > 0.0, "shadow_sigma_target > 0");
    check(finite(measurement_step) && measurement_step > 0.0, "measurement_step > 0");
    check(finite(hysteresis) && hysteresis >= 0.0, "hysteresis >= 0");
    check(finite(tx_power), "tx_power finite");
    check(finite(pathloss_a) && finite(pathloss_gamma), "path-loss parameters finite");
    check(!std::isnan(threshold), "threshold is a number");
  }
};

inline Scenario reference_scenario() { return Scenario{}; }

/// Positions of the N RAUs of a cell, ordered along the track. Serving-cell
/// RAU n (1-based) sits at (n - (N+1)/2) * dr; target-cell RAUs are shifted
/// by ds. Index 1 is the one nearest the previous cell.
inline std::vector<NodePosition> rau_positions(const Scenario& sc, Cell cell) {
  std::vector<NodePosition> out;
  out.reserve(static_cast<std::size_t>(sc.n_raus));
  const double shift = cell == Cell::Target ? sc.ds : 0.0;
  const double center = 0.5 * (sc.n_raus + 1);
  for (int n = 1; n <= sc.n_raus; ++n) {
    out.push_back({shift + (n - center) * sc.dr, sc.du});
  }
  return out;
}

inline NodePosition bs_position(const Scenario& sc, Cell cell) {
  return {cell == Cell::Target ? sc.ds : 0.0, sc.d0};
}

inline double antenna_x(const Scenario& sc, double front_x, AntennaId i) {
  return i == AntennaId::Front ? front_x : front_x - sc.train_length;
}

inline double link_distance(double antenna_along_track, const NodePosition& node) {
  return std::hypot(antenna_along_track - node.along_track, node.offset);
}

/// Front-antenna measurement positions covering [0, extent] with a uniform
/// step; the last point is `extent` whenever the step divides it.
struct PositionGrid {
  std::vector<double> positions;

  PositionGrid() = default;
  PositionGrid(double extent, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid step must be positive");
    if (!(extent >= 0.0) || !std::isfinite(extent)) throw DomainError("grid extent must be >= 0");
    const auto count = static_cast<std::size_t>(std::floor(extent / step + 1e-9)) + 1;
    positions.reserve(count);
    for (std::size_t k = 0; k < count; ++k) positions.push_back(static_cast<double>(k) * step);
  }
  explicit PositionGrid(std::vector<double> xs) : positions(std::move(xs)) {
    for (std::size_t k = 1; k < positions.size(); ++k) {
      if (!(positions[k] > positions[k - 1])) {
        throw DomainError("grid positions must be strictly increasing");
      }
    }
  }

  static PositionGrid for_scenario(const Scenario& sc) {
    return PositionGrid(sc.ds, sc.measurement_step);
  }

  [[nodiscard]] std::size_t size() const { return positions.size(); }
  [[nodiscard]] double operator[](std::size_t k) const { return positions[k]; }
  [[nodiscard]] double step() const {
    return positions.size() > 1 ? positions[1] - positions[0] : 0.0;
  }
};

}  // namespace hsr
