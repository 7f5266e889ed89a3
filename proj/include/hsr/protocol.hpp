#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsr/channel.hpp"
#include "hsr/random.hpp"
#include "hsr/scenario.hpp"

namespace hsr {

// Two-antenna handover procedure with dual-cast:
//   1. measurement report; serving cell sends HO request (selected RAU index)
//   2. target admits and acknowledges
//   3. HO command to the front antenna, core network starts dual-casting
//   4. front antenna attaches to the target cell
//   5. rear antenna triggers on its own report and attaches
//   6. dual-cast finish request and ack; serving cell releases the TRS
// Control messages have zero latency, so one grid position can carry a whole
// step sequence. Failed attachments leave the antenna on its old cell and the
// command is re-issued at the next position where its trigger holds.

enum class Phase {
  Idle,
  PreparationFront,
  ExecutingFront,
  AwaitRear,
  ExecutingRear,
  Completing,
  Done
};

enum class EventKind {
  MeasurementReport,
  HoRequest,
  HoRequestAck,
  HoCommandFront,
  FrontAttached,
  HoCommandRear,
  RearAttached,
  AttachFailed,
  DualcastStart,
  DualcastFinish,
  DualcastFinishAck
};

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::PreparationFront: return "PreparationFront";
    case Phase::ExecutingFront: return "ExecutingFront";
    case Phase::AwaitRear: return "AwaitRear";
    case Phase::ExecutingRear: return "ExecutingRear";
    case Phase::Completing: return "Completing";
    case Phase::Done: return "Done";
  }
  return "?";
}

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::MeasurementReport: return "MeasurementReport";
    case EventKind::HoRequest: return "HoRequest";
    case EventKind::HoRequestAck: return "HoRequestAck";
    case EventKind::HoCommandFront: return "HoCommandFront";
    case EventKind::FrontAttached: return "FrontAttached";
    case EventKind::HoCommandRear: return "HoCommandRear";
    case EventKind::RearAttached: return "RearAttached";
    case EventKind::AttachFailed: return "AttachFailed";
    case EventKind::DualcastStart: return "DualcastStart";
    case EventKind::DualcastFinish: return "DualcastFinish";
    case EventKind::DualcastFinishAck: return "DualcastFinishAck";
  }
  return "?";
}

// Events the state machine produces; they are never valid as inputs.
inline constexpr bool is_output_event(EventKind k) {
  return k == EventKind::HoRequest || k == EventKind::HoCommandFront ||
         k == EventKind::HoCommandRear || k == EventKind::DualcastStart ||
         k == EventKind::DualcastFinish;
}

struct ProtocolEvent {
  EventKind kind = EventKind::MeasurementReport;
  double position = 0.0;  // front-antenna x, m
  std::optional<AntennaId> antenna;
  // Measurement report payload: whether the handover condition holds.
  bool front_trigger = false;
  bool rear_trigger = false;
  int rau_index = 0;  // HoRequest payload

  static ProtocolEvent report(double x, bool front, bool rear) {
    return {EventKind::MeasurementReport, x, std::nullopt, front, rear, 0};
  }
  static ProtocolEvent make(EventKind k, double x, std::optional<AntennaId> a = std::nullopt) {
    return {k, x, a, false, false, 0};
  }
};

struct HandoverState {
  Phase phase = Phase::Idle;
  std::optional<Cell> front_attached = Cell::Serving;
  std::optional<Cell> rear_attached = Cell::Serving;
  bool dualcast_active = false;
  int selected_rau_index = 0;
  bool single_antenna = false;

  static HandoverState initial(bool single_antenna) {
    HandoverState s;
    s.single_antenna = single_antenna;
    if (single_antenna) s.rear_attached.reset();
    return s;
  }

  [[nodiscard]] bool command_in_flight() const {
    return phase == Phase::ExecutingFront || phase == Phase::ExecutingRear ||
           phase == Phase::Completing;
  }
  [[nodiscard]] bool any_attached() const {
    return front_attached.has_value() || rear_attached.has_value();
  }
  bool operator==(const HandoverState&) const = default;
};

class ProtocolViolation : public std::logic_error {
 public:
  ProtocolViolation(Phase phase, EventKind kind)
      : std::logic_error("protocol violation: event " + std::string(to_string(kind)) +
                         " is not legal in phase " + std::string(to_string(phase))),
        phase_(phase),
        kind_(kind) {}

  [[nodiscard]] Phase phase() const { return phase_; }
  [[nodiscard]] EventKind kind() const { return kind_; }

 private:
  Phase phase_;
  EventKind kind_;
};

struct TransitionResult {
  HandoverState state;
  std::vector<ProtocolEvent> emitted;
};

/// One deterministic step of the handover procedure. Throws
/// ProtocolViolation when the event is not legal in the current phase.
inline TransitionResult transition(const HandoverState& state, const ProtocolEvent& event) {
  TransitionResult out{state, {}};
  auto& next = out.state;
  const double x = event.position;
  auto emit = [&](EventKind k, std::optional<AntennaId> a = std::nullopt) {
    out.emitted.push_back(ProtocolEvent::make(k, x, a));
  };
  auto violation = [&] { return ProtocolViolation(state.phase, event.kind); };
  auto antenna_is = [&](AntennaId a) { return event.antenna && *event.antenna == a; };

  switch (event.kind) {
    case EventKind::MeasurementReport:
      switch (state.phase) {
        case Phase::Idle:
          if (event.front_trigger) {
            next.phase = Phase::PreparationFront;
            next.selected_rau_index = event.rau_index;
            out.emitted.push_back(ProtocolEvent::make(EventKind::HoRequest, x, AntennaId::Front));
            out.emitted.back().rau_index = event.rau_index;
          }
          return out;
        case Phase::ExecutingFront:
          if (event.front_trigger) emit(EventKind::HoCommandFront, AntennaId::Front);
          return out;
        case Phase::AwaitRear:
          if (event.rear_trigger) {
            next.phase = Phase::ExecutingRear;
            emit(EventKind::HoCommandRear, AntennaId::Rear);
          }
          return out;
        case Phase::ExecutingRear:
          if (event.rear_trigger) emit(EventKind::HoCommandRear, AntennaId::Rear);
          return out;
        case Phase::Done:
          return out;
        case Phase::PreparationFront:
        case Phase::Completing:
          throw violation();
      }
      break;

    case EventKind::HoRequestAck:
      if (state.phase != Phase::PreparationFront) throw violation();
      next.phase = Phase::ExecutingFront;
      next.dualcast_active = true;
      emit(EventKind::HoCommandFront, AntennaId::Front);
      emit(EventKind::DualcastStart);
      return out;

    case EventKind::FrontAttached:
      if (state.phase != Phase::ExecutingFront) throw violation();
      next.front_attached = Cell::Target;
      if (state.single_antenna) {
        next.phase = Phase::Completing;
        emit(EventKind::DualcastFinish);
      } else {
        next.phase = Phase::AwaitRear;
      }
      return out;

    case EventKind::RearAttached:
      if (state.phase != Phase::ExecutingRear) throw violation();
      next.rear_attached = Cell::Target;
      next.phase = Phase::Completing;
      emit(EventKind::DualcastFinish);
      return out;

    case EventKind::AttachFailed:
      if (state.phase == Phase::ExecutingFront && antenna_is(AntennaId::Front)) return out;
      if (state.phase == Phase::ExecutingRear && antenna_is(AntennaId::Rear)) return out;
      throw violation();

    case EventKind::DualcastFinishAck:
      if (state.phase != Phase::Completing) throw violation();
      next.phase = Phase::Done;
      next.dualcast_active = false;
      return out;

    case EventKind::HoRequest:
    case EventKind::HoCommandFront:
    case EventKind::HoCommandRear:
    case EventKind::DualcastStart:
    case EventKind::DualcastFinish:
      throw violation();
  }
  throw violation();
}

struct TraceEntry {
  ProtocolEvent event;
  Phase before;
  Phase after;
  bool emitted;  // produced by the state machine rather than fed to it
};

struct HandoverAttempt {
  std::size_t position_index;
  bool failed;
};

struct CrossingOutcome {
  std::optional<double> front_ho_position;
  std::optional<double> rear_ho_position;
  bool front_failed = false;  // at least one failed attachment
  bool rear_failed = false;
  std::vector<HandoverAttempt> front_attempts;
  std::vector<HandoverAttempt> rear_attempts;
  std::vector<std::pair<double, double>> interruption_intervals;
  Phase final_phase = Phase::Idle;

  [[nodiscard]] bool completed() const { return final_phase == Phase::Done; }
  [[nodiscard]] double interruption_length() const {
    double total = 0.0;
    for (const auto& [a, b] : interruption_intervals) total += b - a;
    return total;
  }
};

struct CrossingResult {
  CrossingOutcome outcome;
  std::vector<TraceEntry> trace;
};

/// Mean link budgets of both antennas to both cells at one position.
struct PositionLinks {
  CellLinks front[2];
  CellLinks rear[2];
};

inline PositionLinks position_links(const Scenario& sc, double front_x) {
  PositionLinks l;
  for (Cell c : kCells) {
    l.front[static_cast<int>(c)] = cell_links(sc, front_x, AntennaId::Front, c);
    if (has_rear_antenna(sc.scheme)) {
      l.rear[static_cast<int>(c)] = cell_links(sc, front_x, AntennaId::Rear, c);
    }
  }
  return l;
}

/// Per-position shadowing draws of one crossing; the draw order (front
/// serving, front target, rear serving, rear target) is shared with the
/// pointwise estimator so both engines see the same samples for a key.
struct PositionSample {
  CellSample front[2];
  CellSample rear[2];
};

inline PositionSample draw_position(const Scenario& sc, const PositionLinks& links,
                                    RandomStream& rng) {
  PositionSample s{};
  s.front[0] = draw_cell(sc, links.front[0], rng);
  s.front[1] = draw_cell(sc, links.front[1], rng);
  if (has_rear_antenna(sc.scheme)) {
    s.rear[0] = draw_cell(sc, links.rear[0], rng);
    s.rear[1] = draw_cell(sc, links.rear[1], rng);
  }
  return s;
}

/// Walks the grid once, sampling RSS at each position and driving the state
/// machine. Deterministic in (scenario, grid, seed, trial).
inline CrossingResult run_crossing(const Scenario& sc, const PositionGrid& grid,
                                   const std::vector<PositionLinks>& links, const SeedPolicy& seed,
                                   std::uint64_t trial) {
  const bool single = !has_rear_antenna(sc.scheme);
  const int rau_index = uses_rau_selection(sc.scheme) ? 1 : 0;
  CrossingResult result;
  auto& outcome = result.outcome;
  auto& trace = result.trace;
  HandoverState state = HandoverState::initial(single);

  // Feeds one input event and queues the system's reactions to its outputs.
  auto feed = [&](const ProtocolEvent& input, const PositionSample& sample,
                  std::size_t position_index) {
    std::vector<ProtocolEvent> pending{input};
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const ProtocolEvent ev = pending[k];
      const Phase before = state.phase;
      auto step = transition(state, ev);
      state = step.state;
      trace.push_back({ev, before, state.phase, false});
      for (const auto& out : step.emitted) {
        trace.push_back({out, state.phase, state.phase, true});
        switch (out.kind) {
          case EventKind::HoRequest:
            // Admission control always accepts.
            pending.push_back(ProtocolEvent::make(EventKind::HoRequestAck, out.position));
            break;
          case EventKind::HoCommandFront:
          case EventKind::HoCommandRear: {
            const bool front = out.kind == EventKind::HoCommandFront;
            const auto& target = front ? sample.front[1] : sample.rear[1];
            const bool failed = target.handover < sc.threshold;
            (front ? outcome.front_attempts : outcome.rear_attempts)
                .push_back({position_index, failed});
            if (failed) {
              (front ? outcome.front_failed : outcome.rear_failed) = true;
              pending.push_back(ProtocolEvent::make(EventKind::AttachFailed, out.position,
                                                    front ? AntennaId::Front : AntennaId::Rear));
            } else {
              pending.push_back(ProtocolEvent::make(
                  front ? EventKind::FrontAttached : EventKind::RearAttached, out.position,
                  front ? AntennaId::Front : AntennaId::Rear));
              (front ? outcome.front_ho_position : outcome.rear_ho_position) = out.position;
            }
            break;
          }
          case EventKind::DualcastFinish:
            pending.push_back(ProtocolEvent::make(EventKind::DualcastFinishAck, out.position));
            break;
          default:
            break;
        }
      }
    }
  };

  std::optional<double> open_since;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    RandomStream rng = seed.stream(trial, k);
    const PositionSample sample = draw_position(sc, links[k], rng);
    const bool front_trigger =
        sample.front[1].handover - sample.front[0].handover > sc.hysteresis;
    const bool rear_trigger =
        !single && sample.rear[1].handover - sample.rear[0].handover > sc.hysteresis;
    auto report = ProtocolEvent::report(x, front_trigger, rear_trigger);
    report.rau_index = rau_index;
    feed(report, sample, k);

    // Interruption: every attached antenna is below threshold on its cell.
    bool interrupted = true;
    if (state.front_attached) {
      interrupted &= sample.front[static_cast<int>(*state.front_attached)].rss < sc.threshold;
    }
    if (state.rear_attached) {
      interrupted &= sample.rear[static_cast<int>(*state.rear_attached)].rss < sc.threshold;
    }
    if (interrupted && !open_since) open_since = x;
    if (!interrupted && open_since) {
      outcome.interruption_intervals.emplace_back(*open_since, x);
      open_since.reset();
    }
  }
  if (open_since) outcome.interruption_intervals.emplace_back(*open_since, grid.positions.back());
  outcome.final_phase = state.phase;
  return result;
}

inline std::vector<PositionLinks> grid_links(const Scenario& sc, const PositionGrid& grid) {
  std::vector<PositionLinks> out;
  out.reserve(grid.size());
  for (double x : grid.positions) out.push_back(position_links(sc, x));
  return out;
}

inline CrossingResult run_crossing(const Scenario& sc, const PositionGrid& grid,
                                   const SeedPolicy& seed, std::uint64_t trial = 0) {
  sc.validate();
  if (grid.size() == 0) throw DomainError("run_crossing: empty grid");
  return run_crossing(sc, grid, grid_links(sc, grid), seed, trial);
}

/// Tab-separated trace: position_m, phase_before, event_kind, antenna,
/// phase_after; one event per line in processing order.
inline std::string format_trace(const std::vector<TraceEntry>& trace) {
  std::string out;
  char buf[64];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%.6g", e.event.position);
    out += buf;
    out += '\t';
    out += to_string(e.before);
    out += '\t';
    out += to_string(e.event.kind);
    out += '\t';
    out += e.event.antenna ? to_string(*e.event.antenna) : std::string_view("-");
    out += '\t';
    out += to_string(e.after);
    out += '\n';
  }
  return out;
}

/// Replays the input events of a trace from the initial state, checking that
/// every transition is legal and reproduces the recorded phases and outputs.
/// Returns the final state.
inline HandoverState replay_trace(const std::vector<TraceEntry>& trace, bool single_antenna) {
  HandoverState state = HandoverState::initial(single_antenna);
  std::vector<ProtocolEvent> expected;
  std::size_t cursor = 0;
  for (const auto& e : trace) {
    if (e.emitted) {
      if (cursor >= expected.size() || expected[cursor].kind != e.event.kind) {
        throw std::runtime_error("replay: unexpected emitted event " +
                                 std::string(to_string(e.event.kind)));
      }
      ++cursor;
      continue;
    }
    if (cursor != expected.size()) throw std::runtime_error("replay: missing emitted event");
    if (state.phase != e.before) throw std::runtime_error("replay: phase mismatch");
    auto step = transition(state, e.event);
    state = step.state;
    if (state.phase != e.after) throw std::runtime_error("replay: phase mismatch after event");
    if (!state.any_attached()) throw std::runtime_error("replay: no antenna attached");
    expected = std::move(step.emitted);
    cursor = 0;
  }
  return state;
}

}  // namespace hsr
