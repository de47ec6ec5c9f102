#pragma once

#include <optional>
#include <string>
#include <vector>

#include "addt/pipeline.hpp"
#include "addt/rng.hpp"
#include "addt/state.hpp"

namespace addt::fault {

/// binary64 pattern of `value` with bit `bit` (0 = mantissa LSB, 63 = sign)
/// inverted. Throws std::out_of_range for bits outside [0, 63].
double flip_bit(double value, int bit);

enum class Mode { flip, stuck };

struct FaultSpec {
  pipeline::NodeId node = pipeline::NodeId::control;
  std::size_t state_index = 0;
  int bit = 0;
  long trigger_tick = 0;
  Mode mode = Mode::flip;
  double value = 0.0;  // stuck mode only

  bool operator==(const FaultSpec&) const = default;
};

struct FaultLogEntry {
  long tick = 0;
  pipeline::NodeId node = pipeline::NodeId::control;
  std::size_t state_index = 0;
  int bit = 0;
  Mode mode = Mode::flip;
  double value_before = 0.0;
  double value_after = 0.0;
};

using FaultLog = std::vector<FaultLogEntry>;

/// Apply one fault to a node's registered state and return the log entry.
FaultLogEntry inject(pipeline::NodeState& state, const FaultSpec& spec, long tick);

/// Empty when every address exists in the manifest; otherwise a message.
std::optional<std::string> check_addresses(const std::vector<FaultSpec>& schedule,
                                           const pipeline::Manifest& manifest);

/// Drives a schedule over a trial. Flips fire once at their trigger tick;
/// stuck faults are re-applied on every tick from the trigger on. A stuck
/// re-application is logged only when it actually changes the stored value.
class Injector {
 public:
  explicit Injector(std::vector<FaultSpec> schedule);

  /// Apply everything due at `tick`. Entries are appended to `log`.
  void apply(long tick, pipeline::Pipeline& p, FaultLog& log);

  const std::vector<FaultSpec>& schedule() const { return schedule_; }

 private:
  std::vector<FaultSpec> schedule_;  // sorted by trigger tick, stable
};

/// `count` flip faults on `node` with state index, bit and trigger tick drawn
/// uniformly (tick from the inclusive range). Sorted by trigger tick.
/// Throws std::invalid_argument when the node has no registered state or the
/// tick range is empty.
std::vector<FaultSpec> schedule_faults(pipeline::NodeId node, int count, long tick_min,
                                       long tick_max, Rng& rng,
                                       const pipeline::Manifest& manifest);

std::string schedule_to_json(const std::vector<FaultSpec>& schedule);
/// Throws std::runtime_error on malformed input.
std::vector<FaultSpec> schedule_from_json(const std::string& text);

std::string_view to_string(Mode m);

}  // namespace addt::fault
