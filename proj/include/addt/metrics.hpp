#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace addt::metrics {

struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// A detection matched to the ground-truth object it observed.
struct DetectionPair {
  PlanarPose detected;
  PlanarPose ground_truth;
};

/// Mean Euclidean distance between detected and ground-truth centers.
/// Throws std::invalid_argument on an empty set.
double position_error(std::span<const DetectionPair> pairs);

/// Mean absolute orientation difference, each term wrapped into [0, pi].
/// Throws std::invalid_argument on an empty set.
double orientation_error(std::span<const DetectionPair> pairs);

/// Mean of the plain |theta_d - theta_gt| without wrapping. Reported next to
/// the wrapped value; ill-defined across the +-pi seam.
double orientation_error_raw(std::span<const DetectionPair> pairs);

enum class OutcomeKind { success, collision, off_lane, timeout, aborted };

std::string_view to_string(OutcomeKind kind);
std::optional<OutcomeKind> outcome_from_string(std::string_view s);

struct MissionOutcome {
  OutcomeKind kind = OutcomeKind::aborted;
  double time_of_event = 0.0;

  bool operator==(const MissionOutcome&) const = default;
};

enum class EventKind { collision, off_lane };

struct TraceEvent {
  double time = 0.0;
  EventKind kind = EventKind::collision;
};

struct ProgressSample {
  double time = 0.0;
  double s = 0.0;
};

/// Per-trial evidence consumed by classify_mission.
struct MissionTrace {
  std::vector<TraceEvent> events;
  std::vector<ProgressSample> progress;
};

struct MissionGoal {
  double target_s = 0.0;
  double timeout = 0.0;
};

/// First terminal occurrence wins: collision / off-lane events, or the ego
/// reaching target_s. Nothing terminal before the timeout yields `timeout`.
/// Non-monotone or non-finite traces yield `aborted`.
MissionOutcome classify_mission(const MissionTrace& trace, const MissionGoal& goal);

inline constexpr double kWilsonZ95 = 1.959964;

struct SuccessAggregate {
  int successes = 0;
  int trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Wilson score interval for k successes out of n.
SuccessAggregate wilson(int successes, int trials, double z = kWilsonZ95);

/// Throws std::invalid_argument on an empty list.
SuccessAggregate aggregate(std::span<const MissionOutcome> outcomes);

}  // namespace addt::metrics
