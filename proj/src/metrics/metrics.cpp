#include "addt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "addt/angles.hpp"

namespace addt::metrics {

namespace {

void require_nonempty(std::span<const DetectionPair> pairs, const char* what) {
  if (pairs.empty()) throw std::invalid_argument(std::string(what) + ": empty pair set");
}

}  // namespace

double position_error(std::span<const DetectionPair> pairs) {
  require_nonempty(pairs, "position_error");
  double sum = 0.0;
  for (const auto& p : pairs) {
    sum += std::hypot(p.detected.x - p.ground_truth.x, p.detected.y - p.ground_truth.y);
  }
  return sum / static_cast<double>(pairs.size());
}

double orientation_error(std::span<const DetectionPair> pairs) {
  require_nonempty(pairs, "orientation_error");
  double sum = 0.0;
  for (const auto& p : pairs) sum += angular_distance(p.detected.theta, p.ground_truth.theta);
  return sum / static_cast<double>(pairs.size());
}

double orientation_error_raw(std::span<const DetectionPair> pairs) {
  require_nonempty(pairs, "orientation_error_raw");
  double sum = 0.0;
  for (const auto& p : pairs) sum += std::fabs(p.detected.theta - p.ground_truth.theta);
  return sum / static_cast<double>(pairs.size());
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::success: return "success";
    case OutcomeKind::collision: return "collision";
    case OutcomeKind::off_lane: return "off_lane";
    case OutcomeKind::timeout: return "timeout";
    case OutcomeKind::aborted: return "aborted";
  }
  return "aborted";
}

std::optional<OutcomeKind> outcome_from_string(std::string_view s) {
  for (auto k : {OutcomeKind::success, OutcomeKind::collision, OutcomeKind::off_lane,
                 OutcomeKind::timeout, OutcomeKind::aborted}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

MissionOutcome classify_mission(const MissionTrace& trace, const MissionGoal& goal) {
  const MissionOutcome aborted{OutcomeKind::aborted, 0.0};
  if (!(goal.timeout > 0.0) || !std::isfinite(goal.target_s)) return aborted;

  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& e : trace.events) {
    if (!std::isfinite(e.time) || e.time < 0.0 || e.time < prev) return aborted;
    prev = e.time;
  }
  prev = -std::numeric_limits<double>::infinity();
  for (const auto& p : trace.progress) {
    if (!std::isfinite(p.time) || !std::isfinite(p.s) || p.time < 0.0 || p.time < prev) {
      return aborted;
    }
    prev = p.time;
  }

  double reach_time = std::numeric_limits<double>::infinity();
  for (const auto& p : trace.progress) {
    if (p.time > goal.timeout) break;
    if (p.s >= goal.target_s) {
      reach_time = p.time;
      break;
    }
  }

  if (!trace.events.empty()) {
    const auto& first = trace.events.front();
    if (first.time <= goal.timeout && first.time <= reach_time) {
      return {first.kind == EventKind::collision ? OutcomeKind::collision : OutcomeKind::off_lane,
              first.time};
    }
  }
  if (std::isfinite(reach_time)) return {OutcomeKind::success, reach_time};
  return {OutcomeKind::timeout, goal.timeout};
}

SuccessAggregate wilson(int successes, int trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson: trials must be positive");
  if (successes < 0 || successes > trials) throw std::invalid_argument("wilson: 0 <= k <= n");
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  SuccessAggregate agg;
  agg.successes = successes;
  agg.trials = trials;
  agg.rate = p;
  // Clamp rounding at the boundaries so ci_low <= rate <= ci_high holds exactly.
  agg.ci_low = std::clamp(center - half, 0.0, p);
  agg.ci_high = std::clamp(center + half, p, 1.0);
  return agg;
}

SuccessAggregate aggregate(std::span<const MissionOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("aggregate: no outcomes");
  const auto k = std::count_if(outcomes.begin(), outcomes.end(),
                               [](const MissionOutcome& o) { return o.kind == OutcomeKind::success; });
  return wilson(static_cast<int>(k), static_cast<int>(outcomes.size()));
}

}  // namespace addt::metrics
