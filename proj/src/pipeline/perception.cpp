#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "addt/pipeline.hpp"

namespace addt::pipeline {

namespace {

enum Field : std::size_t { kActive, kId, kX, kY, kYaw, kVx, kVy, kAge, kHits, kFields };
constexpr const char* kFieldNames[kFields] = {"active", "id", "x", "y", "yaw",
                                              "vx", "vy", "age", "hits"};
constexpr double kMaxHits = 1000.0;

// Registered values may hold anything after a fault; keep the conversion defined.
int as_int(double v) {
  if (std::isnan(v)) return 0;
  return static_cast<int>(std::clamp(v, -1e9, 1e9));
}

}  // namespace

double TrackedObject::speed() const { return std::hypot(vx, vy); }

Perception::Perception(const PerceptionParams& p) {
  assoc_gate_ = state_.add("assoc_gate", p.assoc_gate);
  stale_limit_ = state_.add("stale_limit", p.stale_limit);
  range_gate_ = state_.add("range_gate", p.range_gate);
  next_id_ = state_.add("next_id", 0.0);
  slot0_ = state_.size();
  for (std::size_t i = 0; i < kTrackSlots; ++i) {
    for (std::size_t f = 0; f < kFields; ++f) {
      state_.add("track[" + std::to_string(i) + "]." + kFieldNames[f]);
    }
  }
}

void Perception::step(std::span<const sensor::EgoDetection> detections,
                      const sim::VehicleState& ego, double dt) {
  auto& s = state_;
  const double c = std::cos(ego.yaw), sn = std::sin(ego.yaw);

  struct Det {
    double x, y, yaw;
  };
  std::vector<Det> dets;
  for (const auto& d : detections) {
    if (!(d.range <= s[range_gate_])) continue;
    dets.push_back({ego.x + c * d.x - sn * d.y, ego.y + sn * d.x + c * d.y, wrap_angle(ego.yaw + d.yaw)});
  }

  // Greedy global nearest neighbour: shortest pairs first, ties by slot then
  // detection order.
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < kTrackSlots; ++i) {
    if (!(s[slot(i, kActive)] > 0.5)) continue;
    for (std::size_t j = 0; j < dets.size(); ++j) {
      const double dist = std::hypot(dets[j].x - s[slot(i, kX)], dets[j].y - s[slot(i, kY)]);
      if (dist <= s[assoc_gate_]) pairs.emplace_back(dist, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<bool> track_used(kTrackSlots, false), det_used(dets.size(), false);
  for (const auto& [dist, i, j] : pairs) {
    if (track_used[i] || det_used[j]) continue;
    track_used[i] = det_used[j] = true;
    const double span = (s[slot(i, kAge)] + 1.0) * dt;
    s[slot(i, kVx)] = (dets[j].x - s[slot(i, kX)]) / span;
    s[slot(i, kVy)] = (dets[j].y - s[slot(i, kY)]) / span;
    s[slot(i, kX)] = dets[j].x;
    s[slot(i, kY)] = dets[j].y;
    s[slot(i, kYaw)] = dets[j].yaw;
    s[slot(i, kAge)] = 0.0;
    s[slot(i, kHits)] = std::min(s[slot(i, kHits)] + 1.0, kMaxHits);
  }

  for (std::size_t i = 0; i < kTrackSlots; ++i) {
    if (!(s[slot(i, kActive)] > 0.5) || track_used[i]) continue;
    s[slot(i, kAge)] += 1.0;
    if (!(s[slot(i, kAge)] <= s[stale_limit_])) {
      for (std::size_t f = 0; f < kFields; ++f) s[slot(i, f)] = 0.0;
    }
  }

  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (det_used[j]) continue;
    for (std::size_t i = 0; i < kTrackSlots; ++i) {
      if (s[slot(i, kActive)] > 0.5) continue;
      s[slot(i, kActive)] = 1.0;
      s[slot(i, kId)] = s[next_id_];
      s[next_id_] += 1.0;
      s[slot(i, kX)] = dets[j].x;
      s[slot(i, kY)] = dets[j].y;
      s[slot(i, kYaw)] = dets[j].yaw;
      s[slot(i, kVx)] = 0.0;
      s[slot(i, kVy)] = 0.0;
      s[slot(i, kAge)] = 0.0;
      s[slot(i, kHits)] = 1.0;
      break;
    }
  }
}

std::vector<TrackedObject> Perception::tracks() const {
  std::vector<TrackedObject> out;
  const auto& s = state_;
  for (std::size_t i = 0; i < kTrackSlots; ++i) {
    if (!(s[slot(i, kActive)] > 0.5)) continue;
    TrackedObject t;
    t.id = as_int(s[slot(i, kId)]);
    t.x = s[slot(i, kX)];
    t.y = s[slot(i, kY)];
    t.yaw = s[slot(i, kYaw)];
    t.vx = s[slot(i, kVx)];
    t.vy = s[slot(i, kVy)];
    t.age = as_int(s[slot(i, kAge)]);
    t.hits = as_int(s[slot(i, kHits)]);
    out.push_back(t);
  }
  return out;
}

}  // namespace addt::pipeline
