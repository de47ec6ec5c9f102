#include "addt/road.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "addt/angles.hpp"

namespace addt::sim {

RoadModel::RoadModel(int lane_count, double lane_width, std::vector<Segment> segments)
    : lane_count_(lane_count), lane_width_(lane_width), segments_(std::move(segments)) {
  if (lane_count_ < 1) throw std::invalid_argument("road: lane_count must be >= 1");
  if (!(lane_width_ > 0.0)) throw std::invalid_argument("road: lane_width must be > 0");
  if (segments_.empty()) throw std::invalid_argument("road: at least one segment required");
  RoadPose pose{};
  for (const auto& seg : segments_) {
    if (!(seg.length > 0.0)) throw std::invalid_argument("road: segment length must be > 0");
    if (std::fabs(seg.curvature) * lane_width_ >= 1.0) {
      throw std::invalid_argument("road: |curvature| * lane_width must be < 1");
    }
    placed_.push_back({seg, total_length_, pose});
    pose = advance(pose, seg.curvature, seg.length);
    total_length_ += seg.length;
  }
  if (!(total_length_ > 0.0)) throw std::invalid_argument("road: total length must be > 0");
}

int RoadModel::lane_of(double d) const {
  const double idx = std::round(d / lane_width_);
  if (!(idx >= 0.0)) return 0;
  if (idx >= lane_count_ - 1) return lane_count_ - 1;
  return static_cast<int>(idx);
}

std::size_t RoadModel::segment_index(double s) const {
  std::size_t i = 0;
  while (i + 1 < placed_.size() && s >= placed_[i + 1].s0) ++i;
  return i;
}

double RoadModel::curvature_at(double s) const {
  if (s < 0.0 || s > total_length_) return 0.0;
  return placed_[segment_index(s)].seg.curvature;
}

RoadPose RoadModel::advance(const RoadPose& start, double curvature, double ds) {
  RoadPose p;
  if (curvature == 0.0) {
    p.x = start.x + ds * std::cos(start.yaw);
    p.y = start.y + ds * std::sin(start.yaw);
    p.yaw = start.yaw;
    return p;
  }
  const double yaw = start.yaw + curvature * ds;
  p.x = start.x + (std::sin(yaw) - std::sin(start.yaw)) / curvature;
  p.y = start.y - (std::cos(yaw) - std::cos(start.yaw)) / curvature;
  p.yaw = yaw;
  return p;
}

RoadPose RoadModel::pose_at(double s, double d) const {
  RoadPose center;
  if (s < 0.0) {
    center = advance(placed_.front().start, 0.0, s);
  } else if (s > total_length_) {
    const auto& last = placed_.back();
    const RoadPose end = advance(last.start, last.seg.curvature, last.seg.length);
    center = advance(end, 0.0, s - total_length_);
  } else {
    const auto& p = placed_[segment_index(s)];
    center = advance(p.start, p.seg.curvature, s - p.s0);
  }
  center.x -= d * std::sin(center.yaw);
  center.y += d * std::cos(center.yaw);
  return center;
}

FrenetPoint RoadModel::project(double x, double y) const {
  double best_dist = std::numeric_limits<double>::infinity();
  FrenetPoint best;
  for (std::size_t i = 0; i < placed_.size(); ++i) {
    const auto& p = placed_[i];
    const bool first = i == 0;
    const bool last = i + 1 == placed_.size();
    const double L = p.seg.length;
    const double k = p.seg.curvature;
    double local_s = 0.0;
    if (k == 0.0) {
      local_s = (x - p.start.x) * std::cos(p.start.yaw) + (y - p.start.y) * std::sin(p.start.yaw);
    } else {
      const double r = 1.0 / std::fabs(k);
      const double side = k > 0.0 ? 1.0 : -1.0;
      // Center of curvature lies on the left normal for left turns.
      const double cx = p.start.x - side * r * std::sin(p.start.yaw);
      const double cy = p.start.y + side * r * std::cos(p.start.yaw);
      const double phi0 = std::atan2(p.start.y - cy, p.start.x - cx);
      const double phi = std::atan2(y - cy, x - cx);
      double sweep = std::fmod(side * (phi - phi0), kTwoPi);
      if (sweep < 0.0) sweep += kTwoPi;
      local_s = sweep * r;
      // Past the arc end: take whichever end is nearer along the circle.
      if (local_s > L && (local_s - L) > (kTwoPi * r - local_s)) local_s -= kTwoPi * r;
      // Arcs are never extended; the road continues tangentially instead.
      if (first && local_s < 0.0) local_s = 0.0;
      if (last && local_s > L) local_s = L;
    }
    if (!first && local_s < 0.0) local_s = 0.0;
    if (!last && local_s > L) local_s = L;

    const double s = p.s0 + local_s;
    const RoadPose c = pose_at(s, 0.0);
    const double dist = std::hypot(x - c.x, y - c.y);
    if (dist < best_dist) {
      best_dist = dist;
      best = {s, -(x - c.x) * std::sin(c.yaw) + (y - c.y) * std::cos(c.yaw)};
    }
  }
  return best;
}

RoadPose frenet_to_cartesian(const RoadModel& road, double s, double d) {
  if (!(s >= 0.0 && s <= road.total_length())) {
    throw std::out_of_range("frenet_to_cartesian: s=" + std::to_string(s) + " outside [0, " +
                            std::to_string(road.total_length()) + "]");
  }
  return road.pose_at(s, d);
}

FrenetPoint cartesian_to_frenet(const RoadModel& road, double x, double y) {
  return road.project(x, y);
}

}  // namespace addt::sim
