#pragma once

#include <vector>

namespace addt::sim {

struct Segment {
  double length = 0.0;
  double curvature = 0.0;  // 1/m, positive turns left, 0 = straight
};

struct RoadPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct FrenetPoint {
  double s = 0.0;
  double d = 0.0;  // positive to the left of the reference line
};

/// Chain of straight and constant-curvature segments starting at the origin
/// heading +x. The reference line is the center of lane 0; lane i is centered
/// at d = i * lane_width.
class RoadModel {
 public:
  /// Throws std::invalid_argument when an invariant is violated.
  RoadModel(int lane_count, double lane_width, std::vector<Segment> segments);

  int lane_count() const { return lane_count_; }
  double lane_width() const { return lane_width_; }
  double total_length() const { return total_length_; }
  const std::vector<Segment>& segments() const { return segments_; }

  double lane_center(int lane) const { return lane * lane_width_; }
  /// Nearest lane to lateral offset d, clamped to existing lanes.
  int lane_of(double d) const;

  /// Curvature of the reference line at s (clamped to the road).
  double curvature_at(double s) const;

  /// Exact pose at (s, d); s outside [0, total_length] extends the first or
  /// last segment tangentially.
  RoadPose pose_at(double s, double d) const;

  /// Closest-point projection onto the reference line, extended
  /// tangentially beyond either end.
  FrenetPoint project(double x, double y) const;

 private:
  struct Placed {
    Segment seg;
    double s0 = 0.0;
    RoadPose start;
  };

  std::size_t segment_index(double s) const;
  static RoadPose advance(const RoadPose& start, double curvature, double ds);

  int lane_count_;
  double lane_width_;
  std::vector<Segment> segments_;
  std::vector<Placed> placed_;
  double total_length_ = 0.0;
};

/// (x, y, tangent yaw) at Frenet (s, d). Throws std::out_of_range unless
/// 0 <= s <= total length.
RoadPose frenet_to_cartesian(const RoadModel& road, double s, double d);

FrenetPoint cartesian_to_frenet(const RoadModel& road, double x, double y);

}  // namespace addt::sim
