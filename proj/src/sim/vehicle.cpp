#include <algorithm>
#include <cmath>

#include "addt/world.hpp"

namespace addt::sim {

namespace {

double sanitize(double v, double bound, int& clamp_count, int& non_finite) {
  if (std::isnan(v)) {
    ++non_finite;
    return 0.0;
  }
  if (v > bound) {
    ++clamp_count;
    return bound;
  }
  if (v < -bound) {
    ++clamp_count;
    return -bound;
  }
  return v;
}

}  // namespace

VehicleState step_vehicle(const VehicleState& s, double steer, double accel, double dt,
                          StepClamps* clamps) {
  StepClamps local;
  steer = sanitize(steer, kMaxSteer, local.steer, local.non_finite);
  accel = sanitize(accel, kMaxAccel, local.accel, local.non_finite);

  VehicleState n = s;
  n.yaw = s.yaw + (s.speed / s.wheelbase) * std::tan(steer) * dt;
  n.x = s.x + s.speed * std::cos(s.yaw) * dt;
  n.y = s.y + s.speed * std::sin(s.yaw) * dt;
  n.speed = s.speed + accel * dt;
  if (n.speed < 0.0) {
    n.speed = 0.0;
    ++local.speed;
  }
  if (clamps) {
    clamps->steer += local.steer;
    clamps->accel += local.accel;
    clamps->speed += local.speed;
    clamps->non_finite += local.non_finite;
  }
  return n;
}

VehicleState place_on_road(const RoadModel& road, double s, double d, double speed, double length,
                           double width, double wheelbase) {
  const RoadPose p = road.pose_at(s, d);
  VehicleState v;
  v.x = p.x;
  v.y = p.y;
  v.yaw = p.yaw;
  v.speed = speed;
  v.wheelbase = wheelbase;
  v.half_length = length / 2;
  v.half_width = width / 2;
  return v;
}

}  // namespace addt::sim
