#include <algorithm>
#include <array>
#include <cmath>

#include "addt/angles.hpp"
#include "addt/world.hpp"

namespace addt::sim {

namespace {

// Agent driver gains. The lateral loop turns a desired lateral velocity into
// a heading target, and the heading loop into a yaw rate.
constexpr double kSpeedGain = 1.0;     // 1/s
constexpr double kMaxCruiseAccel = 3.0;
constexpr double kLateralGain = 4.0;   // 1/s
constexpr double kHeadingGain = 20.0;  // 1/s
constexpr double kMaxHeading = 0.5;    // rad
constexpr double kStopDecel = 3.0;

// Quintic smoothstep with zero velocity and acceleration at both ends.
double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep_rate(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }

double cruise_accel(const Agent& a) {
  return std::clamp(kSpeedGain * (a.set_speed - a.state.speed), -kMaxCruiseAccel,
                    kMaxCruiseAccel);
}

double longitudinal(const Agent& a, double t) {
  switch (a.script.kind) {
    case Behavior::emergency_brake:
      return t >= a.script.at ? -a.script.decel : cruise_accel(a);
    case Behavior::stop:
      return t >= a.script.at ? -(a.script.decel > 0.0 ? a.script.decel : kStopDecel)
                              : cruise_accel(a);
    case Behavior::cruise:
    case Behavior::cut_in:
      break;
  }
  return cruise_accel(a);
}

double lateral_steer(const Agent& a, const RoadModel& road, double t) {
  const VehicleState& v = a.state;
  const FrenetPoint f = road.project(v.x, v.y);
  const RoadPose ref = road.pose_at(f.s, 0.0);
  const double kappa = road.curvature_at(f.s);
  const double heading_err = wrap_angle(v.yaw - ref.yaw);

  // Yaw rate that keeps a vehicle on a line parallel to the reference.
  const double follow_rate = v.speed * kappa * std::cos(heading_err) / (1.0 - kappa * f.d);
  const LateralRef lr = lateral_reference(a, road, t);
  double heading_target = 0.0;
  if (v.speed > 0.1) {
    const double want = (lr.rate + kLateralGain * (lr.d - f.d)) / v.speed;
    heading_target = std::asin(std::clamp(want, -std::sin(kMaxHeading), std::sin(kMaxHeading)));
  }
  const double yaw_rate = follow_rate + kHeadingGain * (heading_target - heading_err);
  if (v.speed <= 1e-9) return std::atan(v.wheelbase * kappa);
  return std::atan(v.wheelbase * yaw_rate / v.speed);
}

std::array<std::array<double, 2>, 4> corners(const VehicleState& v) {
  const double c = std::cos(v.yaw);
  const double s = std::sin(v.yaw);
  const double lx = v.half_length * c, ly = v.half_length * s;
  const double wx = -v.half_width * s, wy = v.half_width * c;
  return {{{v.x + lx + wx, v.y + ly + wy},
           {v.x + lx - wx, v.y + ly - wy},
           {v.x - lx - wx, v.y - ly - wy},
           {v.x - lx + wx, v.y - ly + wy}}};
}

bool separated_on(const std::array<std::array<double, 2>, 4>& a,
                  const std::array<std::array<double, 2>, 4>& b, double ax, double ay) {
  double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
  for (const auto& p : a) {
    const double d = p[0] * ax + p[1] * ay;
    amin = std::min(amin, d);
    amax = std::max(amax, d);
  }
  for (const auto& p : b) {
    const double d = p[0] * ax + p[1] * ay;
    bmin = std::min(bmin, d);
    bmax = std::max(bmax, d);
  }
  return amax < bmin || bmax < amin;
}

}  // namespace

LateralRef lateral_reference(const Agent& a, const RoadModel& road, double t) {
  const double from = road.lane_center(a.lane);
  if (a.script.kind != Behavior::cut_in) return {from, 0.0};
  const double to = road.lane_center(a.script.target_lane);
  if (t <= a.script.at) return {from, 0.0};
  if (a.script.duration <= 0.0 || t >= a.script.at + a.script.duration) return {to, 0.0};
  const double u = (t - a.script.at) / a.script.duration;
  return {from + (to - from) * smoothstep(u), (to - from) * smoothstep_rate(u) / a.script.duration};
}

WorldState step_behaviors(const WorldState& world, const RoadModel& road, double dt) {
  WorldState next = world;
  for (auto& a : next.agents) {
    const double steer = lateral_steer(a, road, world.time);
    const double accel = longitudinal(a, world.time);
    a.state = step_vehicle(a.state, steer, accel, dt);
  }
  next.tick = world.tick + 1;
  next.time = static_cast<double>(next.tick) * dt;
  return next;
}

bool rectangles_overlap(const VehicleState& a, const VehicleState& b) {
  const auto ca = corners(a);
  const auto cb = corners(b);
  for (const double yaw : {a.yaw, b.yaw}) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    if (separated_on(ca, cb, c, s) || separated_on(ca, cb, -s, c)) return false;
  }
  return true;
}

std::optional<WorldEvent> check_collision(const WorldState& world) {
  for (const auto& a : world.agents) {
    if (rectangles_overlap(world.ego, a.state)) {
      return WorldEvent{world.time, WorldEventKind::collision, a.id};
    }
  }
  return std::nullopt;
}

bool check_off_lane(const WorldState& world, const RoadModel& road) {
  const FrenetPoint f = road.project(world.ego.x, world.ego.y);
  const double center = road.lane_center(road.lane_of(f.d));
  return std::fabs(f.d - center) > road.lane_width() / 2;
}

}  // namespace addt::sim
