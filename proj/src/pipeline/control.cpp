#include <algorithm>
#include <cmath>

#include "addt/angles.hpp"
#include "addt/pipeline.hpp"

namespace addt::pipeline {

Controller::Controller(const sim::RoadModel& road, const ControlGains& g) : road_(&road) {
  auto& s = state_;
  ix_.kp_v = s.add("kp_v", g.kp_v);
  ix_.ki_v = s.add("ki_v", g.ki_v);
  ix_.kd_v = s.add("kd_v", g.kd_v);
  ix_.k_ff = s.add("k_ff", g.k_ff);
  ix_.kp_lat = s.add("kp_lat", g.kp_lat);
  ix_.ki_lat = s.add("ki_lat", g.ki_lat);
  ix_.kd_lat = s.add("kd_lat", g.kd_lat);
  ix_.k_yaw = s.add("k_yaw", g.k_yaw);
  ix_.int_v_limit = s.add("int_v_limit", g.int_v_limit);
  ix_.int_lat_limit = s.add("int_lat_limit", g.int_lat_limit);
  ix_.wheelbase = s.add("wheelbase", g.wheelbase);
  ix_.max_steer = s.add("max_steer", kMaxSteerCmd);
  ix_.max_accel = s.add("max_accel", kMaxAccelCmd);
  ix_.int_v = s.add("int_v");
  ix_.prev_ev = s.add("prev_ev");
  ix_.int_lat = s.add("int_lat");
  ix_.prev_e = s.add("prev_e");
  ix_.has_prev = s.add("has_prev");
  ix_.cmd_steer = s.add("cmd_steer");
  ix_.cmd_accel = s.add("cmd_accel");
}

ControlCommand Controller::command(long tick) const {
  return {state_[ix_.cmd_steer], state_[ix_.cmd_accel], tick};
}

ControlCommand Controller::step(const Trajectory& traj, const sim::VehicleState& ego, double t,
                                double dt) {
  auto& s = state_;
  if (!traj.valid) {
    s[ix_.cmd_steer] = 0.0;
    s[ix_.cmd_accel] = -s[ix_.max_accel];
    return command(0);
  }

  const sim::RoadModel& road = *road_;
  const sim::FrenetPoint f = road.project(ego.x, ego.y);
  const double road_yaw = road.pose_at(f.s, 0.0).yaw;
  const double kappa = road.curvature_at(f.s);

  const auto [d_ref, d_rate] = traj.lateral_at(t);
  const auto [v_ref, a_ref] = traj.speed_at(t);

  // Lateral: cross-track PID, heading toward the reference slope, curvature
  // feed-forward.
  const double e = f.d - d_ref;
  const double heading_des = std::atan2(d_rate, std::max(ego.speed, 1.0));
  const double heading_err = wrap_angle(ego.yaw - road_yaw - heading_des);
  const bool has_prev = s[ix_.has_prev] > 0.5;
  s[ix_.int_lat] = std::clamp(s[ix_.int_lat] + e * dt, -s[ix_.int_lat_limit], s[ix_.int_lat_limit]);
  const double de = has_prev ? (e - s[ix_.prev_e]) / dt : 0.0;
  double steer = std::atan(s[ix_.wheelbase] * kappa) -
                 (s[ix_.kp_lat] * e + s[ix_.ki_lat] * s[ix_.int_lat] + s[ix_.kd_lat] * de) -
                 s[ix_.k_yaw] * heading_err;

  // Longitudinal: PID on speed error with profile acceleration feed-forward.
  const double ev = v_ref - ego.speed;
  s[ix_.int_v] = std::clamp(s[ix_.int_v] + ev * dt, -s[ix_.int_v_limit], s[ix_.int_v_limit]);
  const double dev = has_prev ? (ev - s[ix_.prev_ev]) / dt : 0.0;
  double accel = s[ix_.k_ff] * a_ref + s[ix_.kp_v] * ev + s[ix_.ki_v] * s[ix_.int_v] +
                 s[ix_.kd_v] * dev;

  s[ix_.prev_e] = e;
  s[ix_.prev_ev] = ev;
  s[ix_.has_prev] = 1.0;

  steer = std::clamp(steer, -s[ix_.max_steer], s[ix_.max_steer]);
  accel = std::clamp(accel, -s[ix_.max_accel], s[ix_.max_accel]);
  s[ix_.cmd_steer] = steer;
  s[ix_.cmd_accel] = accel;
  return command(0);
}

}  // namespace addt::pipeline
