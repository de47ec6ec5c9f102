#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "addt/angles.hpp"
#include "addt/pipeline.hpp"

namespace addt::pipeline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep_rate(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }

// Track prediction in road coordinates, constant velocity.
struct Obstacle {
  double s = 0.0;
  double d = 0.0;
  double vs = 0.0;
  double vd = 0.0;
};

}  // namespace

std::pair<double, double> Trajectory::lateral_at(double t) const {
  if (!(t_lc > 0.0) || t >= t0 + t_lc) return {target_d, 0.0};
  if (t <= t0) return {start_d, 0.0};
  const double u = (t - t0) / t_lc;
  return {start_d + (target_d - start_d) * smoothstep(u),
          (target_d - start_d) * smoothstep_rate(u) / t_lc};
}

std::pair<double, double> Trajectory::speed_at(double t) const {
  const double tau = t - plan_time;
  if (!(sample_dt > 0.0) || !(tau > 0.0)) return {v[0], (v[1] - v[0]) / sample_dt};
  const double k = tau / sample_dt;
  if (!(k < kProfileSamples - 1)) return {v[kProfileSamples - 1], 0.0};
  const auto i = static_cast<std::size_t>(k);
  const double frac = k - static_cast<double>(i);
  const double a = (v[i + 1] - v[i]) / sample_dt;
  return {v[i] + (v[i + 1] - v[i]) * frac, a};
}

std::vector<std::pair<double, double>> Trajectory::speed_profile() const {
  std::vector<std::pair<double, double>> out;
  if (!valid) return out;
  double s = 0.0;
  for (std::size_t k = 0; k < kProfileSamples; ++k) {
    if (k > 0) s += 0.5 * (v[k - 1] + v[k]) * sample_dt;
    out.emplace_back(s, v[k]);
  }
  return out;
}

Planner::Planner(const sim::RoadModel& road, const PlannerParams& p) : road_(&road) {
  auto& s = state_;
  ix_.w_col = s.add("w_col", p.w_col);
  ix_.w_lane = s.add("w_lane", p.w_lane);
  ix_.w_prog = s.add("w_prog", p.w_prog);
  ix_.v_cruise = s.add("v_cruise", p.v_cruise);
  ix_.d_mission = s.add("d_mission", p.d_mission);
  ix_.lane_width = s.add("lane_width", road.lane_width());
  ix_.lane_count = s.add("lane_count", road.lane_count());
  ix_.sample_dt = s.add("sample_dt", p.horizon / (kProfileSamples - 1));
  ix_.t_lc = s.add("t_lc", p.t_lc);
  ix_.lon_margin = s.add("lon_margin", p.lon_margin);
  ix_.lat_margin = s.add("lat_margin", p.lat_margin);
  ix_.ego_length = s.add("ego_length", p.ego_length);
  ix_.ego_width = s.add("ego_width", p.ego_width);
  ix_.obj_length = s.add("obj_length", p.obj_length);
  ix_.obj_width = s.add("obj_width", p.obj_width);
  ix_.a_comfort = s.add("a_comfort", p.a_comfort);
  ix_.a_follow_max = s.add("a_follow_max", p.a_follow_max);
  ix_.stop_decel = s.add("stop_decel", p.stop_decel);
  ix_.time_gap = s.add("time_gap", p.time_gap);
  ix_.min_gap = s.add("min_gap", p.min_gap);
  ix_.gap_gain = s.add("gap_gain", p.gap_gain);
  ix_.speed_gain = s.add("speed_gain", p.speed_gain);
  ix_.lc_active = s.add("plan.active");
  ix_.lc_start_d = s.add("plan.start_d");
  ix_.lc_target_d = s.add("plan.target_d");
  ix_.lc_t0 = s.add("plan.t0");
  ix_.valid = s.add("traj.valid");
  ix_.target_d = s.add("traj.target_d");
  ix_.start_d = s.add("traj.start_d");
  ix_.t0 = s.add("traj.t0");
  ix_.out_t_lc = s.add("traj.t_lc", p.t_lc);
  ix_.plan_time = s.add("traj.plan_time");
  ix_.profile = s.add("traj.profile");
  ix_.cost = s.add("traj.cost");
  ix_.v0 = s.size();
  for (std::size_t k = 0; k < kProfileSamples; ++k) s.add("traj.v[" + std::to_string(k) + "]");
}

Trajectory Planner::trajectory() const {
  const auto& s = state_;
  Trajectory t;
  t.valid = s[ix_.valid] > 0.5;
  t.target_d = s[ix_.target_d];
  t.start_d = s[ix_.start_d];
  t.t0 = s[ix_.t0];
  t.t_lc = s[ix_.out_t_lc];
  t.plan_time = s[ix_.plan_time];
  t.sample_dt = s[ix_.sample_dt];
  const double prof = s[ix_.profile];
  t.profile = prof >= 0.0 && prof <= 2.0 ? static_cast<int>(prof) : 0;
  t.cost = s[ix_.cost];
  for (std::size_t k = 0; k < kProfileSamples; ++k) t.v[k] = s[ix_.v0 + k];
  return t;
}

Trajectory Planner::step(std::span<const TrackedObject> tracks, const sim::VehicleState& ego,
                         double t) {
  auto& s = state_;
  const sim::RoadModel& road = *road_;
  const double W = s[ix_.lane_width];
  const double n_lanes = s[ix_.lane_count];
  const double dt = s[ix_.sample_dt];

  const sim::FrenetPoint ef = road.project(ego.x, ego.y);
  const double v_e = ego.speed;

  // Tracks confirmed by at least two detections, in road coordinates.
  // Followers behind the ego in its own lane are not the ego's to avoid.
  std::vector<Obstacle> obs;
  for (const auto& tr : tracks) {
    if (tr.hits < 2) continue;
    const sim::FrenetPoint f = road.project(tr.x, tr.y);
    const double th = road.pose_at(f.s, 0.0).yaw;
    const Obstacle o{f.s, f.d, tr.vx * std::cos(th) + tr.vy * std::sin(th),
                     -tr.vx * std::sin(th) + tr.vy * std::cos(th)};
    if (o.s < ef.s && std::fabs(o.d - ef.d) < W / 2) continue;
    obs.push_back(o);
  }
  const double d_min = 0.0, d_max = (n_lanes - 1.0) * W;
  auto predict_d = [&](const Obstacle& o, double tau) {
    return std::clamp(o.d + o.vd * tau, d_min, d_max);
  };

  const double lon_reach = 0.5 * (s[ix_.ego_length] + s[ix_.obj_length]) + s[ix_.lon_margin];
  const double lat_reach = 0.5 * (s[ix_.ego_width] + s[ix_.obj_width]) + s[ix_.lat_margin];

  const double lane_idx = std::clamp(std::round(ef.d / W), 0.0, std::max(0.0, n_lanes - 1.0));
  const double center = lane_idx * W;
  const double offsets[5] = {-W, -W / 2, 0.0, W / 2, W};

  candidates_.clear();
  double best_cost = kInf;
  Trajectory best;
  best.valid = false;

  for (double off : offsets) {
    const double target = center + off;
    if (!(target >= d_min - 1e-9 && target <= d_max + 1e-9)) continue;

    Trajectory cand;
    cand.valid = true;
    cand.target_d = target;
    cand.t_lc = s[ix_.t_lc];
    cand.plan_time = t;
    cand.sample_dt = dt;
    if (s[ix_.lc_active] > 0.5 && std::fabs(target - s[ix_.lc_target_d]) < 1e-6) {
      cand.start_d = s[ix_.lc_start_d];
      cand.t0 = s[ix_.lc_t0];
    } else {
      cand.start_d = ef.d;
      cand.t0 = t;
    }

    // Leader: nearest obstacle ahead that comes within half a lane of the
    // target offset during the horizon.
    const Obstacle* leader = nullptr;
    for (const auto& o : obs) {
      if (o.s <= ef.s) continue;
      bool in_corridor = false;
      for (std::size_t k = 0; k < kProfileSamples && !in_corridor; ++k) {
        in_corridor = std::fabs(predict_d(o, k * dt) - target) < W / 2;
      }
      if (in_corridor && (!leader || o.s < leader->s)) leader = &o;
    }

    for (SpeedProfile prof : {SpeedProfile::hold, SpeedProfile::follow, SpeedProfile::stop}) {
      cand.profile = static_cast<int>(prof);
      double v = v_e, se = ef.s;
      std::array<double, kProfileSamples> ego_s{};
      for (std::size_t k = 0; k < kProfileSamples; ++k) {
        cand.v[k] = v;
        ego_s[k] = se;
        double a = 0.0;
        switch (prof) {
          case SpeedProfile::hold:
            a = std::clamp((s[ix_.v_cruise] - v) / dt, -s[ix_.a_comfort], s[ix_.a_comfort]);
            break;
          case SpeedProfile::follow:
            if (leader) {
              const double tau = k * dt;
              const double gap = leader->s + leader->vs * tau - se - 0.5 * (s[ix_.ego_length] + s[ix_.obj_length]);
              const double want = s[ix_.min_gap] + s[ix_.time_gap] * v;
              a = s[ix_.gap_gain] * (gap - want) + s[ix_.speed_gain] * (leader->vs - v);
              a = std::min(a, (s[ix_.v_cruise] - v) / dt);
              a = std::clamp(a, -s[ix_.a_follow_max], s[ix_.a_comfort]);
            } else {
              a = std::clamp((s[ix_.v_cruise] - v) / dt, -s[ix_.a_comfort], s[ix_.a_comfort]);
            }
            break;
          case SpeedProfile::stop:
            a = -s[ix_.stop_decel];
            break;
        }
        const double v_next = std::max(0.0, v + a * dt);
        se += 0.5 * (v + v_next) * dt;
        v = v_next;
      }

      double risk = 0.0;
      for (const auto& o : obs) {
        double worst = 0.0;
        for (std::size_t k = 0; k < kProfileSamples; ++k) {
          const double tau = k * dt;
          const double ds = std::fabs(o.s + o.vs * tau - ego_s[k]);
          const double dd = std::fabs(predict_d(o, tau) - cand.lateral_at(t + tau).first);
          if (!(dd < lat_reach)) continue;
          if (!(ds > lon_reach)) {
            worst = kInf;
            break;
          }
          const double safe = s[ix_.min_gap] + s[ix_.time_gap] * cand.v[k];
          worst = std::max(worst, std::max(0.0, 1.0 - (ds - lon_reach) / safe));
        }
        risk += worst;
      }

      const double v_end = cand.v[kProfileSamples - 1];
      cand.cost = s[ix_.w_col] * risk + s[ix_.w_lane] * std::fabs(target - s[ix_.d_mission]) +
                  s[ix_.w_prog] * (s[ix_.v_cruise] - v_end) * (s[ix_.v_cruise] - v_end);
      candidates_.push_back({target, prof, risk, cand.cost});
      if (cand.cost < best_cost) {
        best_cost = cand.cost;
        best = cand;
      }
    }
  }

  if (best.valid) {
    s[ix_.lc_active] = 1.0;
    s[ix_.lc_start_d] = best.start_d;
    s[ix_.lc_target_d] = best.target_d;
    s[ix_.lc_t0] = best.t0;
  } else {
    s[ix_.lc_active] = 0.0;
  }
  s[ix_.valid] = best.valid ? 1.0 : 0.0;
  s[ix_.target_d] = best.target_d;
  s[ix_.start_d] = best.start_d;
  s[ix_.t0] = best.t0;
  s[ix_.out_t_lc] = best.valid ? best.t_lc : s[ix_.t_lc];
  s[ix_.plan_time] = t;
  s[ix_.profile] = best.profile;
  s[ix_.cost] = best.valid ? best.cost : kInf;
  for (std::size_t k = 0; k < kProfileSamples; ++k) s[ix_.v0 + k] = best.v[k];
  return trajectory();
}

}  // namespace addt::pipeline
