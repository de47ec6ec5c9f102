#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "addt/dsl.hpp"

namespace addt::testing {

using namespace addt::dsl;

// Random valid specs. Every numeric field either takes a literal drawn from
// its legal range or, with some probability, a reference to a sweep variable
// whose values are all legal for every site that references it.
class SpecGen {
 public:
  explicit SpecGen(std::uint64_t seed) : g_(seed) {}

  ScenarioSpec make() {
    ScenarioSpec s;
    s.name = "gen_" + std::to_string(g_() % 100000);
    const int lanes = 1 + static_cast<int>(g_() % 4);
    s.road.lanes = Param(double(lanes));
    s.road.lane_width = Param(real(3.0, 4.0));
    double length = 0.0;
    const int nseg = static_cast<int>(g_() % 4);
    for (int i = 0; i < nseg; ++i) {
      SegmentDecl seg;
      seg.length = Param(real(20.0, 300.0));
      length += seg.length.value;
      const double kmax = 0.9 / (s.road.lane_width.value * lanes);
      seg.curvature = coin(0.4) ? Param(0.0) : Param(real(-kmax, kmax));
      if (std::abs(seg.curvature.value) * seg.length.value > 6.0) seg.curvature = Param(0.0);
      s.road.segments.push_back(seg);
    }
    if (nseg == 0) length = kDefaultRoadLength;

    s.ego = vehicle("ego", lanes, length, true);
    const int nagents = static_cast<int>(g_() % 4);
    for (int i = 0; i < nagents; ++i) s.agents.push_back(vehicle("a" + std::to_string(i), lanes, length, false));

    s.mission.kind = static_cast<MissionKind>(g_() % 3);
    s.mission.target_s = maybe_var(Param(real(1.0, length)), 1.0, length);
    s.mission.timeout = maybe_var(Param(real(1.0, 120.0)), 1.0, 120.0);
    if (coin(0.5)) s.mission.speed = Param(real(0.0, 40.0));
    if (coin(0.3)) s.mission.lane = Param(double(g_() % lanes));

    const int nfaults = static_cast<int>(g_() % 4);
    for (int i = 0; i < nfaults; ++i) s.faults.push_back(fault());

    for (auto& [name, axis] : axes_) s.sweeps.push_back(axis);
    return s;
  }

 private:
  double real(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    const double v = d(g_);
    // Mix short decimals with full-precision doubles.
    switch (g_() % 3) {
      case 0: return std::clamp(std::round(v), lo, hi);
      case 1: return std::clamp(std::round(v * 100.0) / 100.0, lo, hi);
      default: return v;
    }
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(g_) < p; }

  Param maybe_var(Param literal, double lo, double hi) {
    if (!coin(0.15)) return literal;
    const std::string name = "v" + std::to_string(axes_.size());
    SweepAxis axis;
    axis.var = name;
    const int n = 1 + static_cast<int>(g_() % 4);
    for (int i = 0; i < n; ++i) axis.values.push_back(real(lo, hi));
    axes_.emplace_back(name, axis);
    return Param::ref(name);
  }

  VehicleDecl vehicle(std::string name, int lanes, double length, bool ego) {
    VehicleDecl v;
    v.name = std::move(name);
    v.lane = Param(double(g_() % lanes));
    v.s = maybe_var(Param(real(0.0, length)), 0.0, length);
    v.speed = maybe_var(Param(real(0.0, 40.0)), 0.0, 40.0);
    if (coin(0.2)) v.length = Param(real(3.0, 12.0));
    if (coin(0.2)) v.width = Param(real(1.5, 2.6));
    if (coin(0.2)) v.wheelbase = Param(real(2.0, 6.0));
    if (ego) return v;
    v.behavior = static_cast<BehaviorKind>(g_() % 4);
    switch (v.behavior) {
      case BehaviorKind::emergency_brake:
        v.at = maybe_var(Param(real(0.0, 20.0)), 0.0, 20.0);
        v.decel = Param(real(0.5, 9.0));
        break;
      case BehaviorKind::cut_in:
        v.at = Param(real(0.0, 20.0));
        v.target_lane = Param(double(g_() % lanes));
        v.duration = maybe_var(Param(real(0.5, 5.0)), 0.5, 5.0);
        break;
      default: break;
    }
    return v;
  }

  FaultDecl fault() {
    FaultDecl f;
    f.kind = static_cast<FaultKind>(g_() % 4);
    switch (f.kind) {
      case FaultKind::sensor_drop:
        f.fields["rate"] = maybe_var(Param(real(0.0, 1.0)), 0.0, 1.0);
        if (coin(0.3)) f.fields["delay_sigma"] = Param(real(0.0, 0.1));
        break;
      case FaultKind::sensor_shift:
        f.fields["yaw"] = maybe_var(Param(real(-0.1, 0.1)), -0.1, 0.1);
        if (coin(0.5)) f.fields["x"] = Param(real(-1.0, 1.0));
        if (coin(0.3)) f.fields["rotation_sigma"] = Param(real(0.0, 0.05));
        break;
      case FaultKind::sensor_noise:
        f.fields["position_sigma"] = Param(real(0.0, 1.0));
        if (coin(0.5)) f.fields["yaw_sigma"] = Param(real(0.0, 0.1));
        break;
      case FaultKind::compute_bitflip: {
        static const char* nodes[] = {"perception", "planning", "control"};
        f.fields["node"] = Ident{nodes[g_() % 3], {}};
        f.fields["count"] = maybe_var(Param(double(g_() % 6)), 0.0, 0.0);
        if (coin(0.5)) {
          f.fields["mode"] = Ident{"stuck", {}};
          f.fields["value"] = Param(real(-10.0, 10.0));
        }
        if (coin(0.5)) f.fields["bit"] = Param(double(g_() % 64));
        if (coin(0.4)) {
          const double lo = double(g_() % 1000);
          f.fields["tick_min"] = Param(lo);
          f.fields["tick_max"] = Param(lo + double(g_() % 1000));
        }
        break;
      }
    }
    // Integer-valued count axes must hold integers.
    for (auto& [key, value] : f.fields) {
      const auto* p = std::get_if<Param>(&value);
      if (key != "count" || !p || !p->is_var()) continue;
      for (auto& [name, axis] : axes_) {
        if (name != p->var) continue;
        for (auto& x : axis.values) x = double(g_() % 6);
      }
    }
    return f;
  }

  std::mt19937_64 g_;
  std::vector<std::pair<std::string, SweepAxis>> axes_;
};

}  // namespace addt::testing
