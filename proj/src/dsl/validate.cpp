#include <cmath>
#include <functional>
#include <set>
#include <tuple>

#include "addt/angles.hpp"
#include "addt/dsl.hpp"

namespace addt::dsl {

namespace {

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

class Checker {
 public:
  explicit Checker(std::vector<Diagnostic>& out, std::string suffix = {})
      : out_(out), suffix_(std::move(suffix)) {}

  void error(SourcePos pos, const std::string& msg) { add(Severity::error, pos, msg); }
  void warning(SourcePos pos, const std::string& msg) { add(Severity::warning, pos, msg); }

  void check(const ScenarioSpec& spec) {
    road(spec.road);
    const int lanes = bound_lanes(spec.road);
    const double length = total_length(spec.road);
    vehicle(spec.ego, lanes, length, true);
    std::set<std::string> names;
    for (const auto& a : spec.agents) {
      if (!names.insert(a.name).second || a.name == "ego") {
        error(a.pos, "duplicate agent name '" + a.name + "'");
      }
      vehicle(a, lanes, length, false);
    }
    mission(spec.mission, lanes, length);
    for (const auto& f : spec.faults) fault(f);
  }

 private:
  void add(Severity sev, SourcePos pos, const std::string& msg) {
    out_.push_back({sev, pos.line, pos.column, msg + suffix_});
  }

  static int bound_lanes(const RoadDecl& r) {
    if (r.lanes.is_var() || !is_integer(r.lanes.value) || r.lanes.value < 1) return -1;
    return static_cast<int>(r.lanes.value);
  }

  static double total_length(const RoadDecl& r) {
    if (r.segments.empty()) return kDefaultRoadLength;
    double total = 0.0;
    for (const auto& s : r.segments) {
      if (s.length.is_var()) return -1.0;
      total += s.length.value;
    }
    return total;
  }

  void road(const RoadDecl& r) {
    if (!r.lanes.is_var()) {
      if (!is_integer(r.lanes.value)) {
        error(r.lanes.pos, "lane_count must be an integer (got " + format_number(r.lanes.value) + ")");
      } else if (r.lanes.value < 1) {
        error(r.lanes.pos, "lane_count ≥ 1 required (got " + format_number(r.lanes.value) + ")");
      }
    }
    if (!r.lane_width.is_var() && !(r.lane_width.value > 0.0)) {
      error(r.lane_width.pos, "lane_width > 0 required (got " + format_number(r.lane_width.value) + ")");
    }
    for (const auto& s : r.segments) {
      if (!s.length.is_var() && !(s.length.value > 0.0)) {
        error(s.length.pos, "segment length > 0 required");
      }
      if (s.curvature.is_var() || r.lane_width.is_var()) continue;
      const double k = std::fabs(s.curvature.value);
      if (k * r.lane_width.value >= 1.0) {
        error(s.curvature.pos, "|curvature| · lane_width < 1 required");
      } else if (!r.lanes.is_var() && k * (r.lanes.value - 0.5) * r.lane_width.value >= 1.0) {
        error(s.curvature.pos, "curvature too large: inner road edge self-intersects");
      }
      if (!s.length.is_var() && k * s.length.value > kTwoPi) {
        error(s.curvature.pos, "arc segment turns more than a full circle");
      }
    }
  }

  void lane_index(const Param& p, int lanes, const std::string& what) {
    if (p.is_var()) return;
    if (!is_integer(p.value) || p.value < 0) {
      error(p.pos, what + " must be a non-negative integer");
    } else if (lanes > 0 && p.value >= lanes) {
      error(p.pos, what + " " + format_number(p.value) + " out of range: must be < lane_count " +
                       std::to_string(lanes));
    }
  }

  void positive(const std::optional<Param>& p, const std::string& what) {
    if (p && !p->is_var() && !(p->value > 0.0)) error(p->pos, what + " > 0 required");
  }

  void vehicle(const VehicleDecl& v, int lanes, double road_length, bool is_ego) {
    const std::string who = is_ego ? "ego" : "agent '" + v.name + "'";
    lane_index(v.lane, lanes, who + " lane");
    if (!v.s.is_var()) {
      if (v.s.value < 0.0 || (road_length > 0.0 && v.s.value > road_length)) {
        error(v.s.pos, who + " s must lie on the road [0, " + format_number(road_length) + "]");
      }
    }
    if (!v.speed.is_var()) {
      if (v.speed.value < 0.0) {
        error(v.speed.pos, who + " speed ≥ 0 required");
      } else if (v.speed.value > kSpeedWarningThreshold) {
        warning(v.speed.pos, who + " speed " + format_number(v.speed.value) +
                                 " m/s exceeds " + format_number(kSpeedWarningThreshold) + " m/s");
      }
    }
    positive(v.length, who + " length");
    positive(v.width, who + " width");
    positive(v.wheelbase, who + " wheelbase");
    if (is_ego) return;

    const auto need = [&](const std::optional<Param>& p, const std::string& key) {
      if (!p) error(v.pos, who + " behavior " + std::string(to_string(v.behavior)) +
                               " requires '" + key + "'");
    };
    const auto unused = [&](const std::optional<Param>& p, const std::string& key) {
      if (p) warning(p->pos, "'" + key + "' ignored for behavior " +
                                 std::string(to_string(v.behavior)));
    };
    switch (v.behavior) {
      case BehaviorKind::cruise:
      case BehaviorKind::stop:
        unused(v.at, "at");
        unused(v.decel, "decel");
        unused(v.target_lane, "target_lane");
        unused(v.duration, "duration");
        break;
      case BehaviorKind::emergency_brake:
        need(v.at, "at");
        need(v.decel, "decel");
        unused(v.target_lane, "target_lane");
        unused(v.duration, "duration");
        break;
      case BehaviorKind::cut_in:
        need(v.at, "at");
        need(v.target_lane, "target_lane");
        need(v.duration, "duration");
        unused(v.decel, "decel");
        if (v.target_lane) lane_index(*v.target_lane, lanes, who + " target_lane");
        positive(v.duration, who + " duration");
        break;
    }
    if (v.at && !v.at->is_var() && v.at->value < 0.0) error(v.at->pos, who + " at ≥ 0 required");
    positive(v.decel, who + " decel");
  }

  void mission(const MissionDecl& m, int lanes, double road_length) {
    if (!m.timeout.is_var() && !(m.timeout.value > 0.0)) {
      error(m.timeout.pos, "timeout > 0 required (got " + format_number(m.timeout.value) + ")");
    }
    if (!m.target_s.is_var()) {
      if (!(m.target_s.value > 0.0)) {
        error(m.target_s.pos, "target_s > 0 required");
      } else if (road_length > 0.0 && m.target_s.value > road_length) {
        error(m.target_s.pos, "target_s beyond road end (" + format_number(road_length) + " m)");
      }
    }
    if (m.speed && !m.speed->is_var()) {
      if (m.speed->value < 0.0) {
        error(m.speed->pos, "mission speed ≥ 0 required");
      } else if (m.speed->value > kSpeedWarningThreshold) {
        warning(m.speed->pos, "mission speed " + format_number(m.speed->value) + " m/s exceeds " +
                                  format_number(kSpeedWarningThreshold) + " m/s");
      }
    }
    if (m.lane) lane_index(*m.lane, lanes, "mission lane");
  }

  void non_negative(const FaultDecl& f, const std::string& key) {
    const auto p = f.param(key);
    if (p && !p->is_var() && !(p->value >= 0.0)) error(p->pos, key + " ≥ 0 required");
  }

  void non_negative_integer(const FaultDecl& f, const std::string& key) {
    const auto p = f.param(key);
    if (p && !p->is_var() && (!is_integer(p->value) || p->value < 0.0)) {
      error(p->pos, key + " must be a non-negative integer");
    }
  }

  void fault(const FaultDecl& f) {
    switch (f.kind) {
      case FaultKind::sensor_drop: {
        const auto rate = f.param("rate");
        if (rate && !rate->is_var() && !(rate->value >= 0.0 && rate->value <= 1.0)) {
          error(rate->pos, "drop rate must lie in [0, 1]");
        }
        non_negative(f, "delay_sigma");
        break;
      }
      case FaultKind::sensor_shift:
        non_negative(f, "translation_sigma");
        non_negative(f, "rotation_sigma");
        break;
      case FaultKind::sensor_noise:
        non_negative(f, "position_sigma");
        non_negative(f, "yaw_sigma");
        break;
      case FaultKind::compute_bitflip: {
        non_negative_integer(f, "count");
        non_negative_integer(f, "tick");
        non_negative_integer(f, "tick_min");
        non_negative_integer(f, "tick_max");
        if (const auto bit = f.param("bit"); bit && !bit->is_var()) {
          if (!is_integer(bit->value) || bit->value < 0 || bit->value > 63) {
            error(bit->pos, "bit must be an integer in [0, 63]");
          }
        }
        if (const auto st = f.param("state"); st && !st->is_var()) {
          if (!is_integer(st->value) || st->value < 0) {
            error(st->pos, "state index must be a non-negative integer");
          }
        }
        const auto lo = f.param("tick_min");
        const auto hi = f.param("tick_max");
        if (lo && hi && !lo->is_var() && !hi->is_var() && lo->value > hi->value) {
          error(lo->pos, "tick_min must not exceed tick_max");
        }
        if (f.ident("mode").value_or("flip") == "stuck" && !f.param("value")) {
          error(f.pos, "stuck mode requires 'value'");
        }
        break;
      }
    }
  }

  std::vector<Diagnostic>& out_;
  std::string suffix_;
};

void for_each_param(const ScenarioSpec& spec, const std::function<void(const Param&)>& fn) {
  const auto opt = [&](const std::optional<Param>& p) {
    if (p) fn(*p);
  };
  const auto vehicle = [&](const VehicleDecl& v) {
    fn(v.lane);
    fn(v.s);
    fn(v.speed);
    opt(v.length);
    opt(v.width);
    opt(v.wheelbase);
    opt(v.at);
    opt(v.decel);
    opt(v.target_lane);
    opt(v.duration);
  };
  fn(spec.road.lanes);
  fn(spec.road.lane_width);
  for (const auto& s : spec.road.segments) {
    fn(s.length);
    fn(s.curvature);
  }
  vehicle(spec.ego);
  for (const auto& a : spec.agents) vehicle(a);
  fn(spec.mission.target_s);
  fn(spec.mission.timeout);
  opt(spec.mission.speed);
  opt(spec.mission.lane);
  for (const auto& f : spec.faults) {
    for (const auto& [key, value] : f.fields) {
      if (const auto* p = std::get_if<Param>(&value)) fn(*p);
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const ScenarioSpec& spec) {
  std::vector<Diagnostic> out;
  Checker(out).check(spec);

  std::set<std::string> declared;
  bool sweeps_ok = true;
  for (const auto& axis : spec.sweeps) {
    if (!declared.insert(axis.var).second) {
      out.push_back({Severity::error, axis.pos.line, axis.pos.column,
                     "duplicate sweep variable '" + axis.var + "'"});
      sweeps_ok = false;
    }
    if (axis.values.empty()) {
      out.push_back({Severity::error, axis.pos.line, axis.pos.column,
                     "sweep axis '" + axis.var + "' has no values"});
      sweeps_ok = false;
    }
  }
  std::set<std::string> used;
  for_each_param(spec, [&](const Param& p) {
    if (!p.is_var()) return;
    used.insert(p.var);
    if (!declared.count(p.var)) {
      out.push_back({Severity::error, p.pos.line, p.pos.column,
                     "undeclared sweep variable '$" + p.var + "'"});
      sweeps_ok = false;
    }
  });
  for (const auto& axis : spec.sweeps) {
    if (!used.count(axis.var)) {
      out.push_back({Severity::warning, axis.pos.line, axis.pos.column,
                     "sweep variable '" + axis.var + "' is never referenced"});
    }
  }

  // Value constraints on swept fields are checked per sweep point.
  if (sweeps_ok && !spec.sweeps.empty()) {
    std::set<std::tuple<int, int, std::string>> seen;
    for (const auto& d : out) seen.emplace(d.line, d.column, d.message);
    for (const auto& rc : expand_sweeps(spec)) {
      std::vector<Diagnostic> point;
      Checker(point, " (with " + binding_label(rc.binding) + ")").check(rc.scenario);
      for (auto& d : point) {
        // Diagnostics already reported for the unswept spec repeat verbatim
        // minus the suffix; only keep those that the binding introduced.
        const std::string base = d.message.substr(0, d.message.rfind(" (with "));
        if (seen.count({d.line, d.column, base})) continue;
        if (seen.emplace(d.line, d.column, d.message).second) out.push_back(std::move(d));
      }
    }
  }
  return out;
}

}  // namespace addt::dsl
