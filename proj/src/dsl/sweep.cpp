#include "addt/dsl.hpp"

namespace addt::dsl {

namespace {

using Binding = std::vector<std::pair<std::string, double>>;

void bind(Param& p, const Binding& binding) {
  if (!p.is_var()) return;
  for (const auto& [name, value] : binding) {
    if (name == p.var) {
      p.value = value;
      p.var.clear();
      return;
    }
  }
}

void bind(std::optional<Param>& p, const Binding& binding) {
  if (p) bind(*p, binding);
}

void bind(VehicleDecl& v, const Binding& b) {
  bind(v.lane, b);
  bind(v.s, b);
  bind(v.speed, b);
  bind(v.length, b);
  bind(v.width, b);
  bind(v.wheelbase, b);
  bind(v.at, b);
  bind(v.decel, b);
  bind(v.target_lane, b);
  bind(v.duration, b);
}

}  // namespace

ScenarioSpec substitute(const ScenarioSpec& spec, const Binding& binding) {
  ScenarioSpec out = spec;
  bind(out.road.lanes, binding);
  bind(out.road.lane_width, binding);
  for (auto& seg : out.road.segments) {
    bind(seg.length, binding);
    bind(seg.curvature, binding);
  }
  bind(out.ego, binding);
  for (auto& a : out.agents) bind(a, binding);
  bind(out.mission.target_s, binding);
  bind(out.mission.timeout, binding);
  bind(out.mission.speed, binding);
  bind(out.mission.lane, binding);
  for (auto& f : out.faults) {
    for (auto& [key, value] : f.fields) {
      if (auto* p = std::get_if<Param>(&value)) bind(*p, binding);
    }
  }
  return out;
}

std::vector<ResolvedConfig> expand_sweeps(const ScenarioSpec& spec) {
  std::vector<Binding> bindings{{}};
  for (const auto& axis : spec.sweeps) {
    std::vector<Binding> next;
    next.reserve(bindings.size() * axis.values.size());
    for (const auto& prefix : bindings) {
      for (double v : axis.values) {
        Binding b = prefix;
        b.emplace_back(axis.var, v);
        next.push_back(std::move(b));
      }
    }
    bindings = std::move(next);
  }
  std::vector<ResolvedConfig> out;
  out.reserve(bindings.size());
  for (auto& b : bindings) {
    ResolvedConfig rc;
    rc.scenario = substitute(spec, b);
    rc.scenario.sweeps.clear();
    rc.binding = std::move(b);
    out.push_back(std::move(rc));
  }
  return out;
}

std::string binding_label(const Binding& binding) {
  std::string out;
  for (const auto& [name, value] : binding) {
    if (!out.empty()) out += ',';
    out += name + "=" + format_number(value);
  }
  return out;
}

}  // namespace addt::dsl
