#include <charconv>
#include <sstream>

#include "addt/dsl.hpp"
#include "schema.hpp"

namespace addt::dsl {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string param_text(const Param& p) { return p.is_var() ? "$" + p.var : format_number(p.value); }

class BlockWriter {
 public:
  explicit BlockWriter(std::ostringstream& os, std::string header) : os_(os) {
    os_ << header << " {";
  }
  ~BlockWriter() { os_ << (first_ ? "}\n" : "\n}\n"); }

  void field(const std::string& key, const std::string& value) {
    os_ << (first_ ? "\n" : ",\n") << "  " << key << ": " << value;
    first_ = false;
  }
  void field(const std::string& key, const Param& p) { field(key, param_text(p)); }
  void field(const std::string& key, const std::optional<Param>& p) {
    if (p) field(key, *p);
  }

 private:
  std::ostringstream& os_;
  bool first_ = true;
};

void write_vehicle(std::ostringstream& os, const VehicleDecl& v, bool is_ego) {
  BlockWriter w(os, is_ego ? "ego" : "agent " + v.name);
  w.field("lane", v.lane);
  w.field("s", v.s);
  w.field("speed", v.speed);
  w.field("length", v.length);
  w.field("width", v.width);
  w.field("wheelbase", v.wheelbase);
  if (!is_ego) {
    w.field("behavior", std::string(to_string(v.behavior)));
    w.field("at", v.at);
    w.field("decel", v.decel);
    w.field("target_lane", v.target_lane);
    w.field("duration", v.duration);
  }
}

}  // namespace

std::string serialize(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "scenario " << quote(spec.name) << "\n\n";
  {
    BlockWriter w(os, "road");
    w.field("lanes", spec.road.lanes);
    w.field("lane_width", spec.road.lane_width);
    if (!spec.road.segments.empty()) {
      std::string segs = "[";
      for (std::size_t i = 0; i < spec.road.segments.size(); ++i) {
        if (i) segs += ", ";
        segs += "[" + param_text(spec.road.segments[i].length) + ", " +
                param_text(spec.road.segments[i].curvature) + "]";
      }
      segs += "]";
      w.field("segments", segs);
    }
  }
  os << '\n';
  write_vehicle(os, spec.ego, true);
  for (const auto& a : spec.agents) {
    os << '\n';
    write_vehicle(os, a, false);
  }
  os << '\n';
  {
    BlockWriter w(os, "mission " + std::string(to_string(spec.mission.kind)));
    w.field("target_s", spec.mission.target_s);
    w.field("timeout", spec.mission.timeout);
    w.field("speed", spec.mission.speed);
    w.field("lane", spec.mission.lane);
  }
  for (const auto& f : spec.faults) {
    os << '\n';
    BlockWriter w(os, "fault " + std::string(to_string(f.kind)));
    for (const auto& field : detail::fault_schema(f.kind).fields) {
      const auto it = f.fields.find(field.key);
      if (it == f.fields.end()) continue;
      if (const auto* p = std::get_if<Param>(&it->second)) {
        w.field(field.key, *p);
      } else {
        w.field(field.key, std::get<Ident>(it->second).name);
      }
    }
  }
  if (!spec.sweeps.empty()) os << '\n';
  for (const auto& axis : spec.sweeps) {
    os << "sweep " << axis.var << " in [";
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
      if (i) os << ", ";
      os << format_number(axis.values[i]);
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace addt::dsl
