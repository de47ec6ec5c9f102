#pragma once

// Scenario description language (.adt files).
//
//   scenario "name"
//   road { lanes: 2, lane_width: 3.5, segments: [[200, 0], [157.08, 0.02]] }
//   ego { lane: 0, s: 0, speed: 15 }
//   agent lead { lane: 0, s: 40, speed: 12, behavior: emergency_brake, at: 3, decel: 6 }
//   mission follow { target_s: 400, timeout: 60 }
//   fault sensor.drop { rate: $drop_rate }
//   sweep drop_rate in [0.01, 0.02, 0.05, 0.10]
//
// Blocks are brace-delimited, comma-separated `key: value` pairs; `#` starts a
// comment. Numbers may carry a unit suffix (`3.5m`, `20m/s`) which is ignored.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace addt::dsl {

struct SourcePos {
  int line = 1;
  int column = 1;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  int line = 1;
  int column = 1;
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});

/// A numeric field: either a literal or an unresolved `$var` reference.
/// Source positions do not take part in equality.
struct Param {
  double value = 0.0;
  std::string var;
  SourcePos pos;

  Param() = default;
  Param(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  static Param ref(std::string name) {
    Param p;
    p.var = std::move(name);
    return p;
  }

  bool is_var() const { return !var.empty(); }
  bool operator==(const Param& o) const { return value == o.value && var == o.var; }
};

struct SegmentDecl {
  Param length;
  Param curvature;
  bool operator==(const SegmentDecl&) const = default;
};

struct RoadDecl {
  Param lanes{1.0};
  Param lane_width{3.5};
  std::vector<SegmentDecl> segments;  // empty: one straight default segment
  SourcePos pos;

  bool operator==(const RoadDecl& o) const {
    return lanes == o.lanes && lane_width == o.lane_width && segments == o.segments;
  }
};

enum class BehaviorKind { cruise, emergency_brake, cut_in, stop };
std::string_view to_string(BehaviorKind k);

/// Ego or traffic agent. The ego never carries behavior fields.
struct VehicleDecl {
  std::string name;
  Param lane;
  Param s;
  Param speed;
  std::optional<Param> length;
  std::optional<Param> width;
  std::optional<Param> wheelbase;
  BehaviorKind behavior = BehaviorKind::cruise;
  std::optional<Param> at;
  std::optional<Param> decel;
  std::optional<Param> target_lane;
  std::optional<Param> duration;
  SourcePos pos;

  bool operator==(const VehicleDecl& o) const {
    return name == o.name && lane == o.lane && s == o.s && speed == o.speed &&
           length == o.length && width == o.width && wheelbase == o.wheelbase &&
           behavior == o.behavior && at == o.at && decel == o.decel &&
           target_lane == o.target_lane && duration == o.duration;
  }
};

enum class MissionKind { follow, turn, overtake };
std::string_view to_string(MissionKind k);

struct MissionDecl {
  MissionKind kind = MissionKind::follow;
  Param target_s;
  Param timeout;
  std::optional<Param> speed;  // cruise speed; defaults to the ego's initial speed
  std::optional<Param> lane;   // mission lane; defaults to the ego's lane
  SourcePos pos;

  bool operator==(const MissionDecl& o) const {
    return kind == o.kind && target_s == o.target_s && timeout == o.timeout &&
           speed == o.speed && lane == o.lane;
  }
};

enum class FaultKind { sensor_drop, sensor_shift, sensor_noise, compute_bitflip };
std::string_view to_string(FaultKind k);  // "sensor.drop", ...

/// Identifier-valued field (node names, modes, state names).
struct Ident {
  std::string name;
  SourcePos pos;
  bool operator==(const Ident& o) const { return name == o.name; }
};

using FieldValue = std::variant<Param, Ident>;

struct FaultDecl {
  FaultKind kind = FaultKind::sensor_drop;
  std::map<std::string, FieldValue> fields;
  SourcePos pos;

  std::optional<Param> param(const std::string& key) const;
  std::optional<std::string> ident(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;

  bool operator==(const FaultDecl& o) const { return kind == o.kind && fields == o.fields; }
};

struct SweepAxis {
  std::string var;
  std::vector<double> values;
  SourcePos pos;

  bool operator==(const SweepAxis& o) const { return var == o.var && values == o.values; }
};

struct ScenarioSpec {
  std::string name;
  RoadDecl road;
  VehicleDecl ego;
  std::vector<VehicleDecl> agents;
  MissionDecl mission;
  std::vector<FaultDecl> faults;
  std::vector<SweepAxis> sweeps;
  SourcePos pos;

  bool operator==(const ScenarioSpec& o) const {
    return name == o.name && road == o.road && ego == o.ego && agents == o.agents &&
           mission == o.mission && faults == o.faults && sweeps == o.sweeps;
  }
};

/// A sweep point: every `$var` substituted, sweep axes removed.
struct ResolvedConfig {
  ScenarioSpec scenario;
  std::vector<std::pair<std::string, double>> binding;  // in axis order
};

struct ParseResult {
  std::optional<ScenarioSpec> spec;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return spec.has_value(); }
  bool has_errors() const;
};

/// Parse and validate. On any error diagnostic `spec` is empty.
ParseResult parse_scenario(std::string_view text);

/// Invariant checks; warnings for suspicious but legal values.
std::vector<Diagnostic> validate(const ScenarioSpec& spec);

/// Cartesian product of the sweep axes, first axis outermost.
std::vector<ResolvedConfig> expand_sweeps(const ScenarioSpec& spec);

/// Substitute one binding. Unbound references are left in place.
ScenarioSpec substitute(const ScenarioSpec& spec,
                        const std::vector<std::pair<std::string, double>>& binding);

/// Canonical text: fixed block and key order, LF line endings, two-space indent.
std::string serialize(const ScenarioSpec& spec);

/// Shortest round-trip decimal form used by the serializer.
std::string format_number(double v);

/// "drop_rate=0.05,count=5" (empty for no sweeps).
std::string binding_label(const std::vector<std::pair<std::string, double>>& binding);

inline constexpr double kSpeedWarningThreshold = 60.0;
inline constexpr double kDefaultRoadLength = 1000.0;

}  // namespace addt::dsl
