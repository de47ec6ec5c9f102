#pragma once

// Key tables for every block kind. Field order here is the canonical
// serialization order.

#include <optional>
#include <string>
#include <vector>

#include "addt/dsl.hpp"

namespace addt::dsl::detail {

enum class FieldType { number, identifier, identifier_or_number };

struct FieldSchema {
  std::string key;
  FieldType type = FieldType::number;
  bool required = false;
  std::vector<std::string> allowed;  // identifier fields only; empty = any
};

struct BlockSchema {
  std::vector<FieldSchema> fields;

  const FieldSchema* find(const std::string& key) const {
    for (const auto& f : fields) {
      if (f.key == key) return &f;
    }
    return nullptr;
  }
};

inline const std::vector<std::string>& behavior_names() {
  static const std::vector<std::string> v = {"cruise", "emergency_brake", "cut_in", "stop"};
  return v;
}

inline std::optional<BehaviorKind> behavior_from(const std::string& s) {
  for (auto k : {BehaviorKind::cruise, BehaviorKind::emergency_brake, BehaviorKind::cut_in,
                 BehaviorKind::stop}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline std::optional<MissionKind> mission_from(const std::string& s) {
  for (auto k : {MissionKind::follow, MissionKind::turn, MissionKind::overtake}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline std::optional<FaultKind> fault_from(const std::string& s) {
  for (auto k : {FaultKind::sensor_drop, FaultKind::sensor_shift, FaultKind::sensor_noise,
                 FaultKind::compute_bitflip}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline const BlockSchema& road_schema() {
  static const BlockSchema s{{
      {"lanes", FieldType::number, true, {}},
      {"lane_width", FieldType::number, true, {}},
      {"segments", FieldType::number, false, {}},  // list; handled specially
  }};
  return s;
}

inline const BlockSchema& ego_schema() {
  static const BlockSchema s{{
      {"lane", FieldType::number, true, {}},
      {"s", FieldType::number, true, {}},
      {"speed", FieldType::number, true, {}},
      {"length", FieldType::number, false, {}},
      {"width", FieldType::number, false, {}},
      {"wheelbase", FieldType::number, false, {}},
  }};
  return s;
}

inline const BlockSchema& agent_schema() {
  static const BlockSchema s{{
      {"lane", FieldType::number, true, {}},
      {"s", FieldType::number, true, {}},
      {"speed", FieldType::number, true, {}},
      {"length", FieldType::number, false, {}},
      {"width", FieldType::number, false, {}},
      {"wheelbase", FieldType::number, false, {}},
      {"behavior", FieldType::identifier, false, behavior_names()},
      {"at", FieldType::number, false, {}},
      {"decel", FieldType::number, false, {}},
      {"target_lane", FieldType::number, false, {}},
      {"duration", FieldType::number, false, {}},
  }};
  return s;
}

inline const BlockSchema& mission_schema() {
  static const BlockSchema s{{
      {"target_s", FieldType::number, true, {}},
      {"timeout", FieldType::number, true, {}},
      {"speed", FieldType::number, false, {}},
      {"lane", FieldType::number, false, {}},
  }};
  return s;
}

inline const BlockSchema& fault_schema(FaultKind kind) {
  static const BlockSchema drop{{
      {"rate", FieldType::number, true, {}},
      {"delay_sigma", FieldType::number, false, {}},
  }};
  static const BlockSchema shift{{
      {"x", FieldType::number, false, {}},
      {"y", FieldType::number, false, {}},
      {"z", FieldType::number, false, {}},
      {"yaw", FieldType::number, false, {}},
      {"pitch", FieldType::number, false, {}},
      {"roll", FieldType::number, false, {}},
      {"translation_sigma", FieldType::number, false, {}},
      {"rotation_sigma", FieldType::number, false, {}},
  }};
  static const BlockSchema noise{{
      {"position_sigma", FieldType::number, false, {}},
      {"yaw_sigma", FieldType::number, false, {}},
  }};
  static const BlockSchema bitflip{{
      {"node", FieldType::identifier, true, {"perception", "planning", "control"}},
      {"count", FieldType::number, false, {}},
      {"mode", FieldType::identifier, false, {"flip", "stuck"}},
      {"value", FieldType::number, false, {}},
      {"state", FieldType::identifier_or_number, false, {}},
      {"bit", FieldType::number, false, {}},
      {"tick", FieldType::number, false, {}},
      {"tick_min", FieldType::number, false, {}},
      {"tick_max", FieldType::number, false, {}},
  }};
  switch (kind) {
    case FaultKind::sensor_drop: return drop;
    case FaultKind::sensor_shift: return shift;
    case FaultKind::sensor_noise: return noise;
    case FaultKind::compute_bitflip: return bitflip;
  }
  return drop;
}

}  // namespace addt::dsl::detail
