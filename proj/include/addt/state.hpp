#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace addt::pipeline {

enum class NodeId : std::size_t { perception = 0, planning = 1, control = 2 };
inline constexpr std::size_t kNodeCount = 3;
inline constexpr std::array<NodeId, kNodeCount> kNodes{NodeId::perception, NodeId::planning,
                                                       NodeId::control};

std::string_view to_string(NodeId node);
std::optional<NodeId> node_from_string(std::string_view s);

/// Hardware the node's state is taken to live on (metadata only).
std::string_view hardware_of(NodeId node);

/// A node's registered state: named binary64 scalars at fixed indices. Node
/// code reads and writes its working values through this vector, so a fault
/// written here is what the next execution sees.
class NodeState {
 public:
  std::size_t add(std::string name, double initial = 0.0);

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  const std::string& name(std::size_t i) const { return names_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

struct ManifestEntry {
  NodeId node = NodeId::perception;
  std::size_t index = 0;
  std::string name;
};

/// Address space of every registered scalar across all nodes.
class Manifest {
 public:
  std::vector<ManifestEntry> entries;

  std::size_t count(NodeId node) const;
  bool contains(NodeId node, std::size_t index) const { return index < count(node); }
  std::optional<std::size_t> index_of(NodeId node, std::string_view name) const;

  /// {"nodes": [{"node", "hardware", "state": [{"index", "name"}, ...]}]}
  std::string to_json() const;
};

}  // namespace addt::pipeline
