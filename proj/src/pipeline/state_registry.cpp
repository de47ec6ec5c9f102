#include <stdexcept>

#include "addt/state.hpp"
#include "json.hpp"

namespace addt::pipeline {

std::string_view to_string(NodeId node) {
  switch (node) {
    case NodeId::perception: return "perception";
    case NodeId::planning: return "planning";
    case NodeId::control: return "control";
  }
  return "?";
}

std::optional<NodeId> node_from_string(std::string_view s) {
  for (NodeId n : kNodes) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

std::string_view hardware_of(NodeId node) {
  return node == NodeId::perception ? "gpu" : "cpu";
}

std::size_t NodeState::add(std::string name, double initial) {
  if (index_of(name)) throw std::logic_error("duplicate state name: " + name);
  names_.push_back(std::move(name));
  values_.push_back(initial);
  return values_.size() - 1;
}

std::optional<std::size_t> NodeState::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Manifest::count(NodeId node) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.node == node;
  return n;
}

std::optional<std::size_t> Manifest::index_of(NodeId node, std::string_view name) const {
  for (const auto& e : entries) {
    if (e.node == node && e.name == name) return e.index;
  }
  return std::nullopt;
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (NodeId n : kNodes) {
    nlohmann::ordered_json state = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
      if (e.node == n) state.push_back({{"index", e.index}, {"name", e.name}});
    }
    nodes.push_back({{"node", to_string(n)}, {"hardware", hardware_of(n)}, {"state", state}});
  }
  return nlohmann::ordered_json{{"nodes", nodes}}.dump(2) + "\n";
}

}  // namespace addt::pipeline
