#include "addt/pipeline.hpp"

namespace addt::pipeline {

Pipeline::Pipeline(const sim::RoadModel& road, const PipelineConfig& cfg)
    : perception_(cfg.perception), planner_(road, cfg.planning), control_(road, cfg.control) {}

Pipeline::TickReport Pipeline::tick(long tick, std::span<const sensor::EgoDetection> detections,
                                    const sim::VehicleState& ego) {
  TickReport r;
  const double t = static_cast<double>(tick) * kControlPeriod;
  if (perception_due(tick)) {
    perception_.step(detections, ego, kPerceptionPeriod);
    ++perception_runs_;
    r.perception_ran = true;
    const auto tracks = perception_.tracks();
    planner_.step(tracks, ego, t);
    ++planning_runs_;
    r.planning_ran = true;
  }
  control_.step(planner_.trajectory(), ego, t, kControlPeriod);
  ++control_runs_;
  return r;
}

NodeState& Pipeline::node(NodeId n) {
  switch (n) {
    case NodeId::perception: return perception_.state();
    case NodeId::planning: return planner_.state();
    case NodeId::control: break;
  }
  return control_.state();
}

const NodeState& Pipeline::node(NodeId n) const {
  return const_cast<Pipeline*>(this)->node(n);
}

Manifest Pipeline::manifest() const {
  Manifest m;
  for (NodeId n : kNodes) {
    const NodeState& s = node(n);
    for (std::size_t i = 0; i < s.size(); ++i) m.entries.push_back({n, i, s.name(i)});
  }
  return m;
}

}  // namespace addt::pipeline
