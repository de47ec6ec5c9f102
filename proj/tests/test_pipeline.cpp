#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "addt/campaign.hpp"
#include "addt/pipeline.hpp"

using namespace addt;
using namespace addt::pipeline;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

dsl::ResolvedConfig load(const std::string& name) {
  const auto r = dsl::parse_scenario(read_file(std::filesystem::path(ADDT_SCENARIO_DIR) / name));
  REQUIRE(r.ok());
  return expand_sweeps(*r.spec).front();
}

sensor::EgoDetection det(int id, double x, double y) {
  return {id, x, y, 0.0, std::hypot(x, y)};
}

TrackedObject track(double x, double y, double vx, int hits = 5) {
  TrackedObject t;
  t.id = 1;
  t.x = x;
  t.y = y;
  t.vx = vx;
  t.hits = hits;
  return t;
}

sim::VehicleState ego_at(double x, double y, double speed) {
  sim::VehicleState v;
  v.x = x;
  v.y = y;
  v.speed = speed;
  return v;
}

const Candidate& chosen(const Planner& p, const Trajectory& t) {
  const auto& cs = p.candidates();
  for (const auto& c : cs) {
    if (c.target_d == t.target_d && static_cast<int>(c.profile) == t.profile && c.cost == t.cost) return c;
  }
  FAIL("chosen trajectory not among candidates");
  return cs.front();
}

}  // namespace

TEST_CASE("perception creates, updates and deletes tracks") {
  Perception p;
  const auto ego = ego_at(0, 0, 0);
  const std::vector<sensor::EgoDetection> first{det(1, 20.0, 0.0)};
  p.step(first, ego, kPerceptionPeriod);
  auto tracks = p.tracks();
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].age == 0);
  CHECK(tracks[0].x == 20.0);

  const std::vector<sensor::EgoDetection> second{det(1, 21.0, 0.0)};
  p.step(second, ego, kPerceptionPeriod);
  tracks = p.tracks();
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].vx == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(tracks[0].hits == 2);

  // Stale limit 3: survives three empty cycles, gone on the fourth.
  for (int k = 0; k < 3; ++k) {
    p.step({}, ego, kPerceptionPeriod);
    REQUIRE(p.tracks().size() == 1);
  }
  p.step({}, ego, kPerceptionPeriod);
  CHECK(p.tracks().empty());
}

TEST_CASE("perception places detections in the world frame") {
  Perception p;
  sim::VehicleState ego = ego_at(100.0, 5.0, 10.0);
  ego.yaw = kPi / 2;
  const std::vector<sensor::EgoDetection> d{det(1, 10.0, 0.0)};
  p.step(d, ego, kPerceptionPeriod);
  const auto t = p.tracks();
  REQUIRE(t.size() == 1);
  CHECK(t[0].x == doctest::Approx(100.0));
  CHECK(t[0].y == doctest::Approx(15.0));
}

TEST_CASE("perception ignores detections beyond the range gate") {
  PerceptionParams pp;
  pp.range_gate = 50.0;
  Perception p(pp);
  const std::vector<sensor::EgoDetection> d{det(1, 60.0, 0.0), det(2, 40.0, 0.0)};
  p.step(d, ego_at(0, 0, 0), kPerceptionPeriod);
  const auto t = p.tracks();
  REQUIRE(t.size() == 1);
  CHECK(t[0].x == 40.0);
}

TEST_CASE("planner: unobstructed mission lane") {
  const sim::RoadModel road(2, 3.5, {{500.0, 0.0}});
  PlannerParams pp;
  pp.v_cruise = 15.0;
  Planner planner(road, pp);
  const auto t = planner.step({}, ego_at(10.0, 0.0, 15.0), 0.0);
  CHECK(t.valid);
  CHECK(t.target_d == 0.0);
  CHECK(t.profile == static_cast<int>(SpeedProfile::hold));
}

TEST_CASE("planner: stopped object close ahead forces a slowing profile") {
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  PlannerParams pp;
  pp.v_cruise = 15.0;
  Planner planner(road, pp);
  const std::vector<TrackedObject> tracks{track(20.0, 0.0, 0.0)};
  const auto t = planner.step(tracks, ego_at(10.0, 0.0, 0.0), 0.0);
  REQUIRE(t.valid);
  CHECK(t.profile != static_cast<int>(SpeedProfile::hold));
  // Argmin by enumeration: the chosen cost is the first strict minimum.
  const auto& cs = planner.candidates();
  const auto best = std::min_element(cs.begin(), cs.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  CHECK(best->cost == t.cost);
  CHECK(chosen(planner, t).risk < std::numeric_limits<double>::infinity());
  for (const auto& c : cs) {
    if (c.profile == SpeedProfile::hold) CHECK(c.risk == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("planner: overtake into the free adjacent lane") {
  const sim::RoadModel road(2, 3.5, {{800.0, 0.0}});
  PlannerParams pp;
  pp.v_cruise = 20.0;
  Planner planner(road, pp);
  const std::vector<TrackedObject> tracks{track(40.0, 0.0, 10.0)};
  const auto t = planner.step(tracks, ego_at(10.0, 0.0, 20.0), 0.0);
  REQUIRE(t.valid);
  CHECK(t.target_d == doctest::Approx(3.5));
  // Five offsets around lane 0, only 0, W/2 and W are on the road.
  std::set<double> targets;
  for (const auto& c : planner.candidates()) targets.insert(c.target_d);
  CHECK(targets == std::set<double>{0.0, 1.75, 3.5});
  CHECK(planner.candidates().size() == 9);
}

TEST_CASE("planner: unconfirmed tracks are ignored") {
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  Planner planner(road, {});
  const std::vector<TrackedObject> tracks{track(20.0, 0.0, 0.0, 1)};
  const auto t = planner.step(tracks, ego_at(10.0, 0.0, 15.0), 0.0);
  CHECK(t.profile == static_cast<int>(SpeedProfile::hold));
}

TEST_CASE("planner: no feasible candidate yields an invalid trajectory") {
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  Planner planner(road, {});
  // Object overlapping the ego now: every candidate intersects at tau = 0.
  const std::vector<TrackedObject> tracks{track(12.0, 0.0, 0.0)};
  const auto t = planner.step(tracks, ego_at(10.0, 0.0, 15.0), 0.0);
  CHECK_FALSE(t.valid);

  Controller ctl(road, {});
  const auto cmd = ctl.step(t, ego_at(10.0, 0.0, 15.0), 0.0, kControlPeriod);
  CHECK(cmd.steer == 0.0);
  CHECK(cmd.accel == -kMaxAccelCmd);
}

TEST_CASE("planner argmin is invariant under rescaling the cost weights") {
  const sim::RoadModel road(3, 3.5, {{1000.0, 0.0}});
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> s(0.0, 80.0), d(-0.5, 7.5), v(0.0, 25.0);
  int lane_changes = 0;
  for (int i = 0; i < 300; ++i) {
    std::vector<TrackedObject> tracks;
    const int n = static_cast<int>(g() % 4);
    for (int k = 0; k < n; ++k) tracks.push_back(track(20.0 + s(g), d(g), v(g)));
    const auto ego = ego_at(20.0, std::clamp(d(g), 0.0, 7.0), v(g));
    PlannerParams base;
    base.v_cruise = 20.0;
    base.d_mission = 3.5 * static_cast<double>(g() % 3);
    const auto ref = Planner(road, base).step(tracks, ego, 0.0);
    lane_changes += ref.target_d != std::round(ego.y / 3.5) * 3.5;
    for (double c : {0.25, 2.0, 8.0, 1024.0}) {
      PlannerParams scaled = base;
      scaled.w_col *= c;
      scaled.w_lane *= c;
      scaled.w_prog *= c;
      const auto t = Planner(road, scaled).step(tracks, ego, 0.0);
      REQUIRE(t.valid == ref.valid);
      CHECK(t.target_d == ref.target_d);
      CHECK(t.profile == ref.profile);
    }
  }
  CHECK(lane_changes > 0);
}

TEST_CASE("controller examples") {
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  Trajectory traj;
  traj.valid = true;
  traj.v.fill(12.0);
  Controller ctl(road, {});
  const auto cmd = ctl.step(traj, ego_at(50.0, 0.0, 12.0), 0.0, kControlPeriod);
  CHECK(std::fabs(cmd.steer) < 1e-9);
  CHECK(std::fabs(cmd.accel) < 1e-9);

  ControlGains p_only;
  p_only.ki_v = 0.0;
  p_only.kd_v = 0.0;
  p_only.k_ff = 0.0;
  Controller pc(road, p_only);
  const auto a = pc.step(traj, ego_at(50.0, 0.0, 10.0), 0.0, kControlPeriod);
  CHECK(a.accel == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("controller output bounds and purity") {
  const sim::RoadModel road(2, 3.5, {{500.0, 0.02}});
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    Trajectory traj;
    traj.valid = true;
    traj.target_d = 3.5 * (u(g) > 0);
    traj.start_d = 3.5 * u(g);
    for (auto& x : traj.v) x = 15.0 + 15.0 * u(g);
    sim::VehicleState ego = ego_at(20.0 * u(g), 20.0 * u(g), 10.0 + 10.0 * u(g));
    ego.yaw = u(g);
    Controller a(road, {}), b(road, {});
    for (int k = 0; k < 5; ++k) {
      const auto ca = a.step(traj, ego, k * kControlPeriod, kControlPeriod);
      const auto cb = b.step(traj, ego, k * kControlPeriod, kControlPeriod);
      CHECK(std::fabs(ca.steer) <= kMaxSteerCmd);
      CHECK(std::fabs(ca.accel) <= kMaxAccelCmd);
      CHECK(std::memcmp(&ca.steer, &cb.steer, sizeof(double)) == 0);
      CHECK(std::memcmp(&ca.accel, &cb.accel, sizeof(double)) == 0);
    }
    CHECK(a.state().values() == b.state().values());
  }
}

TEST_CASE("tick scheduling: 10 Hz perception, 100 Hz control") {
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  Pipeline p(road, {});
  const auto ego = ego_at(0, 0, 10);
  for (long k = 0; k < 100; ++k) {
    const auto r = p.tick(k, {}, ego);
    CHECK(r.perception_ran == (k % 10 == 0));
  }
  CHECK(p.perception_runs() == 10);
  CHECK(p.planning_runs() == 10);
  CHECK(p.control_runs() == 100);
}

TEST_CASE("all frames dropped: the planner ends up with no tracks") {
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  Pipeline p(road, {});
  const auto ego = ego_at(0, 0, 10);
  const std::vector<sensor::EgoDetection> seen{det(1, 30.0, 0.0)};
  p.tick(0, seen, ego);
  p.tick(10, seen, ego);
  REQUIRE(p.perception().tracks().size() == 1);
  long k = 20;
  for (int cycle = 0; cycle < 4; ++cycle, k += 10) p.tick(k, {}, ego);
  CHECK(p.perception().tracks().empty());
  CHECK(p.planner().trajectory().profile == static_cast<int>(SpeedProfile::hold));
}

TEST_CASE("state manifest audit") {
  const auto cfg = load("overtake.adt");
  const Manifest m = campaign::scenario_manifest(cfg.scenario);

  // Addresses are unique and dense per node.
  std::set<std::pair<NodeId, std::size_t>> addrs;
  for (NodeId n : kNodes) {
    std::set<std::string> names;
    for (const auto& e : m.entries) {
      if (e.node != n) continue;
      CHECK(e.index == names.size());
      CHECK(names.insert(e.name).second);
      CHECK(addrs.insert({e.node, e.index}).second);
    }
  }
  CHECK(m.count(NodeId::perception) == 4 + kTrackSlots * 9);
  CHECK(m.count(NodeId::planning) == 22 + 4 + 8 + kProfileSamples);
  CHECK(m.count(NodeId::control) == 20);

  // The exported manifest is the documented one.
  const auto want = nlohmann::json::parse(read_file(std::filesystem::path(ADDT_TEST_DATA_DIR) / "state_manifest.json"));
  CHECK(nlohmann::json::parse(m.to_json()) == want);
  const auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["nodes"][0]["hardware"] == "gpu");
  CHECK(j["nodes"][1]["hardware"] == "cpu");
  CHECK(j["nodes"][2]["hardware"] == "cpu");
}

TEST_CASE("registered parameters drive behaviour") {
  // Writing a parameter through the registered state changes what the node
  // computes, the same way a fault would.
  const sim::RoadModel road(1, 3.5, {{500.0, 0.0}});
  Pipeline p(road, {});
  auto& ctl = p.node(NodeId::control);
  const auto k_ff = ctl.index_of("k_ff");
  REQUIRE(k_ff.has_value());
  const auto ego = ego_at(0, 0, 5);
  p.tick(0, {}, ego);
  const double before = p.command(0).accel;
  ctl[*k_ff] = 0.0;
  p.tick(1, {}, ego);
  CHECK(p.command(1).accel != before);

  auto& per = p.node(NodeId::perception);
  per[*per.index_of("range_gate")] = 0.0;
  const std::vector<sensor::EgoDetection> d{det(1, 10.0, 0.0)};
  p.tick(10, d, ego);
  CHECK(p.perception().tracks().empty());
}

TEST_CASE("nominal following run keeps its distance") {
  const auto cfg = load("follow_cruise.adt");
  campaign::TrialOptions opt;
  opt.trace = true;
  const auto rec = campaign::run_trial(cfg, 1, opt);
  CHECK(rec.outcome.kind == metrics::OutcomeKind::success);
  CHECK(rec.fault_log.empty());
  CHECK(rec.dropped_frames == 0);
}
