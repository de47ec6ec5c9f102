#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "addt/road.hpp"
#include "addt/sensor.hpp"
#include "addt/state.hpp"
#include "addt/world.hpp"

namespace addt::pipeline {

inline constexpr double kControlPeriod = 0.01;
inline constexpr double kPerceptionPeriod = 0.1;
inline constexpr long kTicksPerPerception = 10;

inline constexpr std::size_t kTrackSlots = 16;
inline constexpr std::size_t kProfileSamples = 31;  // 3 s horizon at 0.1 s

inline constexpr double kMaxSteerCmd = 0.6;
inline constexpr double kMaxAccelCmd = 8.0;

// ---------------------------------------------------------------- perception

/// Track in the world-aligned BEV frame.
struct TrackedObject {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  int age = 0;   // perception cycles since last detection
  int hits = 0;  // detections associated so far (saturating)

  double speed() const;
};

struct PerceptionParams {
  double assoc_gate = 3.0;   // m
  double stale_limit = 3.0;  // cycles; a track is deleted when age exceeds it
  double range_gate = 150.0; // m; detections beyond are ignored
};

/// Nearest-neighbour tracker over fixed slots. Each slot is
/// [active, id, x, y, yaw, vx, vy, age, hits] in the registered state.
class Perception {
 public:
  explicit Perception(const PerceptionParams& p = {});

  /// One perception cycle. `detections` are in the ego frame, placed into the
  /// world frame with the ego pose. An empty list ages every track.
  void step(std::span<const sensor::EgoDetection> detections, const sim::VehicleState& ego,
            double dt);

  /// Active tracks in slot order.
  std::vector<TrackedObject> tracks() const;

  NodeState& state() { return state_; }
  const NodeState& state() const { return state_; }

 private:
  std::size_t slot(std::size_t i, std::size_t field) const { return slot0_ + i * 9 + field; }

  NodeState state_;
  std::size_t assoc_gate_, stale_limit_, range_gate_, next_id_;
  std::size_t slot0_;
};

// ------------------------------------------------------------------ planning

struct Trajectory {
  bool valid = false;
  double target_d = 0.0;  // lateral offset target
  double start_d = 0.0;
  double t0 = 0.0;         // lateral transition start time
  double t_lc = 3.0;       // lateral transition duration
  double plan_time = 0.0;  // time of the first speed sample
  double sample_dt = 0.1;
  int profile = 0;         // 0 hold, 1 follow, 2 stop
  double cost = 0.0;
  std::array<double, kProfileSamples> v{};

  /// Lateral reference and its time derivative at absolute time t.
  std::pair<double, double> lateral_at(double t) const;
  /// Target speed and acceleration at absolute time t.
  std::pair<double, double> speed_at(double t) const;
  /// (s, v) samples, s measured from the ego position at plan time.
  std::vector<std::pair<double, double>> speed_profile() const;
};

enum class SpeedProfile { hold = 0, follow = 1, stop = 2 };

struct PlannerParams {
  double w_col = 10.0;
  double w_lane = 1.0;
  double w_prog = 0.1;
  double v_cruise = 15.0;
  double d_mission = 0.0;
  double horizon = 3.0;
  double t_lc = 3.0;
  double lon_margin = 2.0;
  double lat_margin = 0.3;
  double ego_length = sim::kDefaultLength;
  double ego_width = sim::kDefaultWidth;
  double obj_length = sim::kDefaultLength;
  double obj_width = sim::kDefaultWidth;
  double a_comfort = 1.5;
  double a_follow_max = 8.0;
  double stop_decel = 5.0;
  double time_gap = 1.5;
  double min_gap = 6.0;
  double gap_gain = 0.3;
  double speed_gain = 0.8;
};

struct Candidate {
  double target_d = 0.0;
  SpeedProfile profile = SpeedProfile::hold;
  double risk = 0.0;  // +inf when the path intersects a predicted footprint
  double cost = 0.0;
};

/// Lattice planner: five lateral offsets relative to the current lane center
/// times three speed profiles, checked against constant-velocity track
/// predictions in road coordinates.
class Planner {
 public:
  Planner(const sim::RoadModel& road, const PlannerParams& p);

  Trajectory step(std::span<const TrackedObject> tracks, const sim::VehicleState& ego, double t);

  /// Published trajectory as currently held in the registered state.
  Trajectory trajectory() const;

  /// Candidate evaluations of the most recent step, in enumeration order.
  const std::vector<Candidate>& candidates() const { return candidates_; }

  NodeState& state() { return state_; }
  const NodeState& state() const { return state_; }

 private:
  const sim::RoadModel* road_;
  NodeState state_;
  std::vector<Candidate> candidates_;

  struct Index {
    std::size_t w_col, w_lane, w_prog, v_cruise, d_mission, lane_width, lane_count, sample_dt,
        t_lc, lon_margin, lat_margin, ego_length, ego_width, obj_length, obj_width,
        a_comfort, a_follow_max, stop_decel, time_gap, min_gap, gap_gain, speed_gain;
    std::size_t lc_active, lc_start_d, lc_target_d, lc_t0;
    std::size_t valid, target_d, start_d, t0, out_t_lc, plan_time, profile, cost, v0;
  } ix_{};
};

// ------------------------------------------------------------------- control

struct ControlGains {
  double kp_v = 1.0;
  double ki_v = 0.1;
  double kd_v = 0.0;
  double k_ff = 1.0;
  double kp_lat = 0.05;
  double ki_lat = 0.005;
  double kd_lat = 0.0;
  double k_yaw = 0.6;
  double int_v_limit = 5.0;
  double int_lat_limit = 1.0;
  double wheelbase = sim::kDefaultWheelbase;
};

struct ControlCommand {
  double steer = 0.0;
  double accel = 0.0;
  long tick = 0;
};

/// Speed PID with profile feed-forward; lateral PID on cross-track error plus
/// heading term and road-curvature feed-forward.
class Controller {
 public:
  Controller(const sim::RoadModel& road, const ControlGains& g);

  ControlCommand step(const Trajectory& traj, const sim::VehicleState& ego, double t, double dt);

  /// Command currently held in the output registers.
  ControlCommand command(long tick) const;

  NodeState& state() { return state_; }
  const NodeState& state() const { return state_; }

 private:
  const sim::RoadModel* road_;
  NodeState state_;
  struct Index {
    std::size_t kp_v, ki_v, kd_v, k_ff, kp_lat, ki_lat, kd_lat, k_yaw, int_v_limit,
        int_lat_limit, wheelbase, max_steer, max_accel;
    std::size_t int_v, prev_ev, int_lat, prev_e, has_prev;
    std::size_t cmd_steer, cmd_accel;
  } ix_{};
};

// ------------------------------------------------------------------ pipeline

struct PipelineConfig {
  PerceptionParams perception;
  PlannerParams planning;
  ControlGains control;
};

/// sensor -> perception -> planning -> control, with perception and planning
/// on every tenth control tick.
class Pipeline {
 public:
  Pipeline(const sim::RoadModel& road, const PipelineConfig& cfg);

  struct TickReport {
    bool perception_ran = false;
    bool planning_ran = false;
  };

  static bool perception_due(long tick) { return tick % kTicksPerPerception == 0; }

  /// Execute the nodes due at `tick`. `detections` is consulted on perception
  /// ticks only; pass an empty list for a dropped frame.
  TickReport tick(long tick, std::span<const sensor::EgoDetection> detections,
                  const sim::VehicleState& ego);

  /// The command held in control's output registers.
  ControlCommand command(long tick) const { return control_.command(tick); }

  NodeState& node(NodeId n);
  const NodeState& node(NodeId n) const;
  Manifest manifest() const;

  Perception& perception() { return perception_; }
  Planner& planner() { return planner_; }
  Controller& controller() { return control_; }
  const Perception& perception() const { return perception_; }
  const Planner& planner() const { return planner_; }

  long perception_runs() const { return perception_runs_; }
  long planning_runs() const { return planning_runs_; }
  long control_runs() const { return control_runs_; }

 private:
  Perception perception_;
  Planner planner_;
  Controller control_;
  long perception_runs_ = 0;
  long planning_runs_ = 0;
  long control_runs_ = 0;
};

}  // namespace addt::pipeline
