#pragma once

#include <optional>
#include <string>
#include <vector>

#include "addt/road.hpp"

namespace addt::sim {

inline constexpr double kDt = 0.01;
inline constexpr double kMaxSteer = 0.6;
inline constexpr double kMaxAccel = 10.0;

inline constexpr double kDefaultLength = 4.5;
inline constexpr double kDefaultWidth = 1.8;
inline constexpr double kDefaultWheelbase = 2.5;

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double speed = 0.0;
  double wheelbase = kDefaultWheelbase;
  double half_length = kDefaultLength / 2;
  double half_width = kDefaultWidth / 2;
};

/// Counts of inputs that had to be clamped or sanitised in one step.
struct StepClamps {
  int steer = 0;
  int accel = 0;
  int speed = 0;
  int non_finite = 0;

  int total() const { return steer + accel + speed + non_finite; }
};

/// Kinematic bicycle, explicit Euler:
///   yaw'   = yaw + speed / wheelbase * tan(steer) * dt
///   x'     = x + speed * cos(yaw) * dt
///   y'     = y + speed * sin(yaw) * dt
///   speed' = max(0, speed + accel * dt)
/// Steering is clamped to +-kMaxSteer and acceleration to +-kMaxAccel. NaN
/// inputs are treated as zero. Clamps are counted into `clamps` if given.
VehicleState step_vehicle(const VehicleState& s, double steer, double accel, double dt,
                          StepClamps* clamps = nullptr);

enum class Behavior { cruise, emergency_brake, cut_in, stop };

struct BehaviorScript {
  Behavior kind = Behavior::cruise;
  double at = 0.0;        // s, start of the scripted action
  double decel = 0.0;     // m/s^2, emergency_brake and stop
  int target_lane = 0;    // cut_in
  double duration = 0.0;  // s, cut_in lateral transition time
};

struct Agent {
  int id = 0;
  std::string name;
  VehicleState state;
  BehaviorScript script;
  int lane = 0;            // initial lane
  double set_speed = 0.0;  // cruise speed
};

enum class WorldEventKind { collision, off_lane };

struct WorldEvent {
  double time = 0.0;
  WorldEventKind kind = WorldEventKind::collision;
  int agent_id = -1;  // collision partner
};

struct WorldState {
  long tick = 0;
  double time = 0.0;
  VehicleState ego;
  std::vector<Agent> agents;
  std::vector<WorldEvent> events;
};

/// Place a vehicle on the road at (s, d) heading along the tangent.
VehicleState place_on_road(const RoadModel& road, double s, double d, double speed,
                           double length = kDefaultLength, double width = kDefaultWidth,
                           double wheelbase = kDefaultWheelbase);

/// Lateral reference of an agent's script at time t: (d, dd/dt).
struct LateralRef {
  double d = 0.0;
  double rate = 0.0;
};
LateralRef lateral_reference(const Agent& agent, const RoadModel& road, double t);

/// Advance every agent one step by its script and advance the clock. The ego
/// is left untouched; the closed loop moves it with the pipeline's command.
WorldState step_behaviors(const WorldState& world, const RoadModel& road, double dt);

/// Separating-axis overlap of two oriented footprints. Touching counts.
bool rectangles_overlap(const VehicleState& a, const VehicleState& b);

/// First agent (in list order) whose footprint overlaps the ego's.
std::optional<WorldEvent> check_collision(const WorldState& world);

/// True iff the ego center is more than lane_width / 2 from the nearest lane
/// centerline.
bool check_off_lane(const WorldState& world, const RoadModel& road);

}  // namespace addt::sim
