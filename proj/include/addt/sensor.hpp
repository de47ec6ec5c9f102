#pragma once

#include <array>
#include <optional>
#include <vector>

#include "addt/angles.hpp"
#include "addt/rng.hpp"
#include "addt/world.hpp"

namespace addt::sensor {

/// Sensor pose in the ego body frame. Rotation applied Z-Y-X
/// (yaw, then pitch, then roll): R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct Extrinsics {
  std::array<double, 3> translation{};
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  bool operator==(const Extrinsics&) const = default;
};

struct SensorConfig {
  double rate = 10.0;               // Hz
  double fov_half_angle = kPi;      // surround object list by default
  double max_range = 100.0;         // m
  double position_noise_sigma = 0.0;
  double yaw_noise_sigma = 0.0;
  double out_of_order_threshold = 0.05;  // s, half a frame period at 10 Hz

  double period() const { return 1.0 / rate; }
};

/// Object detection in sensor coordinates.
struct Detection {
  int object_id = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double range = 0.0;
};

struct SensorFrame {
  long seq = 0;
  double timestamp = 0.0;
  double delay = 0.0;  // added by the temporal fault
  bool dropped = false;
  std::vector<Detection> detections;
};

struct TemporalFaultSpec {
  double drop_rate = 0.0;
  double delay_sigma = 0.0;
};

/// Random perturbation (sigmas) plus fixed offsets for controlled studies.
struct SpatialFaultSpec {
  double translation_sigma = 0.0;
  double rotation_sigma = 0.0;
  Extrinsics offset;
};

/// Detection mapped back into the ego frame (planar).
struct EgoDetection {
  int object_id = 0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double range = 0.0;
};

/// Ground-truth agent poses through the actual extrinsics, gated by field of
/// view and range, with Gaussian noise. Noise variates are drawn for every
/// detected object even at zero sigma so that the stream layout does not
/// depend on the configuration.
SensorFrame sample_frame(const sim::WorldState& world, const Extrinsics& actual,
                         const SensorConfig& cfg, long seq, Rng& rng);

Extrinsics perturb_extrinsics(const Extrinsics& nominal, const SpatialFaultSpec& spec, Rng& rng);

/// With probability drop_rate the frame is delayed past the out-of-order
/// threshold and dropped; otherwise its timestamp is jittered by
/// |N(0, delay_sigma)| and it is dropped iff the jitter exceeds the threshold.
/// Exactly two variates are drawn per frame.
SensorFrame apply_temporal_fault(const SensorFrame& frame, const TemporalFaultSpec& spec,
                                 const SensorConfig& cfg, Rng& rng);

/// Invert the nominal calibration. Returns nullopt for a dropped frame.
std::optional<std::vector<EgoDetection>> to_ego_frame(const SensorFrame& frame,
                                                      const Extrinsics& nominal);

}  // namespace addt::sensor
