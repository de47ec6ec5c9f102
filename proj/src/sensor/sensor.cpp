#include <cmath>

#include "addt/sensor.hpp"

namespace addt::sensor {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Mat3 rotation(const Extrinsics& e) {
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  return {{{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
           {sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
           {-sp, cp * sr, cp * cr}}};
}

Vec3 mul(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Vec3 mul_transposed(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
          m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
          m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2]};
}

}  // namespace

SensorFrame sample_frame(const sim::WorldState& world, const Extrinsics& actual,
                         const SensorConfig& cfg, long seq, Rng& rng) {
  SensorFrame frame;
  frame.seq = seq;
  frame.timestamp = static_cast<double>(seq) / cfg.rate;

  const Mat3 r = rotation(actual);
  const auto& ego = world.ego;
  const double c = std::cos(ego.yaw), s = std::sin(ego.yaw);
  for (const auto& agent : world.agents) {
    const double dx = agent.state.x - ego.x;
    const double dy = agent.state.y - ego.y;
    const Vec3 p_ego{c * dx + s * dy, -s * dx + c * dy, 0.0};
    const double rel_yaw = agent.state.yaw - ego.yaw;
    const Vec3 h_ego{std::cos(rel_yaw), std::sin(rel_yaw), 0.0};

    const Vec3 p = mul_transposed(r, {p_ego[0] - actual.translation[0],
                                      p_ego[1] - actual.translation[1],
                                      p_ego[2] - actual.translation[2]});
    const Vec3 h = mul_transposed(r, h_ego);
    const double range = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (range > cfg.max_range) continue;
    if (std::fabs(std::atan2(p[1], p[0])) > cfg.fov_half_angle) continue;

    const double nx = rng.normal(), ny = rng.normal(), nyaw = rng.normal();
    Detection d;
    d.object_id = agent.id;
    d.x = p[0] + cfg.position_noise_sigma * nx;
    d.y = p[1] + cfg.position_noise_sigma * ny;
    d.z = p[2];
    d.yaw = wrap_angle(std::atan2(h[1], h[0]) + cfg.yaw_noise_sigma * nyaw);
    d.range = range;
    frame.detections.push_back(d);
  }
  return frame;
}

Extrinsics perturb_extrinsics(const Extrinsics& nominal, const SpatialFaultSpec& spec, Rng& rng) {
  Extrinsics out = nominal;
  for (std::size_t i = 0; i < 3; ++i) {
    out.translation[i] += spec.offset.translation[i];
    if (spec.translation_sigma > 0.0) out.translation[i] += spec.translation_sigma * rng.normal();
  }
  double* angles[] = {&out.yaw, &out.pitch, &out.roll};
  const double offsets[] = {spec.offset.yaw, spec.offset.pitch, spec.offset.roll};
  for (std::size_t i = 0; i < 3; ++i) {
    double a = *angles[i] + offsets[i];
    if (spec.rotation_sigma > 0.0) a += spec.rotation_sigma * rng.normal();
    *angles[i] = wrap_angle(a);
  }
  return out;
}

SensorFrame apply_temporal_fault(const SensorFrame& frame, const TemporalFaultSpec& spec,
                                 const SensorConfig& cfg, Rng& rng) {
  SensorFrame out = frame;
  const double u = rng.uniform();
  const double jitter = std::fabs(spec.delay_sigma * rng.normal());
  if (u < spec.drop_rate) {
    out.delay = cfg.out_of_order_threshold + cfg.period();
    out.dropped = true;
  } else {
    out.delay = jitter;
    out.dropped = jitter > cfg.out_of_order_threshold;
  }
  out.timestamp = frame.timestamp + out.delay;
  if (out.dropped) out.detections.clear();
  return out;
}

std::optional<std::vector<EgoDetection>> to_ego_frame(const SensorFrame& frame,
                                                      const Extrinsics& nominal) {
  if (frame.dropped) return std::nullopt;
  const Mat3 r = rotation(nominal);
  std::vector<EgoDetection> out;
  out.reserve(frame.detections.size());
  for (const auto& d : frame.detections) {
    const Vec3 p = mul(r, {d.x, d.y, d.z});
    const Vec3 h = mul(r, {std::cos(d.yaw), std::sin(d.yaw), 0.0});
    EgoDetection e;
    e.object_id = d.object_id;
    e.x = p[0] + nominal.translation[0];
    e.y = p[1] + nominal.translation[1];
    e.yaw = std::atan2(h[1], h[0]);
    e.range = d.range;
    out.push_back(e);
  }
  return out;
}

}  // namespace addt::sensor
