#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "addt/rng.hpp"

namespace addt::latency {

inline constexpr double kDefaultDeadlineMs = 100.0;

enum class Node : std::size_t { perception = 0, planning = 1, control = 2 };
inline constexpr std::size_t kNodeCount = 3;

std::string_view to_string(Node node);

/// How a deadline violation feeds back into the closed loop.
enum class Coupling { record_only, delay_command };

struct NodeLatencyParams {
  double alpha_ms = 0.0;      // fixed cost
  double beta_ms = 0.0;       // cost per tracked object
  double sigma = 0.0;         // lognormal shape
};

/// Affine-in-object-count lognormal latency, one parameter set per node.
struct LatencyModel {
  std::array<NodeLatencyParams, kNodeCount> nodes{};
  Coupling coupling = Coupling::record_only;

  const NodeLatencyParams& operator[](Node n) const { return nodes[static_cast<std::size_t>(n)]; }
  NodeLatencyParams& operator[](Node n) { return nodes[static_cast<std::size_t>(n)]; }

  /// Sum of alphas 20 ms and betas 2 ms/object: the sensor-to-control median
  /// reaches 100 ms at 40 objects.
  static LatencyModel shipped_default();
};

/// (alpha + beta * n_obj) * exp(sigma * Z), Z ~ N(0, 1).
double sample_node_latency(const LatencyModel& model, Node node, int n_obj, Rng& rng);

struct LatencySample {
  long tick = 0;
  std::array<double, kNodeCount> node_ms{};
  double e2e_ms = 0.0;
  int n_obj = 0;
  bool violated = false;
};

/// True iff e2e strictly exceeds the deadline.
bool check_deadline(const LatencySample& sample, double deadline_ms = kDefaultDeadlineMs);

/// One sample for a full sensor-to-control cycle. All nodes see the same
/// object count.
LatencySample sample_cycle(const LatencyModel& model, long tick, int n_obj, Rng& rng,
                           double deadline_ms = kDefaultDeadlineMs);

struct LatencyStats {
  double best = 0.0;
  double mean = 0.0;
  double p99 = 0.0;
  double violation_rate = 0.0;
  std::size_t count = 0;
};

/// Nearest-rank percentile (1-based rank ceil(q * n)) with q = num/den.
double nearest_rank(std::span<const double> sorted, std::size_t num, std::size_t den);

/// best = min, mean = arithmetic mean, p99 = nearest rank. Throws
/// std::invalid_argument on empty input.
LatencyStats stats(std::span<const double> e2e_ms, double deadline_ms = kDefaultDeadlineMs);
LatencyStats stats(std::span<const LatencySample> samples, double deadline_ms = kDefaultDeadlineMs);

inline constexpr double kKlSmoothing = 1e-9;

/// KL(P || Q) in nats between equal-width histograms over the shared range
/// of both sample sets, with kKlSmoothing added to every bin before
/// normalisation. Throws std::invalid_argument on empty input or bins < 2.
double kl_divergence(std::span<const double> p_samples, std::span<const double> q_samples,
                     std::size_t bin_count);

/// KL between two already-normalised discrete distributions, same smoothing.
double kl_divergence_probs(std::span<const double> p, std::span<const double> q);

}  // namespace addt::latency
