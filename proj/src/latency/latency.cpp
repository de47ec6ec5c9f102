#include "addt/latency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace addt::latency {

std::string_view to_string(Node node) {
  switch (node) {
    case Node::perception: return "perception";
    case Node::planning: return "planning";
    case Node::control: return "control";
  }
  return "unknown";
}

LatencyModel LatencyModel::shipped_default() {
  LatencyModel m;
  m[Node::perception] = {12.0, 1.5, 0.15};
  m[Node::planning] = {5.0, 0.4, 0.15};
  m[Node::control] = {3.0, 0.1, 0.15};
  return m;
}

double sample_node_latency(const LatencyModel& model, Node node, int n_obj, Rng& rng) {
  const auto& p = model[node];
  const double scale = p.alpha_ms + p.beta_ms * static_cast<double>(std::max(n_obj, 0));
  const double z = rng.normal();
  if (p.sigma == 0.0) return scale;
  return scale * std::exp(p.sigma * z);
}

bool check_deadline(const LatencySample& sample, double deadline_ms) {
  return sample.e2e_ms > deadline_ms;
}

LatencySample sample_cycle(const LatencyModel& model, long tick, int n_obj, Rng& rng,
                           double deadline_ms) {
  LatencySample s;
  s.tick = tick;
  s.n_obj = n_obj;
  for (std::size_t i = 0; i < kNodeCount; ++i) {
    s.node_ms[i] = sample_node_latency(model, static_cast<Node>(i), n_obj, rng);
    s.e2e_ms += s.node_ms[i];
  }
  s.violated = check_deadline(s, deadline_ms);
  return s;
}

double nearest_rank(std::span<const double> sorted, std::size_t num, std::size_t den) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty input");
  // ceil(num * n / den) in integers; clamp to [1, n].
  std::size_t rank = (num * sorted.size() + den - 1) / den;
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

LatencyStats stats(std::span<const double> e2e_ms, double deadline_ms) {
  if (e2e_ms.empty()) throw std::invalid_argument("latency stats: empty sample set");
  std::vector<double> sorted(e2e_ms.begin(), e2e_ms.end());
  std::sort(sorted.begin(), sorted.end());
  LatencyStats st;
  st.count = sorted.size();
  st.best = sorted.front();
  st.mean = std::accumulate(e2e_ms.begin(), e2e_ms.end(), 0.0) / static_cast<double>(st.count);
  st.p99 = nearest_rank(sorted, 99, 100);
  const auto violations = std::count_if(e2e_ms.begin(), e2e_ms.end(),
                                        [&](double v) { return v > deadline_ms; });
  st.violation_rate = static_cast<double>(violations) / static_cast<double>(st.count);
  return st;
}

LatencyStats stats(std::span<const LatencySample> samples, double deadline_ms) {
  std::vector<double> e2e;
  e2e.reserve(samples.size());
  for (const auto& s : samples) e2e.push_back(s.e2e_ms);
  return stats(e2e, deadline_ms);
}

namespace {

std::vector<double> histogram(std::span<const double> xs, double lo, double width,
                              std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  for (double x : xs) {
    std::size_t idx = 0;
    if (width > 0.0) {
      const double f = std::floor((x - lo) / width);
      idx = f <= 0.0 ? 0 : std::min(static_cast<std::size_t>(f), bins - 1);
    }
    h[idx] += 1.0;
  }
  for (double& v : h) v /= static_cast<double>(xs.size());
  return h;
}

}  // namespace

double kl_divergence_probs(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.size() < 2) {
    throw std::invalid_argument("kl_divergence: distributions need equal size >= 2");
  }
  const double k = static_cast<double>(p.size());
  const double norm = 1.0 + k * kKlSmoothing;
  double pm = 0.0;
  double qm = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    pm += p[i];
    qm += q[i];
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] / pm + kKlSmoothing) / norm;
    const double qi = (q[i] / qm + kKlSmoothing) / norm;
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

double kl_divergence(std::span<const double> p_samples, std::span<const double> q_samples,
                     std::size_t bin_count) {
  if (p_samples.empty() || q_samples.empty()) {
    throw std::invalid_argument("kl_divergence: empty sample set");
  }
  if (bin_count < 2) throw std::invalid_argument("kl_divergence: bin_count must be >= 2");
  const auto [pmin, pmax] = std::minmax_element(p_samples.begin(), p_samples.end());
  const auto [qmin, qmax] = std::minmax_element(q_samples.begin(), q_samples.end());
  const double lo = std::min(*pmin, *qmin);
  const double hi = std::max(*pmax, *qmax);
  const double width = (hi - lo) / static_cast<double>(bin_count);
  const auto p = histogram(p_samples, lo, width, bin_count);
  const auto q = histogram(q_samples, lo, width, bin_count);
  return kl_divergence_probs(p, q);
}

}  // namespace addt::latency
