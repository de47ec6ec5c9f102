#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"

#include "addt/latency.hpp"

using namespace addt;
using namespace addt::latency;

namespace {

LatencyModel single_node(double alpha, double beta, double sigma) {
  LatencyModel m;
  m[Node::perception] = {alpha, beta, sigma};
  return m;
}

}  // namespace

TEST_CASE("degenerate and anchor models") {
  Rng rng(1);
  const auto m = single_node(5.0, 0.0, 0.0);
  for (int n : {0, 1, 10, 100}) CHECK(sample_node_latency(m, Node::perception, n, rng) == 5.0);

  const auto anchor = single_node(20.0, 2.0, 0.0);
  CHECK(sample_node_latency(anchor, Node::perception, 40, rng) == doctest::Approx(100.0).epsilon(1e-15));

  LatencyModel def = LatencyModel::shipped_default();
  for (auto& n : def.nodes) n.sigma = 0.0;
  const auto s = sample_cycle(def, 0, 40, rng);
  CHECK(s.e2e_ms == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(s.node_ms[0] + s.node_ms[1] + s.node_ms[2] == doctest::Approx(s.e2e_ms).epsilon(1e-15));
  CHECK_FALSE(s.violated);
}

TEST_CASE("lognormal median equals the scale") {
  const auto m = single_node(20.0, 2.0, 0.1);
  Rng rng(42);
  std::vector<double> v(100000);
  for (auto& x : v) x = sample_node_latency(m, Node::perception, 10, rng);
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  CHECK(std::fabs(v[v.size() / 2] - 40.0) / 40.0 < 0.01);
}

TEST_CASE("deadline tie rule") {
  LatencySample s;
  s.e2e_ms = 99.9;
  CHECK_FALSE(check_deadline(s));
  s.e2e_ms = 100.0;
  CHECK_FALSE(check_deadline(s));
  s.e2e_ms = 100.1;
  CHECK(check_deadline(s));
}

TEST_CASE("stats examples") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const auto st = stats(v);
  CHECK(st.best == 1.0);
  CHECK(st.mean == 50.5);
  CHECK(st.p99 == 99.0);
  CHECK(st.count == 100);

  const std::vector<double> one{7.0};
  const auto s1 = stats(one);
  CHECK(s1.best == 7.0);
  CHECK(s1.mean == 7.0);
  CHECK(s1.p99 == 7.0);

  const std::vector<double> low(10, 50.0), high(10, 150.0);
  CHECK(stats(low).violation_rate == 0.0);
  CHECK(stats(high).violation_rate == 1.0);
  CHECK_THROWS_AS(stats(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("stats ordering on random samples") {
  std::mt19937_64 g(5);
  std::lognormal_distribution<double> d(3.0, 0.7);
  std::uniform_int_distribution<int> n(1, 300);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> v(n(g));
    for (auto& x : v) x = d(g);
    const auto st = stats(v);
    const double mx = *std::max_element(v.begin(), v.end());
    CHECK(st.best <= st.mean);
    CHECK(st.mean <= mx);
    CHECK(st.best <= st.p99);
    // Nearest rank from the definition: sorted[ceil(0.99 n) - 1].
    std::sort(v.begin(), v.end());
    const std::size_t rank = (99 * v.size() + 99) / 100;
    CHECK(st.p99 == v[rank - 1]);
  }
}

TEST_CASE("mean latency is monotone in object count at sigma 0") {
  LatencyModel m = LatencyModel::shipped_default();
  for (auto& n : m.nodes) n.sigma = 0.0;
  Rng rng(9);
  double prev = -1.0;
  for (int n = 0; n <= 60; ++n) {
    const double e2e = sample_cycle(m, 0, n, rng).e2e_ms;
    CHECK(e2e >= prev);
    prev = e2e;
  }
}

TEST_CASE("shipped default crosses the deadline between 10 and 40 objects") {
  const auto m = LatencyModel::shipped_default();
  Rng rng(2024);
  std::vector<double> at40, at10;
  for (int i = 0; i < 10000; ++i) {
    at40.push_back(sample_cycle(m, i, 40, rng).e2e_ms);
    at10.push_back(sample_cycle(m, i, 10, rng).e2e_ms);
  }
  CHECK(stats(at40).mean > 100.0);
  CHECK(stats(at10).p99 < 100.0);
}

TEST_CASE("kl divergence") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  const double pq = kl_divergence_probs(p, q);
  CHECK(pq == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-9));
  CHECK(std::fabs(pq - 0.143841) < 1e-6);
  CHECK(kl_divergence_probs(q, p) != doctest::Approx(pq));
  CHECK(std::fabs(kl_divergence_probs(p, p)) < 1e-12);

  std::mt19937_64 g(1);
  std::normal_distribution<double> a(50.0, 5.0), b(60.0, 8.0);
  std::vector<double> xs(2000), ys(2000);
  for (auto& x : xs) x = a(g);
  for (auto& y : ys) y = b(g);
  CHECK(std::fabs(kl_divergence(xs, xs, 32)) < 1e-12);
  CHECK(kl_divergence(xs, ys, 32) > 0.0);
  CHECK_THROWS_AS(kl_divergence(xs, std::vector<double>{}, 32), std::invalid_argument);
  CHECK_THROWS_AS(kl_divergence(xs, ys, 1), std::invalid_argument);
}

TEST_CASE("kl divergence is non-negative on random histograms") {
  std::mt19937_64 g(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> bins(2, 20);
  for (int i = 0; i < 500; ++i) {
    const int n = bins(g);
    std::vector<double> p(n), q(n);
    for (auto& x : p) x = u(g) < 0.2 ? 0.0 : u(g);
    for (auto& x : q) x = u(g) < 0.2 ? 0.0 : u(g);
    p[0] += 1e-3;
    q[0] += 1e-3;
    const double sp = std::accumulate(p.begin(), p.end(), 0.0);
    const double sq = std::accumulate(q.begin(), q.end(), 0.0);
    for (auto& x : p) x /= sp;
    for (auto& x : q) x /= sq;
    CHECK(kl_divergence_probs(p, q) >= -1e-6);
  }
}
