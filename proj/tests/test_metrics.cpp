#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "addt/metrics.hpp"

using namespace addt::metrics;

namespace {

// Oracles written independently of the library: plain loops, long double
// accumulation, angle wrap by explicit while loops.
double oracle_position(const std::vector<DetectionPair>& pairs) {
  long double sum = 0.0L;
  for (const auto& p : pairs) {
    const long double dx = static_cast<long double>(p.detected.x) - p.ground_truth.x;
    const long double dy = static_cast<long double>(p.detected.y) - p.ground_truth.y;
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return static_cast<double>(sum / pairs.size());
}

double oracle_orientation(const std::vector<DetectionPair>& pairs) {
  long double sum = 0.0L;
  const long double pi = std::numbers::pi_v<long double>;
  for (const auto& p : pairs) {
    long double d = static_cast<long double>(p.detected.theta) - p.ground_truth.theta;
    while (d > pi) d -= 2 * pi;
    while (d < -pi) d += 2 * pi;
    sum += d < 0 ? -d : d;
  }
  return static_cast<double>(sum / pairs.size());
}

std::vector<DetectionPair> random_pairs(std::mt19937_64& g, int n) {
  std::uniform_real_distribution<double> pos(-200.0, 200.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::vector<DetectionPair> out(n);
  for (auto& p : out) p = {{pos(g), pos(g), ang(g)}, {pos(g), pos(g), ang(g)}};
  return out;
}

}  // namespace

TEST_CASE("position error examples") {
  const std::vector<DetectionPair> one{{{3, 4, 0}, {0, 0, 0}}};
  CHECK(position_error(one) == 5.0);
  const std::vector<DetectionPair> two{{{1, 0, 0}, {0, 0, 0}}, {{0, 3, 0}, {0, 0, 0}}};
  CHECK(position_error(two) == 2.0);
  CHECK_THROWS_AS(position_error(std::vector<DetectionPair>{}), std::invalid_argument);
}

TEST_CASE("orientation error examples") {
  auto single = [](double a, double b) {
    const std::vector<DetectionPair> v{{{0, 0, a}, {0, 0, b}}};
    return orientation_error(v);
  };
  CHECK(single(0.1, -0.1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(single(3.04, -3.04) == doctest::Approx(2 * std::numbers::pi - 6.08).epsilon(1e-12));
  CHECK(single(3.04, -3.04) == doctest::Approx(0.203185).epsilon(1e-6));
  CHECK(single(1.3, 1.3) == 0.0);
  // The unwrapped variant keeps the seam artefact.
  const std::vector<DetectionPair> seam{{{0, 0, 3.04}, {0, 0, -3.04}}};
  CHECK(orientation_error_raw(seam) == doctest::Approx(6.08));
}

TEST_CASE("metric oracles on random pair sets") {
  std::mt19937_64 g(7);
  std::uniform_int_distribution<int> size(1, 50);
  for (int i = 0; i < 2000; ++i) {
    const auto pairs = random_pairs(g, size(g));
    REQUIRE(std::fabs(position_error(pairs) - oracle_position(pairs)) <= 1e-12 * std::max(1.0, oracle_position(pairs)));
    REQUIRE(std::fabs(orientation_error(pairs) - oracle_orientation(pairs)) <= 1e-12);
  }
}

TEST_CASE("position error is translation invariant and errors are permutation invariant") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> off(-1e3, 1e3);
  for (int i = 0; i < 500; ++i) {
    auto pairs = random_pairs(g, 20);
    const double ep = position_error(pairs);
    const double et = orientation_error(pairs);
    CHECK(ep >= 0.0);
    CHECK(et >= 0.0);
    CHECK(et <= std::numbers::pi);

    auto shifted = pairs;
    const double ox = off(g), oy = off(g);
    for (auto& p : shifted) {
      p.detected.x += ox;
      p.detected.y += oy;
      p.ground_truth.x += ox;
      p.ground_truth.y += oy;
    }
    // Offsets up to 1e3 on coordinates up to 200 perturb each difference by
    // one rounding step of the shifted magnitude.
    CHECK(position_error(shifted) == doctest::Approx(ep).epsilon(1e-12));

    auto perm = pairs;
    std::shuffle(perm.begin(), perm.end(), g);
    CHECK(position_error(perm) == doctest::Approx(ep).epsilon(1e-14));
    CHECK(orientation_error(perm) == doctest::Approx(et).epsilon(1e-14));
  }
}

TEST_CASE("classify_mission") {
  const MissionGoal goal{100.0, 60.0};
  MissionTrace clean;
  for (int i = 0; i <= 31; ++i) clean.progress.push_back({double(i), i * 100.0 / 31.0});
  const auto ok = classify_mission(clean, goal);
  CHECK(ok.kind == OutcomeKind::success);
  CHECK(ok.time_of_event == doctest::Approx(31.0));

  MissionTrace crash;
  for (int i = 0; i <= 20; ++i) crash.progress.push_back({double(i), double(i)});
  crash.events = {{12.0, EventKind::collision}, {13.0, EventKind::off_lane}};
  const auto c = classify_mission(crash, goal);
  CHECK(c.kind == OutcomeKind::collision);
  CHECK(c.time_of_event == 12.0);

  MissionTrace slow;
  for (int i = 0; i <= 60; ++i) slow.progress.push_back({double(i), double(i)});
  CHECK(classify_mission(slow, goal).kind == OutcomeKind::timeout);

  MissionTrace bad;
  bad.progress = {{0.0, 0.0}, {1.0, std::nan("")}};
  CHECK(classify_mission(bad, goal).kind == OutcomeKind::aborted);
}

TEST_CASE("classify_mission ignores content after the first terminal event") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    MissionTrace t;
    for (int k = 0; k <= 10; ++k) t.progress.push_back({double(k), k * 5.0});
    t.events.push_back({4.0 + u(g), EventKind::collision});
    const MissionGoal goal{1000.0, 60.0};
    const auto base = classify_mission(t, goal);
    MissionTrace longer = t;
    for (int k = 11; k < 30; ++k) longer.progress.push_back({double(k), 50.0 + k * 100 * u(g)});
    longer.events.push_back({20.0, u(g) < 0.5 ? EventKind::off_lane : EventKind::collision});
    CHECK(classify_mission(longer, goal) == base);
  }
}

TEST_CASE("wilson interval") {
  const auto z = wilson(0, 10);
  CHECK(z.rate == 0.0);
  CHECK(z.ci_low == 0.0);
  const double z2 = kWilsonZ95 * kWilsonZ95;
  CHECK(z.ci_high == doctest::Approx(z2 / (10 + z2)).epsilon(1e-12));
  CHECK(z.ci_high == doctest::Approx(0.2775).epsilon(1e-3));

  for (int n = 1; n <= 60; ++n) {
    for (int k = 0; k <= n; ++k) {
      const auto w = wilson(k, n);
      CHECK(w.ci_low <= w.rate);
      CHECK(w.rate <= w.ci_high);
      CHECK(w.ci_low >= 0.0);
      CHECK(w.ci_high <= 1.0);
    }
  }

  std::vector<MissionOutcome> outs(240, {OutcomeKind::success, 1.0});
  outs[17] = {OutcomeKind::timeout, 60.0};
  const auto agg = aggregate(outs);
  CHECK(agg.successes == 239);
  CHECK(agg.trials == 240);
  CHECK(agg.rate == doctest::Approx(239.0 / 240.0));
}

TEST_CASE("outcome names round-trip") {
  for (auto k : {OutcomeKind::success, OutcomeKind::collision, OutcomeKind::off_lane,
                 OutcomeKind::timeout, OutcomeKind::aborted}) {
    CHECK(outcome_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(outcome_from_string("crash").has_value());
}
