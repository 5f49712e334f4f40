#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <typelab/constructions.hpp>
#include <typelab/density.hpp>
#include <typelab/uniformity.hpp>

#include "test_util.hpp"

using namespace typelab;

TEST(CheckDensity, GridPassesAtItsDensity) {
  for (double d : {0.5, 1.0, 2.0}) {
    const auto g = arithmetic(d, 1e4);
    const auto p = find_short_partition(g, d);
    const auto v = check_density(g, p, d);
    EXPECT_TRUE(v.pass);
    // recount every interval independently
    for (const auto& s : v.per_interval) {
      std::size_t n = 0;
      for (double x : g.points()) n += (x > s.interval.left && x <= s.interval.right);
      EXPECT_EQ(n, s.delta);
    }
  }
}

TEST(CheckDensity, FailsAtOneAndAHalf) {
  const auto g = arithmetic(1.0, 1e4);
  const auto v = check_density(g, find_short_partition(g, 1.0), 1.5);
  EXPECT_FALSE(v.pass);
  EXPECT_NEAR(v.max_deviation, 0.5, 0.05);
}

TEST(CheckDensity, EmptyOuterHalfFails) {
  const double T = 4000;
  std::vector<double> p;
  for (double x = -T; x <= T / 2; x += 1.0) p.push_back(x);
  const RealSequence s(p, T);
  const auto part = find_short_partition(arithmetic(1.0, T), 1.0);
  const auto v = check_density(s, part, 1.0);
  EXPECT_FALSE(v.pass);
  ASSERT_GE(v.worst_interval, 0);
  EXPECT_GT(v.per_interval[static_cast<std::size_t>(v.worst_interval)].interval.left, T / 2 - 1);
}

TEST(CheckDensity, WindowMismatch) {
  const auto g = arithmetic(1.0, 100);
  EXPECT_EQ(code_of([&] { check_density(g, Partition({-10, 0, 10}), 1.0); }), ErrorCode::WindowMismatch);
}

TEST(CheckDensity, LooserToleranceNeverFlipsPassToFail) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3000, 3000);
  std::vector<double> p(5000);
  for (auto& x : p) x = u(rng);
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  const RealSequence s(p, 3000);
  for (double d : {0.6, 0.8, 0.85, 1.0}) {
    const auto part = find_short_partition(s, d);
    bool prev = false;
    for (double f : {0.02, 0.05, 0.1, 0.2, 0.5}) {
      const bool now = check_density(s, part, d, f).pass;
      if (prev) EXPECT_TRUE(now);
      prev = now;
    }
  }
}

TEST(CheckEnergy, GridConverges) {
  const auto g = arithmetic(1.0, 1e4);
  EXPECT_EQ(check_energy(g, find_short_partition(g, 1.0)).classification, Classification::Convergent);
}

TEST(CheckEnergy, ExponentiallyCloseDoublesDiverge) {
  const double T = 200;
  std::vector<double> p;
  for (double n = -T + 1; n <= T - 1; n += 1.0) {
    p.push_back(n);
    p.push_back(n + 0.9 * std::exp(-std::abs(n) / 8));
  }
  const auto s = validate_sequence(p, T);
  std::vector<double> bp;
  for (double x = -T + 1; x <= T - 1; x += 1.0) bp.push_back(x - 0.05);
  bp.insert(bp.end(), {-T, 0.0, T});
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  const auto part = merge_short_intervals(Partition(bp));
  EXPECT_EQ(check_energy(s, part).classification, Classification::Divergent);
}

TEST(CheckEnergy, SinglePointPerIntervalConverges) {
  const auto part = find_short_partition(arithmetic(1.0, 1e4), 1.0);
  std::vector<double> mids;
  for (const auto& I : part.intervals()) mids.push_back(0.5 * (I.left + I.right));
  const RealSequence s(mids, 1e4);
  const auto v = check_energy(s, part);
  EXPECT_EQ(v.classification, Classification::Convergent);
  // direct sum of log|I_n|/(1+dist^2)
  double ref = 0;
  for (const auto& I : part.intervals()) ref += std::log(I.length()) / (1 + I.dist_to_origin() * I.dist_to_origin());
  EXPECT_NEAR(v.value_truncated, ref, 1e-9 * ref);
}

TEST(CheckEnergy, ShortIntervalsRejected) {
  const auto g = arithmetic(1.0, 10);
  EXPECT_EQ(code_of([&] { check_energy(g, Partition({-10, -0.5, 0, 0.5, 10})); }), ErrorCode::IntervalTooShort);
}

TEST(MergeShortIntervals, AllAtLeastOne) {
  const auto p = merge_short_intervals(Partition({-5, -0.7, -0.2, 0, 0.3, 0.6, 2, 5}));
  for (const auto& I : p.intervals()) EXPECT_GE(I.length(), 1.0);
  EXPECT_TRUE(std::binary_search(p.breakpoints().begin(), p.breakpoints().end(), 0.0));
}

TEST(CheckDUniform, GridPassesAtDFailsAbove) {
  for (double d : {0.5, 1.0, 2.0}) {
    const auto g = arithmetic(d, 1e4);
    const auto r = check_d_uniform(g, d);
    EXPECT_TRUE(r.overall) << d;
    EXPECT_TRUE(r.shortness.convergent());
    EXPECT_TRUE(r.energy_verdict.convergent());
    EXPECT_FALSE(check_d_uniform(g, 1.5 * d).overall) << d;
    EXPECT_FALSE(check_d_uniform(g, 2.0 * d).overall) << d;
  }
}

TEST(CheckDUniform, OverallIsConjunction) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2000, 2000);
  std::vector<double> p(3000);
  for (auto& x : p) x = u(rng);
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  const RealSequence s(p, 2000);
  for (double d : {0.5, 0.7, 0.75, 0.8}) {
    const auto r = check_d_uniform(s, d);
    EXPECT_EQ(r.overall, r.shortness.convergent() && r.density_verdict.pass && r.energy_verdict.convergent());
  }
}

TEST(CheckDUniform, BenedicksSequencePassesAtC) {
  const auto b = benedicks_sequence(alternating_partition(1.0, 2.0, 1000.0), 0.5);
  EXPECT_TRUE(check_d_uniform(b.sequence, 0.5).overall);
}

TEST(CheckDUniform, SeparatedFailuresAreDensityFailures) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> p;
    for (double x = -2000; x <= 2000; x += 1.0) p.push_back(x + jitter(rng));
    p.front() = -2000;
    p.back() = 2000;
    const RealSequence s(p, 2000);
    for (double d : {0.9, 1.0, 1.1, 1.3}) {
      const auto r = check_d_uniform(s, d);
      if (!r.overall) EXPECT_FALSE(r.density_verdict.pass && r.shortness.convergent()) << d;
      if (r.energy_checked) EXPECT_FALSE(r.energy_verdict.divergent()) << d;
    }
  }
}

TEST(CheckDUniform, PassImpliesInteriorDensityAtLeastD) {
  std::vector<double> gr;
  for (int k = 1; k <= 40; ++k) gr.push_back(0.05 * k);
  for (double d : {0.5, 1.0}) {
    const auto g = perturb_exponential(arithmetic(d, 4000), 1.0, 3);
    if (check_d_uniform(g, d).overall) EXPECT_GE(interior_density(g, gr).value, d - 0.05 - 1e-12);
  }
}

TEST(CheckDUniform, NonPositiveDRejected) {
  EXPECT_THROW(check_d_uniform(arithmetic(1.0, 100), 0.0), Error);
}
