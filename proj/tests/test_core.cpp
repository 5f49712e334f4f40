#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <typelab/core.hpp>

#include "test_util.hpp"

using namespace typelab;

namespace {

// midpoint rule for the integral of g over [a, b]
// midpoint rule on pieces cut at +-2^k, so wide ranges keep a fine relative step
double integrate(double a, double b, auto&& g, int n = 20000) {
  std::vector<double> cuts{a, b};
  for (int k = -4; k <= 40; ++k)
    for (double c : {std::ldexp(1.0, k), -std::ldexp(1.0, k), 0.0})
      if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  long double s = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double h = (cuts[p + 1] - cuts[p]) / n;
    for (int i = 0; i < n; ++i) s += static_cast<long double>(g(cuts[p] + (i + 0.5) * h)) * h;
  }
  return static_cast<double>(s);
}

}  // namespace

TEST(ValidateSequence, SortsWellFormedInput) {
  const auto s = validate_sequence({2, 0, 1}, 10.0);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.values(), (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(s.generator(), "none");
}

TEST(ValidateSequence, RejectsDuplicates) {
  EXPECT_EQ(code_of([] { validate_sequence({1, 1, 2}, 10.0); }), ErrorCode::DuplicatePoint);
}

TEST(ValidateSequence, RejectsOutOfWindow) {
  EXPECT_EQ(code_of([] { validate_sequence({0, 11}, 10.0); }), ErrorCode::OutOfWindow);
}

TEST(ValidateSequence, RejectsEmpty) {
  EXPECT_EQ(code_of([] { validate_sequence({}, 10.0); }), ErrorCode::EmptyInput);
}

TEST(ValidateSequence, Idempotent) {
  const auto s = validate_sequence({3.5, -2, 7, 0.25}, 8.0, "x");
  const auto t = validate_sequence(s.values(), s.window(), s.generator());
  EXPECT_EQ(s, t);
}

TEST(RealSequence, CountInIsHalfOpen) {
  const auto s = validate_sequence({0, 1, 2, 3}, 5.0);
  EXPECT_EQ(s.count_in(0, 2), 2u);   // 1, 2
  EXPECT_EQ(s.count_in(-1, 0), 1u);  // 0
  EXPECT_EQ(s.count_in(2, 2), 0u);
  EXPECT_EQ(s.origin_index(), 0u);
}

TEST(Partition, RequiresZeroBreakpoint) {
  EXPECT_THROW(Partition({1.0, 2.0}), Error);
  const Partition p({-2, 0, 1, 3});
  EXPECT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p.interval(2).length(), 2.0);
}

TEST(Interval, DistanceToOrigin) {
  EXPECT_DOUBLE_EQ(Interval(2, 5).dist_to_origin(), 2.0);
  EXPECT_DOUBLE_EQ(Interval(-5, -3).dist_to_origin(), 3.0);
  EXPECT_DOUBLE_EQ(Interval(-1, 1).dist_to_origin(), 0.0);
  EXPECT_TRUE(Interval(0, 1).contains(1.0));
  EXPECT_FALSE(Interval(0, 1).contains(0.0));
}

TEST(CompensatedSum, RecoversCancellation) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1000.0);
}

TEST(DiscreteMeasure, IntervalMassesMatchBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10), m(0.1, 2.0);
  std::vector<double> pos, mass;
  for (int i = 0; i < 40; ++i) {
    pos.push_back(std::round(u(rng) * 4) / 4);
    mass.push_back(m(rng));
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  mass.resize(pos.size());
  const auto mu = DiscreteMeasure::from_masses(pos, mass, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = std::round(u(rng) * 4) / 4, b = std::round(u(rng) * 4) / 4;
    if (a > b) std::swap(a, b);
    double ho = 0, cl = 0, op = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (pos[i] > a && pos[i] <= b) ho += mass[i];
      if (pos[i] >= a && pos[i] <= b) cl += mass[i];
      if (pos[i] > a && pos[i] < b) op += mass[i];
    }
    auto check = [](double logv, double ref) {
      if (ref == 0)
        EXPECT_TRUE(std::isinf(logv) && logv < 0);
      else
        EXPECT_NEAR(std::exp(logv), ref, 1e-12 * ref);
    };
    check(mu.log_mass_half_open(a, b), ho);
    check(mu.log_mass_closed(a, b), cl);
    check(mu.log_mass_open(a, b), op);
  }
}

TEST(DiscreteMeasure, LogMassesSurviveUnderflow) {
  const auto mu = DiscreteMeasure::from_log_masses({0, 1}, {-2000, -2001}, 2.0);
  EXPECT_EQ(mu.atoms()[0].mass, 0.0);
  EXPECT_NEAR(mu.log_mass_closed(-1, 2), -2000 + std::log1p(std::exp(-1.0)), 1e-9);
}

TEST(WeightTable, RejectsValuesBelowOne) {
  EXPECT_EQ(code_of([] { WeightTable({0, 1, 2}, {1.0, 0.5}); }), ErrorCode::WeightBelowOne);
  EXPECT_EQ(code_of([] { WeightTable({0, 1}, {2.0}, 0.5); }), ErrorCode::WeightBelowOne);
}

TEST(WeightTable, LookupAndShape) {
  const WeightTable w({-3, -1, 1, 3}, {5.0, 1.0, 5.0});
  EXPECT_DOUBLE_EQ(w.value_at(0.0), 1.0);
  EXPECT_NEAR(w.value_at(2.0), 5.0, 1e-12);
  EXPECT_NEAR(w.value_at(-1.0), 5.0, 1e-12);  // (-3, -1] owns -1
  EXPECT_DOUBLE_EQ(w.value_at(10.0), 1.0);    // floor outside
  // shape uses cell centres in the inner and outer tenth of the span
  const std::vector<double> bp{-10, -9, -1, 1, 9, 10};
  EXPECT_TRUE(WeightTable(bp, {5.0, 1.0, 1.0, 1.0, 5.0}).grows_outward());
  EXPECT_FALSE(WeightTable(bp, {1.0, 5.0, 5.0, 5.0, 1.0}).grows_outward());
}

TEST(PoissonTailSum, UnitValuesAtDyadicPointsConverge) {
  std::vector<Term> t;
  for (int j = 0; j <= 20; ++j) t.push_back({std::ldexp(1.0, j), 1.0});
  const auto v = poisson_tail_sum(t);
  double ref = 0;
  for (int j = 0; j <= 20; ++j) ref += 1.0 / (1.0 + std::ldexp(1.0, 2 * j));
  EXPECT_NEAR(v.value_truncated, ref, 1e-14);
  EXPECT_EQ(v.classification, Classification::Convergent);
}

TEST(PoissonTailSum, LinearValuesStillConvergeShellwise) {
  std::vector<Term> t;
  for (int j = 0; j <= 20; ++j) t.push_back({std::ldexp(1.0, j), std::ldexp(1.0, j)});
  EXPECT_EQ(poisson_tail_sum(t).classification, Classification::Convergent);
}

TEST(PoissonTailSum, EmptyIsInconclusive) {
  const auto v = poisson_tail_sum(std::vector<Term>{});
  EXPECT_EQ(v.value_truncated, 0.0);
  EXPECT_EQ(v.classification, Classification::Inconclusive);
}

TEST(PoissonTailSum, NegativeTermRejected) {
  EXPECT_EQ(code_of([] { poisson_tail_sum(std::vector<Term>{{1.0, -1.0}}); }), ErrorCode::NegativeTerm);
}

TEST(PoissonTailSum, ConstantOnIntegersApproachesPi) {
  std::vector<Term> t;
  for (int n = -10000; n <= 10000; ++n) t.push_back({static_cast<double>(n), 2.0});
  double direct = 0;
  for (int n = -10000; n <= 10000; ++n) direct += 2.0 / (1.0 + double(n) * n);
  const auto v = poisson_tail_sum(t);
  EXPECT_NEAR(v.value_truncated, direct, 1e-12 * direct);
  EXPECT_NEAR(v.value_truncated, 2.0 * std::numbers::pi, 0.01 * 2.0 * std::numbers::pi);
}

TEST(PoissonTailSum, LinearGrowthOnIntegersDiverges) {
  std::vector<Term> t;
  for (int n = -4096; n <= 4096; ++n) t.push_back({static_cast<double>(n), std::abs(double(n))});
  EXPECT_EQ(poisson_tail_sum(t).classification, Classification::Divergent);
}

TEST(PoissonTailSum, ValueIsShellsPlusRemainder) {
  std::vector<Term> t;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> loc(-3000, 3000), val(0, 5);
  for (int i = 0; i < 500; ++i) t.push_back({loc(rng), val(rng)});
  const auto v = poisson_tail_sum(t);
  double s = v.inner_remainder;
  for (const auto& sh : v.shells) s += sh.sum;
  EXPECT_NEAR(s, v.value_truncated, 1e-12 * v.value_truncated);
}

TEST(PoissonTailSum, Monotone) {
  std::vector<Term> a, b;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> loc(-500, 500), val(0, 1);
  for (int i = 0; i < 300; ++i) {
    const double x = loc(rng), v = val(rng);
    a.push_back({x, v});
    b.push_back({x, v + val(rng)});
  }
  EXPECT_LE(poisson_tail_sum(a).value_truncated, poisson_tail_sum(b).value_truncated);
}

TEST(Classifier, FewerThanFourShellsInconclusive) {
  std::vector<Contribution> c{{1.5, 1.0}, {3.0, 0.5}, {5.0, 0.25}};
  EXPECT_EQ(classify_contributions(c).classification, Classification::Inconclusive);
}

TEST(Classifier, PartialOuterShellExcluded) {
  // shell 10 covers [1024, 2048) but the data stops at 1500: a large value there must not flip the verdict
  std::vector<Contribution> c;
  for (int j = 0; j < 10; ++j) c.push_back({std::ldexp(1.5, j), std::ldexp(1.0, -j)});
  c.push_back({1400.0, 100.0});
  const auto v = classify_contributions(c, 1500.0);
  EXPECT_TRUE(v.shells.back().partial);
  EXPECT_EQ(v.classification, Classification::Convergent);
}

TEST(PoissonPrimitives, AtanDiffMatchesQuadrature) {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{-5, 7}, {0.5, 3}, {-1e3, -2}, {-0.3, 0.4}, {2, 1e4}}) {
    const double q = integrate(a, b, [](double x) { return 1.0 / (1.0 + x * x); });
    EXPECT_NEAR(atan_diff(a, b), q, 1e-9);
  }
}

TEST(PoissonPrimitives, Log1pSqDiffMatchesQuadrature) {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 4}, {-3, -1}, {-2, 5}}) {
    const double q = integrate(a, b, [](double x) { return 2.0 * x / (1.0 + x * x); });
    EXPECT_NEAR(log1p_sq_diff(a, b), q, 1e-8);
  }
}

TEST(PoissonPrimitives, SplitDyadicCuts) {
  std::vector<double> cuts;
  split_dyadic(-5, 9, cuts);
  EXPECT_EQ(cuts, (std::vector<double>{-5, -4, -2, -1, 0, 1, 2, 4, 8, 9}));
  split_dyadic(3, 3.5, cuts);
  EXPECT_EQ(cuts, (std::vector<double>{3, 3.5}));
}

TEST(Parallel, ResultIndependentOfThreadCount) {
  auto run = [](unsigned t) {
    parallel::set_threads(t);
    std::vector<double> out(1000);
    parallel::for_each_index(out.size(), [&](std::size_t i) { out[i] = std::sin(double(i)) * std::exp(-1e-3 * i); });
    CompensatedSum s;
    for (double x : out) s.add(x);
    return s.value();
  };
  const double one = run(1), eight = run(8);
  parallel::set_threads(0);
  EXPECT_EQ(one, eight);
}

TEST(Parallel, ExceptionsPropagate) {
  parallel::set_threads(4);
  EXPECT_THROW(parallel::for_each_index(100,
                                        [](std::size_t i) {
                                          if (i == 57) throw Error(ErrorCode::InvalidArgument, "boom");
                                        }),
               Error);
  parallel::set_threads(0);
}
