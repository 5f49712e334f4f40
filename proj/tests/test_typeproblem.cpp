#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include <typelab/constructions.hpp>
#include <typelab/typeproblem.hpp>

#include "test_util.hpp"

using namespace typelab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStep = 2 * kPi * 0.025;  // one default grid step in type units

DiscreteMeasure on_grid(double T, double (*log_w)(long)) {
  std::vector<double> pos, lm;
  for (long n = -static_cast<long>(T); n <= static_cast<long>(T); ++n) {
    pos.push_back(static_cast<double>(n));
    lm.push_back(log_w(n));
  }
  return DiscreteMeasure::from_log_masses(pos, lm, T);
}

double poly2(long n) { return -2.0 * std::log1p(static_cast<double>(n) * static_cast<double>(n)); }
double poly1(long n) { return -std::log1p(static_cast<double>(n) * static_cast<double>(n)); }
double expo(long n) { return -std::abs(static_cast<double>(n)); }
double expo2(long n) { return -2.0 * std::abs(static_cast<double>(n)); }
double gauss(long n) { return -static_cast<double>(n) * static_cast<double>(n); }
double mixed(long n) { return n % 2 == 0 ? expo(n) : poly2(n); }

std::vector<Interval> dyadic_support(bool long_gaps, int top = 16) {
  std::vector<Interval> v;
  for (int n = 1; n <= top; ++n) {
    const double p = std::ldexp(1.0, n);
    v.emplace_back(long_gaps ? p + p / 2 : p + n, 2 * p);
  }
  return v;
}

}  // namespace

TEST(TypeDiscrete, KoosisNearTwoPi) {
  const auto est = type_discrete(koosis_measure(500));
  EXPECT_NEAR(est.lower_bound_type, 2 * kPi, 0.1 * 2 * kPi);
  EXPECT_FALSE(est.two_sided);
}

TEST(TypeDiscrete, CertificateIsConsistent) {
  const auto est = type_discrete(koosis_measure(500));
  ASSERT_TRUE(est.subsequence && est.weight_sum && est.report);
  EXPECT_TRUE(est.weight_sum->convergent());
  EXPECT_TRUE(check_d_uniform(*est.subsequence, est.lower_bound_type / (2 * kPi)).overall);
  // the certificate is drawn from the support
  const auto s = koosis_measure(500).support();
  for (double x : est.subsequence->points())
    EXPECT_TRUE(std::binary_search(s.values().begin(), s.values().end(), x));
}

TEST(TypeDiscrete, GaussianWeightsGiveZero) {
  EXPECT_LE(type_discrete(on_grid(500, gauss)).lower_bound_type, kStep + 1e-12);
}

TEST(TypeDiscrete, ScaledGridScalesType) {
  const double d = 0.5;
  const auto est = type_discrete(koosis_measure(1000, d));
  EXPECT_NEAR(est.lower_bound_type, 2 * kPi * d, 0.1 * 2 * kPi * d);
}

TEST(TypeDiscrete, NeedsTwoAtoms) {
  const auto one = DiscreteMeasure::from_masses({0.0}, {1.0}, 10.0);
  EXPECT_EQ(code_of([&] { type_discrete(one); }), ErrorCode::InsufficientData);
}

TEST(TypeSeparated, KoosisTwoSided) {
  const auto est = type_separated(koosis_measure(500));
  EXPECT_TRUE(est.two_sided);
  EXPECT_NEAR(est.lower_bound_type, 2 * kPi, 0.1 * 2 * kPi);
}

TEST(TypeSeparated, ExponentialWeightsGiveZero) {
  EXPECT_LE(type_separated(on_grid(500, expo)).lower_bound_type, kStep + 1e-12);
}

TEST(TypeSeparated, MixedWeightsGivePi) {
  EXPECT_NEAR(type_separated(on_grid(1000, mixed)).lower_bound_type, kPi, 0.1 * kPi);
}

TEST(TypeSeparated, RejectsClusteredSupport) {
  std::vector<double> pos{-3, -2, -1, 0, 1e-9, 1, 2, 3};
  const auto mu = DiscreteMeasure::from_masses(pos, std::vector<double>(pos.size(), 1.0), 5.0);
  EXPECT_EQ(code_of([&] { type_separated(mu); }), ErrorCode::NotSeparated);
}

TEST(TypeSeparated, AgreesWithFilteredInteriorDensity) {
  const auto mu = on_grid(1000, mixed);
  std::vector<double> gr;
  for (int k = 1; k <= 80; ++k) gr.push_back(0.025 * k);
  const double D = interior_density(weight_filter(mu).retained, gr, false).value;
  EXPECT_NEAR(type_separated(mu).lower_bound_type, 2 * kPi * D, 0.1 * 2 * kPi * D);
}

TEST(Suffgen, KoosisOnGrid) {
  const auto v = suffgen_bound(koosis_measure(1000), arithmetic(1.0, 1000), 1.0);
  EXPECT_TRUE(v.applicable);
  EXPECT_EQ(v.conclusion, Conclusion::TypeAtLeast);
  EXPECT_NEAR(v.bound, 2 * kPi, 1e-12);
}

TEST(Suffgen, EvenMassesLeaveEmptyNeighbourhoods) {
  const auto mu = weighted_measure(arithmetic(0.5, 1000), weight_families("polynomial"));
  EXPECT_EQ(code_of([&] { suffgen_bound(mu, arithmetic(1.0, 1000), 1.0); }), ErrorCode::EmptyNeighborhood);
}

TEST(Suffgen, ExponentialMassesInconclusive) {
  const auto v = suffgen_bound(on_grid(1000, expo), arithmetic(1.0, 1000), 1.0);
  EXPECT_EQ(v.conclusion, Conclusion::Inconclusive);
  EXPECT_TRUE(v.evidence.at("log_mass_sum").divergent());
}

TEST(Suffgen, RequiresUniformA) {
  EXPECT_EQ(code_of([] { suffgen_bound(koosis_measure(1000), arithmetic(1.0, 1000), 2.0); }),
            ErrorCode::NotUniform);
}

TEST(Beurling, LongGapsForceVanishing) {
  const auto v = beurling_gap_check(dyadic_support(true));
  EXPECT_EQ(v.conclusion, Conclusion::MuMustVanish);
  EXPECT_TRUE(v.applicable);
}

TEST(Beurling, GridInconclusive) {
  EXPECT_EQ(beurling_gap_check(arithmetic(1.0, 1000)).conclusion, Conclusion::Inconclusive);
}

TEST(Beurling, ShortGapsInconclusive) {
  const auto v = beurling_gap_check(dyadic_support(false));
  EXPECT_EQ(v.conclusion, Conclusion::Inconclusive);
  EXPECT_TRUE(v.evidence.at("gap_family").convergent());
}

TEST(Beurling, VanishingImpliesZeroType) {
  std::vector<double> pts;
  for (const auto& I : dyadic_support(true, 12))
    for (double x = std::ceil(I.left + 0.5); x <= I.right; x += 1.0) pts.push_back(x);
  std::vector<double> all;
  for (double x : pts) all.push_back(-x);
  all.insert(all.end(), pts.begin(), pts.end());
  const auto s = validate_sequence(all, 8192);
  ASSERT_EQ(beurling_gap_check(s).conclusion, Conclusion::MuMustVanish);
  EXPECT_LE(type_discrete(weighted_measure(s, weight_families("polynomial"))).lower_bound_type, kStep + 1e-12);
}

TEST(Levinson, DoublyExponentialTailForcesVanishing) {
  std::vector<double> pos, lm;
  for (int n = 0; n <= 40; ++n) {
    pos.push_back(n);
    lm.push_back(-std::exp(static_cast<double>(n)));
  }
  const auto v = levinson_check(DiscreteMeasure::from_log_masses(pos, lm, 40.0));
  EXPECT_EQ(v.conclusion, Conclusion::MuMustVanish);
  EXPECT_FALSE(v.arrays.at("a_n").empty());
}

TEST(Levinson, PolynomialInconclusive) {
  const auto v = levinson_check(koosis_measure(1000));
  EXPECT_EQ(v.conclusion, Conclusion::Inconclusive);
  EXPECT_TRUE(v.evidence.at("log_tail_integral").convergent());
}

TEST(Levinson, ThresholdsFollowThePowersOfThree) {
  const auto mu = koosis_measure(1000);
  const auto v = levinson_check(mu);
  const auto& a = v.arrays.at("a_n");
  const auto& W = v.arrays.at("W");
  ASSERT_EQ(a.size(), W.size());
  double total = 0;
  for (const auto& at : mu.atoms()) total += at.mass;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(W[k], std::ldexp(1.0, static_cast<int>(k) + 1));
    if (k > 0) EXPECT_GE(a[k], a[k - 1]);
    double tail = 0;
    for (const auto& at : mu.atoms()) tail += at.position > a[k] ? at.mass : 0.0;
    EXPECT_LE(tail / total, std::pow(3.0, -static_cast<double>(k + 1)) * (1 + 1e-9));
  }
}

TEST(Levinson, SingleAtomForcesVanishing) {
  const auto v = levinson_check(DiscreteMeasure::from_masses({0.0}, {1.0}, 10.0));
  EXPECT_EQ(v.conclusion, Conclusion::MuMustVanish);
}

TEST(Hybrid, PolynomialMassOnLongFamilyInconclusive) {
  const auto mu = koosis_measure(4096);
  std::vector<Interval> fam;
  for (int n = 1; n <= 11; ++n) {
    const double p = std::ldexp(1.0, n);
    fam.emplace_back(p, p + p / 2);
  }
  EXPECT_EQ(hybrid_check(mu, fam).conclusion, Conclusion::Inconclusive);
}

TEST(Hybrid, MeasureVanishingOnLongFamily) {
  std::vector<Interval> fam;
  for (int n = 1; n <= 11; ++n) {
    const double p = std::ldexp(1.0, n);
    fam.emplace_back(p, p + p / 2);
  }
  std::vector<double> pos, lm;
  for (long n = -4096; n <= 4096; ++n) {
    bool inside = false;
    for (const auto& I : fam) inside = inside || I.contains(static_cast<double>(n));
    if (inside) continue;
    pos.push_back(static_cast<double>(n));
    lm.push_back(poly2(n));
  }
  const auto v = hybrid_check(DiscreteMeasure::from_log_masses(pos, lm, 4096.0), fam);
  EXPECT_EQ(v.conclusion, Conclusion::MuMustVanish);
  EXPECT_EQ(v.data.at("empty_intervals"), 11.0);
}

TEST(Hybrid, SquaredLengthLogMass) {
  std::vector<Interval> fam;
  std::vector<double> pos, lm;
  for (int n = 1; n <= 14; ++n) {
    const double p = std::ldexp(1.0, n);
    fam.emplace_back(p, p + p / 2);
    pos.push_back(p + p / 4);
    lm.push_back(-(p / 2) * (p / 2));
  }
  EXPECT_EQ(hybrid_check(DiscreteMeasure::from_log_masses(pos, lm, 32768.0), fam).conclusion,
            Conclusion::MuMustVanish);
}

TEST(Hybrid, OverlapRejected) {
  const std::vector<Interval> fam{{0, 2}, {1, 3}};
  EXPECT_EQ(code_of([&] { hybrid_check(koosis_measure(10), fam); }), ErrorCode::OverlappingIntervals);
}

namespace {

// log K sampled on cells growing geometrically away from 0.
WeightTable log_table(double T, double (*f)(double)) {
  std::vector<double> right{0.0};
  double x = 0.0;
  while (x < T) {
    x = std::min(T, x + std::max(1.0, x * 1e-3));
    right.push_back(x);
  }
  std::vector<double> bp;
  for (auto it = right.rbegin(); it != right.rend() - 1; ++it) bp.push_back(-*it);
  bp.insert(bp.end(), right.begin(), right.end());
  std::vector<double> lv;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) lv.push_back(f(0.5 * (bp[k] + bp[k + 1])));
  return WeightTable::from_log(bp, lv);
}

double slow_linear(double x) { return std::abs(x) / (1 + std::log1p(std::abs(x))); }
double log_quadratic(double x) { return std::log1p(x * x); }

}  // namespace

TEST(DeBranges, SublinearLogWeightForcesVanishing) {
  const double T = std::ldexp(1.0, 40);
  const auto K = log_table(T, slow_linear);
  std::vector<double> pos, lm;
  for (long n = -60; n <= 60; ++n) {
    pos.push_back(static_cast<double>(n));
    lm.push_back(expo2(n));
  }
  const auto v = debranges_check(K, DiscreteMeasure::from_log_masses(pos, lm, T), 1.0);
  EXPECT_EQ(v.data.at("continuity_ok"), 1.0);
  EXPECT_EQ(v.conclusion, Conclusion::MuMustVanish);
}

TEST(DeBranges, PolynomialWeightInconclusive) {
  const auto K = log_table(1e6, log_quadratic);
  const auto v = debranges_check(K, koosis_measure(1000), 2.0);
  EXPECT_EQ(v.conclusion, Conclusion::Inconclusive);
  EXPECT_TRUE(v.evidence.at("log_K_poisson").convergent());
}

TEST(DeBranges, JumpingWeightNotApplicable) {
  std::vector<double> bp, lv;
  for (int k = -100; k <= 100; ++k) bp.push_back(k);
  for (int k = -100; k < 100; ++k) lv.push_back(k % 2 == 0 ? 0.0 : static_cast<double>(k) * k);
  const auto v = debranges_check(WeightTable::from_log(bp, lv), koosis_measure(99), 1.0);
  EXPECT_FALSE(v.applicable);
  EXPECT_EQ(v.data.at("continuity_ok"), 0.0);
}

TEST(DeBranges, WeightBelowOneRejected) {
  EXPECT_EQ(code_of([] { WeightTable({-1.0, 0.0, 1.0}, {0.5, 2.0}); }), ErrorCode::WeightBelowOne);
}

namespace {

DensitySamples sampled(double (*log_w)(double)) {
  DensitySamples s;
  s.start = -1000;
  s.step = 0.5;
  for (int i = 0; i <= 4000; ++i) s.log_values.push_back(log_w(s.position(static_cast<std::size_t>(i))));
  return s;
}

double cauchy(double x) { return -std::log1p(x * x); }
double laplace(double x) { return -std::abs(x); }
double blocks(double x) { return static_cast<long>(std::floor(x)) % 2 == 0 ? -std::abs(x) : 0.0; }

}  // namespace

TEST(Krein, SummableLogDensityGivesInfiniteType) {
  EXPECT_EQ(krein_lm_check(sampled(cauchy), false).conclusion, Conclusion::TypeInfinite);
}

TEST(Krein, MonotoneUnsummableGivesZero) {
  EXPECT_EQ(krein_lm_check(sampled(laplace), true).conclusion, Conclusion::TypeZero);
  EXPECT_EQ(krein_lm_check(sampled(laplace), false).conclusion, Conclusion::Inconclusive);
}

TEST(Krein, NonMonotoneInconclusive) {
  EXPECT_EQ(krein_lm_check(sampled(blocks), true).conclusion, Conclusion::Inconclusive);
}

TEST(BorichevSodin, Reflexive) {
  const auto mu = koosis_measure(200);
  const auto v = borichev_sodin_compare(mu, mu, 0.5, 1.0, 0.0);
  EXPECT_TRUE(v.applicable);
  EXPECT_EQ(v.conclusion, Conclusion::TypeAtMostReference);
}

TEST(BorichevSodin, ShiftedAtomsStayInside) {
  const double delta = 0.1;
  const auto nu = koosis_measure(200);
  std::vector<double> pos, lm;
  for (const auto& a : nu.atoms()) {
    pos.push_back(a.position + std::exp(-2 * delta * std::abs(a.position)) * 0.5);
    lm.push_back(a.log_mass);
  }
  const auto mu = DiscreteMeasure::from_log_masses(pos, lm, 201.0);
  EXPECT_EQ(borichev_sodin_compare(mu, nu, delta, 1.0, 0.0).conclusion, Conclusion::TypeAtMostReference);
}

TEST(BorichevSodin, HeavyIsolatedAtomFails) {
  const double x0 = 50.5, delta = 0.2, C = 1.0, l = 1.0;
  ASSERT_LT(std::exp(-2 * delta * x0), 1.0 / (C * std::pow(1 + x0, l)));
  const auto nu = koosis_measure(100);
  const auto mu = DiscreteMeasure::from_masses({-10.0, x0}, {1e-9, 1.0}, 100.0);
  const auto v = borichev_sodin_compare(mu, nu, delta, C, l);
  EXPECT_FALSE(v.applicable);
  ASSERT_FALSE(v.arrays.at("violations").empty());
  EXPECT_EQ(v.arrays.at("violations").back(), x0);
}

TEST(BorichevSodin, OrderingMatchesTypeEstimates) {
  const auto nu = koosis_measure(500);
  const auto mu = on_grid(500, mixed);
  ASSERT_EQ(borichev_sodin_compare(mu, nu, 0.5, 6.0, 0.0).conclusion, Conclusion::TypeAtMostReference);
  EXPECT_LE(type_discrete(mu).lower_bound_type, type_discrete(nu).lower_bound_type + kStep + 1e-12);
}

TEST(DuffinSchaeffer, CauchyMassesHold) {
  const auto v = duffin_schaeffer_check(on_grid(1000, poly1), 1.0, 0.5);
  EXPECT_EQ(v.conclusion, Conclusion::TypeAtLeast);
  EXPECT_NEAR(v.bound, kPi, 1e-12);
}

TEST(DuffinSchaeffer, NarrowWindowFails) {
  const auto v = duffin_schaeffer_check(on_grid(1000, poly1), 0.4, 0.5);
  EXPECT_FALSE(v.applicable);
  EXPECT_FALSE(v.arrays.at("violations").empty());
}

TEST(DuffinSchaeffer, ExponentialMassesFailForAnyConstant) {
  for (double c : {1e-3, 1e-9, 1e-30})
    EXPECT_FALSE(duffin_schaeffer_check(on_grid(1000, expo), 1.0, c).applicable) << c;
}

TEST(DuffinSchaeffer, PassImpliesTypeBound) {
  const auto mu = on_grid(500, poly1);
  const auto v = duffin_schaeffer_check(mu, 1.0, 0.5);
  ASSERT_TRUE(v.applicable);
  EXPECT_GE(type_discrete(mu).lower_bound_type, v.bound - kStep - 1e-12);
}

TEST(BenedicksConditions, AlternatingOneTwoPasses) {
  const auto iv = alternating_partition(1.0, 2.0, 1000.0);
  const auto v = benedicks_conditions(iv, 5.0, 2.0, 1.5);
  EXPECT_TRUE(v.applicable);
  EXPECT_TRUE(v.evidence.at("condition4").convergent());
}

TEST(BenedicksConditions, ProportionalOddIntervalsDiverge) {
  // unit even intervals, odd intervals of length dist(0, I)/2
  auto side = [](double sign) {
    std::vector<Interval> out;
    double x = 0.0;
    for (int n = sign > 0 ? 0 : 1; std::abs(x) < 1e5; ++n) {
      const double len = n % 2 == 0 ? 1.0 : std::max(2.0, std::abs(x) / 2);
      out.push_back(sign > 0 ? Interval(x, x + len) : Interval(x - len, x));
      x += sign * len;
    }
    return out;
  };
  auto all = side(-1.0);
  std::reverse(all.begin(), all.end());
  const auto right = side(1.0);
  all.insert(all.end(), right.begin(), right.end());
  const auto v = benedicks_conditions(all, 5.0, 2.0, 1.5);
  EXPECT_FALSE(v.applicable);
  EXPECT_FALSE(v.evidence.at("condition4").convergent());
}

TEST(BenedicksConditions, ThirdConditionReportsIndex) {
  auto iv = alternating_partition(1.0, 2.0, 100.0);
  // shrink I_5 = (7, 9] to (7, 8] and grow I_6 to (8, 10]
  std::size_t zero = 0;
  while (iv[zero].left != 0.0) ++zero;
  iv[zero + 5] = Interval(7, 8);
  iv[zero + 6] = Interval(8, 10);
  const auto v = benedicks_conditions(iv, 5.0, 2.0, 1.5);
  EXPECT_FALSE(v.applicable);
  EXPECT_EQ(v.data.at("condition3"), 0.0);
  EXPECT_EQ(v.data.at("condition3_failed_index"), 5.0);
}

TEST(BenedicksConditions, GapInTilingRejected) {
  const std::vector<Interval> iv{{0, 1}, {2, 3}};
  EXPECT_EQ(code_of([&] { benedicks_conditions(iv, 5, 2, 1.5); }), ErrorCode::BadAlternation);
}

TEST(PolynomialRescale, AlphaZeroHalves) {
  const auto mu = koosis_measure(50);
  const auto nu = polynomial_rescale(mu, 0.0);
  ASSERT_EQ(nu.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    EXPECT_DOUBLE_EQ(nu.atoms()[i].mass, mu.atoms()[i].mass / 2);
    EXPECT_NEAR(nu.atoms()[i].log_mass, mu.atoms()[i].log_mass - std::log(2.0), 1e-14);
  }
}

TEST(PolynomialRescale, TypeInvariant) {
  const auto mu = koosis_measure(500);
  const double base = type_discrete(mu).lower_bound_type;
  for (double alpha : {1.0, 2.0, 4.0})
    EXPECT_NEAR(type_discrete(polynomial_rescale(mu, alpha)).lower_bound_type, base, kStep + 1e-12) << alpha;
  const auto twice = polynomial_rescale(polynomial_rescale(mu, 4.0), 4.0);
  EXPECT_NEAR(type_discrete(twice).lower_bound_type, type_discrete(polynomial_rescale(mu, 8.0)).lower_bound_type,
              kStep + 1e-12);
}

TEST(PolynomialRescale, NegativeAlphaRejected) {
  EXPECT_EQ(code_of([] { polynomial_rescale(koosis_measure(10), -1.0); }), ErrorCode::InvalidArgument);
}
