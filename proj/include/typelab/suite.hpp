#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "constructions.hpp"
#include "core.hpp"
#include "density.hpp"
#include "energy.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "typeproblem.hpp"
#include "uniformity.hpp"

namespace typelab::suite {

using io::json;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  json detail = json::object();
  double budget_seconds = 0.0;  // wall-clock budget, enforced by the acceptance driver
};

struct OracleRun {
  ResidualCurve curve;
  bool double_ill_conditioned = false;
};

// Shared, lazily built state: the oracle scans feed two criteria.
struct Context {
  std::optional<OracleRun> koosis_z, koosis_2z, mixed;
};

inline constexpr int criterion_count = 10;  // 11 compares two whole runs and lives in the driver

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

inline CriterionResult energy_closed_form() {
  CriterionResult r{1, "energy closed form", false, json::object(), 1.0};
  double worst = 0.0;
  for (double d : {0.5, 1.0, 2.0})
    for (std::size_t D = 2; D <= 200; ++D) {
      std::vector<double> pts(D);
      for (std::size_t k = 0; k < D; ++k) pts[k] = static_cast<double>(k) / d;
      worst = std::max(worst, rel(coulomb_energy(pts), grid_energy_closed_form(D, d)));
    }
  r.detail["max_relative_error"] = io::num(worst);
  r.pass = worst <= 1e-9;
  return r;
}

inline CriterionResult deficit_positivity() {
  CriterionResult r{2, "deficit positivity and growth", false, json::object(), 30.0};
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> len(1.0, 64.0), u(0.0, 1.0);
  std::uniform_int_distribution<int> cnt(0, 80);
  double min_def = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const double L = len(rng), left = -0.5 * L + (u(rng) - 0.5) * 10.0;
    std::vector<double> pts;
    const int n = cnt(rng);
    for (int k = 0; k < n; ++k) pts.push_back(left + L * (1.0 - u(rng)));  // inside (left, left + L]
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    min_def = std::min(min_def, energy_report(pts, Interval(left, left + L)).deficit);
  }
  double max_ratio = 0.0;
  json ratios = json::object();
  for (std::size_t D : {2u, 10u, 100u, 1000u, 3000u, 10000u}) {
    std::vector<double> pts(D);
    for (std::size_t k = 0; k < D; ++k) pts[k] = static_cast<double>(k);
    const auto e = energy_report(pts, Interval(-0.5, static_cast<double>(D) - 0.5));
    const double ratio = e.deficit / (static_cast<double>(D) * static_cast<double>(D));
    ratios[std::to_string(D)] = io::num(ratio);
    max_ratio = std::max(max_ratio, ratio);
  }
  r.detail["min_random_deficit"] = io::num(min_def);
  r.detail["grid_deficit_over_delta_sq"] = ratios;
  r.pass = min_def >= 0.0 && max_ratio <= 2.0;
  return r;
}

inline CriterionResult uniformity_ground_truth() {
  CriterionResult r{3, "uniformity ground truth", true, json::object(), 10.0};
  for (double d : {0.5, 1.0, 2.0}) {
    const auto grid = arithmetic(d, 1e4);
    const bool at = check_d_uniform(grid, d).overall;
    const bool above = check_d_uniform(grid, 1.5 * d).overall;
    r.detail[io::csv_num(d)] = {{"passes_at_d", at}, {"passes_at_1.5d", above}};
    r.pass = r.pass && at && !above;
  }
  return r;
}

inline std::vector<double> density_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 60; ++k) g.push_back(0.05 * k);
  return g;
}

inline CriterionResult density_recovery() {
  CriterionResult r{4, "density recovery", true, json::object(), 60.0};
  const auto grid = density_grid();
  for (double d : {0.5, 1.0, 2.0}) {
    const double v = interior_density(arithmetic(d, 1e4), grid).value;
    r.detail["grid_" + io::csv_num(d)] = io::num(v);
    r.pass = r.pass && rel(v, d) <= 0.05;
  }
  const auto base = interior_density(arithmetic(1.0, 1e4), grid).value;
  const double p = interior_density(perturb_exponential(arithmetic(1.0, 1e4), 1.0, 7), grid).value;
  r.detail["perturbed_c1"] = io::num(p);
  r.pass = r.pass && std::abs(p - base) <= 0.05 + 1e-12;
  return r;
}

inline CriterionResult koosis_reproduction() {
  CriterionResult r{5, "Koosis reproduction", false, json::object(), 60.0};
  const auto t = type_separated(koosis_measure(1000.0));
  r.detail["type_separated"] = io::num(t.lower_bound_type);
  r.detail["two_sided"] = t.two_sided;
  r.pass = rel(t.lower_bound_type, 2.0 * std::numbers::pi) <= 0.10;
  return r;
}

inline CriterionResult rescale_invariance() {
  CriterionResult r{6, "polynomial-rescale invariance", true, json::object(), 120.0};
  const auto mu = koosis_measure(1000.0);
  const double step = 2.0 * std::numbers::pi * 0.025;
  const double base = type_discrete(mu).lower_bound_type;
  r.detail["alpha_none"] = io::num(base);
  for (double a : {1.0, 2.0, 4.0}) {
    const double v = type_discrete(polynomial_rescale(mu, a)).lower_bound_type;
    r.detail["alpha_" + io::csv_num(a)] = io::num(v);
    r.pass = r.pass && std::abs(v - base) <= step + 1e-9;
  }
  const double twice = type_discrete(polynomial_rescale(polynomial_rescale(mu, 4.0), 4.0)).lower_bound_type;
  const double once = type_discrete(polynomial_rescale(mu, 8.0)).lower_bound_type;
  r.detail["alpha_4_twice"] = io::num(twice);
  r.detail["alpha_8"] = io::num(once);
  r.pass = r.pass && std::abs(twice - once) <= step + 1e-9;
  return r;
}

inline std::vector<Interval> dyadic_support(bool long_gaps) {
  std::vector<Interval> s;
  for (int n = 1; n <= 16; ++n) {
    const double lo = std::ldexp(1.0, n), hi = std::ldexp(1.0, n + 1);
    s.emplace_back(long_gaps ? lo + 0.5 * lo : lo + n, hi);
  }
  return s;
}

inline DensitySamples sampled(double T, double h, double (*logw)(double)) {
  DensitySamples s;
  s.start = -T;
  s.step = h;
  const auto n = static_cast<std::size_t>(std::llround(2.0 * T / h)) + 1;
  for (std::size_t i = 0; i < n; ++i) s.log_values.push_back(logw(s.position(i)));
  return s;
}

inline CriterionResult classical_checkers() {
  CriterionResult r{7, "classical checkers", true, json::object(), 10.0};
  const auto expect = [&](const std::string& key, const TheoremVerdict& v, Conclusion want) {
    r.detail[key] = std::string(to_string(v.conclusion));
    r.pass = r.pass && v.conclusion == want;
  };
  {
    std::vector<double> pos, lm;
    for (int n = 0; n <= 40; ++n) {
      pos.push_back(n);
      lm.push_back(-std::exp(static_cast<double>(n)));
    }
    expect("levinson_double_exponential", levinson_check(DiscreteMeasure::from_log_masses(pos, lm, 40.0)),
           Conclusion::MuMustVanish);
  }
  expect("levinson_polynomial", levinson_check(koosis_measure(1000.0)), Conclusion::Inconclusive);
  const auto long_gaps = dyadic_support(true), short_gaps = dyadic_support(false);
  expect("beurling_long_gaps", beurling_gap_check(std::span<const Interval>(long_gaps)), Conclusion::MuMustVanish);
  expect("beurling_integers", beurling_gap_check(arithmetic(1.0, 1000.0)), Conclusion::Inconclusive);
  expect("beurling_short_gaps", beurling_gap_check(std::span<const Interval>(short_gaps)), Conclusion::Inconclusive);
  expect("krein_cauchy", krein_lm_check(sampled(1000.0, 0.5, [](double x) { return -std::log1p(x * x); }), true),
         Conclusion::TypeInfinite);
  expect("krein_exponential", krein_lm_check(sampled(1000.0, 0.5, [](double x) { return -std::abs(x); }), true),
         Conclusion::TypeZero);
  return r;
}

inline OracleRun oracle_run(const DiscreteMeasure& mu, const std::vector<double>& grid) {
  OracleRun run;
  try {
    run.curve = residual_scan(mu, grid);
    return run;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IllConditioned) throw;
    run.double_ill_conditioned = true;
  }
  OracleOptions ext;
  ext.extended_precision = true;
  run.curve = residual_scan(mu, grid, ext);
  return run;
}

inline DiscreteMeasure oracle_koosis(double d) { return koosis_measure(60.0 / d + 0.5, d); }

inline DiscreteMeasure mixed_measure(double T) {
  return weighted_measure(arithmetic(1.0, T), weight_families("mixed", {{"beta", 2.0}, {"c", 1.0}}));
}

inline const OracleRun& koosis_z(Context& ctx) {
  if (!ctx.koosis_z) ctx.koosis_z = oracle_run(oracle_koosis(1.0), linear_grid(0.4, 4.0 * std::numbers::pi, 32));
  return *ctx.koosis_z;
}

inline const OracleRun& koosis_2z(Context& ctx) {
  if (!ctx.koosis_2z) ctx.koosis_2z = oracle_run(oracle_koosis(0.5), linear_grid(0.2, 2.0 * std::numbers::pi, 32));
  return *ctx.koosis_2z;
}

inline const OracleRun& mixed(Context& ctx) {
  if (!ctx.mixed) ctx.mixed = oracle_run(mixed_measure(60.5), linear_grid(0.4, 4.0 * std::numbers::pi, 32));
  return *ctx.mixed;
}

inline json knee_json(const OracleRun& run) {
  json j = {{"double_ill_conditioned", run.double_ill_conditioned},
            {"knee_strength", io::num(run.curve.knee_strength)}};
  j["knee"] = run.curve.knee ? io::num(*run.curve.knee) : json(nullptr);
  return j;
}

inline CriterionResult oracle_knee(Context& ctx) {
  CriterionResult r{8, "oracle knee", false, json::object(), 1800.0};
  const auto pts = oracle_run(oracle_koosis(1.0), {std::numbers::pi, 3.0 * std::numbers::pi});
  const double ratio = pts.curve.sigma_min[0] / pts.curve.sigma_min[1];
  const auto& z = koosis_z(ctx);
  const auto& z2 = koosis_2z(ctx);
  r.detail["sigma_ratio_pi_3pi"] = io::num(ratio);
  r.detail["koosis_z"] = knee_json(z);
  r.detail["koosis_2z"] = knee_json(z2);
  const double pi = std::numbers::pi;
  r.pass = ratio <= 1e-2 && z.curve.knee && rel(*z.curve.knee, 2.0 * pi) <= 0.25 && z2.curve.knee &&
           rel(*z2.curve.knee, pi) <= 0.25;
  return r;
}

inline CriterionResult oracle_cross_validation(Context& ctx) {
  CriterionResult r{9, "oracle/formula cross-validation", true, json::object(), 1800.0};
  const auto check = [&](const std::string& key, const OracleRun& run, const DiscreteMeasure& formula_measure) {
    const double t = type_separated(formula_measure).lower_bound_type;
    json j = knee_json(run);
    j["type_separated"] = io::num(t);
    const bool ok = run.curve.knee && t > 0 && rel(*run.curve.knee, t) <= 0.25;
    j["relative_gap"] = run.curve.knee && t > 0 ? io::num(rel(*run.curve.knee, t)) : json(nullptr);
    j["pass"] = ok;
    r.detail[key] = j;
    r.pass = r.pass && ok;
  };
  check("koosis_z", koosis_z(ctx), koosis_measure(1000.0));
  check("koosis_2z", koosis_2z(ctx), koosis_measure(1000.0, 0.5));
  check("mixed", mixed(ctx), mixed_measure(1000.0));
  return r;
}

inline CriterionResult constructions_check() {
  CriterionResult r{10, "constructions", false, json::object(), 60.0};
  const auto part = alternating_partition(1.0, 2.0, 1000.0);
  const auto ben = benedicks_sequence(part, 0.5);
  const auto rep = check_d_uniform(ben.sequence, 0.5);
  r.detail["benedicks_points"] = static_cast<std::uint64_t>(ben.sequence.size());
  r.detail["benedicks_uniform"] = rep.overall;
  r.detail["benedicks_max_deviation"] = io::num(rep.density_verdict.max_deviation);

  // B: a separated sequence with varying gaps; w(n) shrinks like 1/(1+|n|)
  std::vector<double> b;
  for (int n = -100; n <= 100; ++n) b.push_back(3.0 * n + std::sin(static_cast<double>(n)));
  const RealSequence B(b, 310.0, "auxiliary_base");
  std::vector<double> w;
  for (int n = -100; n <= 100; ++n) w.push_back(1.0 / (1.0 + std::abs(n)));
  const double eps = 0.25, L = 2.0;
  const auto aux = auxiliary_sequence(B, w, eps, L);
  double gap = 0.0, width = 0.0;
  for (std::size_t i = 1; i < aux.A.size(); ++i) gap = std::max(gap, aux.A[i] - aux.A[i - 1]);
  for (std::size_t i = 0; i < w.size(); ++i) width = std::max(width, aux.pair_width[i] / w[i]);
  r.detail["auxiliary_max_gap"] = io::num(gap);
  r.detail["auxiliary_max_width_ratio"] = io::num(width);
  r.detail["auxiliary_conclusion1"] = aux.conclusion1;
  r.detail["auxiliary_conclusion3"] = aux.conclusion3;
  r.pass = rep.overall && aux.conclusion1 && aux.conclusion3 && gap < 1.0 / eps && width <= 1.0;
  return r;
}

inline CriterionResult run_criterion(int id, Context& ctx) {
  switch (id) {
    case 1: return energy_closed_form();
    case 2: return deficit_positivity();
    case 3: return uniformity_ground_truth();
    case 4: return density_recovery();
    case 5: return koosis_reproduction();
    case 6: return rescale_invariance();
    case 7: return classical_checkers();
    case 8: return oracle_knee(ctx);
    case 9: return oracle_cross_validation(ctx);
    case 10: return constructions_check();
  }
  throw Error(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
}

inline json to_json(const CriterionResult& c) {
  return {{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
}

/// Timing-free report: identical across thread counts.
inline json report(const std::vector<CriterionResult>& results) {
  json arr = json::array();
  std::size_t passed = 0;
  for (const auto& c : results) {
    arr.push_back(to_json(c));
    passed += c.pass;
  }
  return {{"criteria", arr}, {"passed", static_cast<std::uint64_t>(passed)},
          {"total", static_cast<std::uint64_t>(results.size())}};
}

inline std::vector<CriterionResult> run(const std::vector<int>& ids) {
  Context ctx;
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run_criterion(id, ctx));
  return out;
}

inline std::vector<int> all_ids() {
  std::vector<int> ids;
  for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
  return ids;
}

}  // namespace typelab::suite
