#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "density.hpp"
#include "partitions.hpp"
#include "uniformity.hpp"

namespace typelab {

enum class Conclusion { TypeZero, TypeAtLeast, TypeInfinite, MuMustVanish, Inconclusive, TypeAtMostReference };

inline std::string_view to_string(Conclusion c) {
  switch (c) {
    case Conclusion::TypeZero: return "type_zero";
    case Conclusion::TypeAtLeast: return "type_at_least";
    case Conclusion::TypeInfinite: return "type_infinite";
    case Conclusion::MuMustVanish: return "mu_must_vanish";
    case Conclusion::Inconclusive: return "inconclusive";
    case Conclusion::TypeAtMostReference: return "type_at_most_reference";
  }
  return "inconclusive";
}

struct TheoremVerdict {
  std::string theorem;
  bool applicable = false;
  Conclusion conclusion = Conclusion::Inconclusive;
  double bound = std::numeric_limits<double>::quiet_NaN();  // x in type_at_least(x)
  std::map<std::string, SumVerdict> evidence;
  std::map<std::string, double> data;
  std::map<std::string, std::vector<double>> arrays;
  std::vector<std::string> notes;
};

struct TypeEstimate {
  double lower_bound_type = 0.0;
  bool infinite = false;
  bool two_sided = false;
  std::string method;
  double d = 0.0;
  std::size_t retained_atoms = 0;
  std::optional<RealSequence> subsequence;
  std::optional<SumVerdict> weight_sum;
  std::optional<UniformityReport> report;
  SumVerdict counting_growth;
  std::vector<DensityScanRow> diagnostics;
};

struct TypeOptions {
  std::vector<double> d_grid;            // empty: 0.025, 0.05, ..., 2.0
  double separation_fraction = 1e-3;     // NotSeparated below this fraction of the median gap
};

inline std::vector<double> default_d_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 80; ++k) g.push_back(0.025 * k);
  return g;
}

/// Per-shell budget for max(0, -log w(n))/(1+n^2); its shell sums form a convergent series.
inline double weight_budget(long n) {
  const long a = std::labs(n);
  const int j = a < 1 ? 0 : std::ilogb(static_cast<double>(a));
  return 2.0 * (1.0 + j) * (1.0 + j) / std::ldexp(1.0, 2 * j);
}

inline double weight_cost(double log_w, long n) {
  return std::max(0.0, -log_w) / (1.0 + static_cast<double>(n) * static_cast<double>(n));
}

struct WeightFilterResult {
  RealSequence retained = RealSequence::empty(1.0);
  std::vector<long> index;       // full-sequence index of each retained atom
  std::vector<double> log_mass;  // of each retained atom
};

inline WeightFilterResult weight_filter(const DiscreteMeasure& mu) {
  WeightFilterResult r;
  std::vector<double> pts;
  const auto origin = static_cast<long>(mu.origin_index());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const long n = static_cast<long>(i) - origin;
    const auto& a = mu.atoms()[i];
    if (weight_cost(a.log_mass, n) <= weight_budget(n)) {
      pts.push_back(a.position);
      r.index.push_back(n);
      r.log_mass.push_back(a.log_mass);
    }
  }
  r.retained = RealSequence(std::move(pts), mu.window(), mu.tag() + "|filtered");
  return r;
}

/// Poisson integral of log(|n_B(x)|+1), piecewise exact.
inline SumVerdict counting_growth(const RealSequence& seq) {
  const double T = seq.window();
  std::vector<double> cuts{-T, 0.0, T};
  for (double x : seq.points())
    if (std::abs(x) < T && x != 0.0) cuts.push_back(x);
  std::vector<double> tmp;
  std::vector<double> all;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Contribution> c;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double n = static_cast<double>(std::labs(counting_function(seq, 0.5 * (cuts[k] + cuts[k + 1]))));
    split_dyadic(cuts[k], cuts[k + 1], tmp);
    for (std::size_t i = 0; i + 1 < tmp.size(); ++i)
      if (tmp[i + 1] > tmp[i])
        c.push_back({0.5 * (tmp[i] + tmp[i + 1]), std::log1p(n) * atan_diff(tmp[i], tmp[i + 1])});
  }
  return classify_contributions(c, T);
}

namespace detail {

inline TypeEstimate type_scan(const DiscreteMeasure& mu, const TypeOptions& opt, bool with_energy) {
  require(mu.size() >= 2, ErrorCode::InsufficientData, "measure needs at least 2 atoms");
  auto grid = opt.d_grid.empty() ? default_d_grid() : opt.d_grid;
  require_grid(grid);
  TypeEstimate est;
  const auto support = mu.support();
  est.counting_growth = counting_growth(support);
  const auto f = weight_filter(mu);
  est.retained_atoms = f.retained.size();
  if (f.retained.empty()) return est;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const double d = *it;
    auto a = thin_and_check(f.retained, d, with_energy);
    std::string reason = a.reason;
    bool ok = a.passed;
    SumVerdict ws;
    if (ok) {
      std::vector<Term> terms;
      const auto& sub = a.selection.subsequence;
      std::size_t j = 0;
      for (double x : sub.points()) {
        while (f.retained[j] != x) ++j;
        terms.push_back({static_cast<double>(f.index[j]), std::max(0.0, -f.log_mass[j])});
      }
      double cov = 0.0;
      for (long n : f.index) cov = std::max(cov, static_cast<double>(std::labs(n)));
      ws = poisson_tail_sum(terms, cov);
      if (!ws.convergent()) {
        ok = false;
        reason = "weight sum " + std::string(to_string(ws.classification));
      }
    }
    est.diagnostics.push_back({d, ok, a.attempt, reason});
    if (ok) {
      est.d = d;
      est.lower_bound_type = 2.0 * std::numbers::pi * d;
      est.subsequence = a.selection.subsequence;
      est.weight_sum = ws;
      est.report = a.report;
      break;
    }
  }
  return est;
}

}  // namespace detail

/// 2 pi times the largest grid d with a d-uniform subsequence of summable log-weight (lower bound).
inline TypeEstimate type_discrete(const DiscreteMeasure& mu, const TypeOptions& opt = {}) {
  auto est = detail::type_scan(mu, opt, true);
  est.method = "discrete";
  return est;
}

inline double min_gap(const RealSequence& s) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.size(); ++i) g = std::min(g, s[i] - s[i - 1]);
  return g;
}

/// Separated support: energy condition skipped, estimate is two-sided.
inline TypeEstimate type_separated(const DiscreteMeasure& mu, const TypeOptions& opt = {}) {
  require(mu.size() >= 2, ErrorCode::InsufficientData, "measure needs at least 2 atoms");
  const auto s = mu.support();
  std::vector<double> gaps;
  for (std::size_t i = 1; i < s.size(); ++i) gaps.push_back(s[i] - s[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
  const double median = gaps[gaps.size() / 2];
  require(min_gap(s) >= opt.separation_fraction * median, ErrorCode::NotSeparated,
          "minimum gap below separation threshold");
  auto est = detail::type_scan(mu, opt, false);
  est.method = "separated";
  est.two_sided = true;
  return est;
}

/// Neighbourhood masses around a d-uniform A; convergent log sum gives type >= 2 pi d.
inline TheoremVerdict suffgen_bound(const DiscreteMeasure& mu, const RealSequence& A, double d) {
  TheoremVerdict v;
  v.theorem = "suffgen";
  const auto rep = check_d_uniform(A, d);
  require(rep.overall, ErrorCode::NotUniform, "A is not d-uniform");
  require(A.size() >= 3, ErrorCode::InsufficientData, "A needs interior points");
  std::vector<Term> terms;
  const auto origin = static_cast<long>(A.origin_index());
  double cov = 0.0;
  for (std::size_t i = 1; i + 1 < A.size(); ++i) {
    const double eps = std::min(A[i + 1] - A[i], A[i] - A[i - 1]) / 3.0;
    const double lm = mu.log_mass_open(A[i] - eps, A[i] + eps);
    require(std::isfinite(lm), ErrorCode::EmptyNeighborhood, "no mass near " + std::to_string(A[i]));
    const long n = static_cast<long>(i) - origin;
    terms.push_back({static_cast<double>(n), std::max(0.0, -lm)});
    cov = std::max(cov, static_cast<double>(std::labs(n)));
  }
  const auto sv = poisson_tail_sum(terms, cov);
  v.evidence["log_mass_sum"] = sv;
  v.data["d"] = d;
  v.data["dropped_boundary_points"] = 2;
  if (sv.convergent()) {
    v.applicable = true;
    v.conclusion = Conclusion::TypeAtLeast;
    v.bound = 2.0 * std::numbers::pi * d;
  }
  return v;
}

namespace detail {

inline TheoremVerdict gap_verdict(const std::vector<Interval>& gaps, double coverage) {
  TheoremVerdict v;
  v.theorem = "beurling_gap";
  const auto sv = classify_family(std::span<const Interval>(gaps), coverage);
  v.evidence["gap_family"] = sv;
  v.data["gaps"] = static_cast<double>(gaps.size());
  if (sv.divergent()) {
    v.applicable = true;
    v.conclusion = Conclusion::MuMustVanish;
  }
  return v;
}

}  // namespace detail

/// Complement gaps of a point support; a long gap family forces mu = 0.
inline TheoremVerdict beurling_gap_check(const RealSequence& support) {
  std::vector<Interval> gaps;
  for (std::size_t i = 1; i < support.size(); ++i) gaps.emplace_back(support[i - 1], support[i]);
  return detail::gap_verdict(gaps, support.window());
}

/// Same for a support given as a union of intervals.
inline TheoremVerdict beurling_gap_check(std::span<const Interval> support) {
  const auto v = detail::sorted_disjoint(support);
  std::vector<Interval> gaps;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i].left > v[i - 1].right) gaps.emplace_back(v[i - 1].right, v[i].left);
  return detail::gap_verdict(gaps, detail::extent(v));
}

/// Tail M(x) = mu((x, inf)); non-summable log M on R+ forces mu = 0.
inline TheoremVerdict levinson_check(const DiscreteMeasure& mu) {
  require(mu.size() >= 1, ErrorCode::InsufficientData, "measure has no atoms");
  TheoremVerdict v;
  v.theorem = "levinson";
  const double T = mu.window();
  const double log_total = mu.log_mass_range(0, mu.size());
  const std::size_t first = mu.upper_index(0.0);
  const auto& at = mu.atoms();
  // tail[k]: log mass of atoms k..end, normalised by the total mass
  std::vector<double> tail(mu.size() + 1, -std::numeric_limits<double>::infinity());
  for (std::size_t k = mu.size(); k-- > 0;) {
    const double a = tail[k + 1], b = at[k].log_mass - log_total;
    const double m = std::max(a, b);
    tail[k] = m + std::log(std::exp(a - m) + std::exp(b - m));
  }
  std::vector<double> a_n, W;
  const double ln3 = std::log(3.0);
  for (int n = 1; n <= 200; ++n) {
    double an = std::numeric_limits<double>::quiet_NaN();
    if (tail[first] <= -n * ln3) {
      an = 0.0;
    } else {
      for (std::size_t k = first; k < mu.size(); ++k)
        if (tail[k + 1] <= -n * ln3) {
          an = at[k].position;
          break;
        }
    }
    if (std::isnan(an)) break;
    a_n.push_back(an);
    W.push_back(std::ldexp(1.0, n));
    if (!a_n.empty() && an == at.back().position) break;
  }
  v.arrays["a_n"] = a_n;
  v.arrays["W"] = W;
  const double last = first < mu.size() ? at.back().position : 0.0;
  if (first >= mu.size() || last < 0.5 * T) {
    v.applicable = true;
    v.conclusion = Conclusion::MuMustVanish;
    v.notes.push_back("tail vanishes on R+ inside the window: log M = -inf on a set of positive measure");
    SumVerdict sv;
    sv.classification = Classification::Divergent;
    sv.value_truncated = std::numeric_limits<double>::infinity();
    v.evidence["log_tail_integral"] = sv;
    return v;
  }
  std::vector<Contribution> c;
  std::vector<double> cuts;
  double x = 0.0;
  for (std::size_t k = first; k < mu.size(); ++k) {
    const double lm = -tail[k];  // -log M on [x, x_k)
    split_dyadic(x, at[k].position, cuts);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i])
        c.push_back({0.5 * (cuts[i] + cuts[i + 1]), std::max(0.0, lm) * atan_diff(cuts[i], cuts[i + 1])});
    x = at[k].position;
  }
  const auto sv = classify_contributions(c, last);
  v.evidence["log_tail_integral"] = sv;
  if (sv.divergent()) {
    v.applicable = true;
    v.conclusion = Conclusion::MuMustVanish;
  }
  return v;
}

/// sum |I| min(|I|, log 1/mu(I))/(1+dist^2); divergence forces mu = 0.
inline TheoremVerdict hybrid_check(const DiscreteMeasure& mu, std::span<const Interval> intervals) {
  const auto iv = detail::sorted_disjoint(intervals);
  TheoremVerdict v;
  v.theorem = "hybrid";
  std::vector<Term> terms;
  std::size_t empty = 0;
  for (const auto& I : iv) {
    const double lm = mu.log_mass_half_open(I.left, I.right);
    if (!std::isfinite(lm)) ++empty;
    const double inner = std::max(0.0, std::min(I.length(), std::isfinite(lm) ? -lm : I.length()));
    terms.push_back({I.dist_to_origin(), I.length() * inner});
  }
  const auto sv = poisson_tail_sum(terms, detail::extent(iv));
  v.evidence["hybrid_series"] = sv;
  v.data["empty_intervals"] = static_cast<double>(empty);
  if (sv.divergent()) {
    v.applicable = true;
    v.conclusion = Conclusion::MuMustVanish;
  }
  return v;
}

/// log K uniformly continuous and Poisson-unsummable with K integrable against mu forces mu = 0.
inline TheoremVerdict debranges_check(const WeightTable& K, const DiscreteMeasure& mu, double modulus) {
  require(modulus > 0, ErrorCode::InvalidArgument, "modulus must be positive");
  for (double l : K.log_values()) require(l >= 0.0, ErrorCode::WeightBelowOne, "K below 1");
  TheoremVerdict v;
  v.theorem = "debranges";
  const auto& bp = K.breakpoints();
  const auto& lv = K.log_values();
  double worst = 0.0;
  std::ptrdiff_t worst_at = -1;
  for (std::size_t k = 0; k + 1 < lv.size(); ++k) {
    const double c0 = 0.5 * (bp[k] + bp[k + 1]), c1 = 0.5 * (bp[k + 1] + bp[k + 2]);
    const double slope = std::abs(lv[k + 1] - lv[k]) / (c1 - c0);
    if (slope > worst) {
      worst = slope;
      worst_at = static_cast<std::ptrdiff_t>(k);
    }
  }
  const bool continuous = worst <= modulus;
  v.data["max_log_slope"] = worst;
  v.data["modulus"] = modulus;
  if (!continuous) v.data["continuity_violation_at"] = bp[static_cast<std::size_t>(worst_at) + 1];

  std::vector<Contribution> km;
  for (const auto& a : mu.atoms()) km.push_back({a.position, std::exp(K.log_value_at(a.position) + a.log_mass)});
  const auto integrable = classify_contributions(km, mu.window());
  v.evidence["K_dmu"] = integrable;

  std::vector<Contribution> pc;
  std::vector<double> cuts;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    split_dyadic(bp[k], bp[k + 1], cuts);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) pc.push_back({0.5 * (cuts[i] + cuts[i + 1]), lv[k] * atan_diff(cuts[i], cuts[i + 1])});
  }
  const auto poisson = classify_contributions(pc, std::max(std::abs(bp.front()), std::abs(bp.back())));
  v.evidence["log_K_poisson"] = poisson;
  v.data["continuity_ok"] = continuous ? 1.0 : 0.0;
  if (continuous && !integrable.divergent() && poisson.divergent()) {
    v.applicable = true;
    v.conclusion = Conclusion::MuMustVanish;
  }
  return v;
}

/// Samples of a density w on a regular grid, stored as log w (-inf allowed).
struct DensitySamples {
  double start = 0.0;
  double step = 1.0;
  std::vector<double> log_values;

  double position(std::size_t i) const { return start + step * static_cast<double>(i); }
};

/// Poisson summability of log w: summable gives infinite type, monotone non-summable half gives type zero.
inline TheoremVerdict krein_lm_check(const DensitySamples& w, bool monotone_flag) {
  require(w.step > 0 && !w.log_values.empty(), ErrorCode::InvalidArgument, "need samples on a positive step");
  TheoremVerdict v;
  v.theorem = "krein_levinson_mckean";
  const double h = 0.5 * w.step;
  const double ext = std::max(std::abs(w.position(0) - h), std::abs(w.position(w.log_values.size() - 1) + h));
  std::vector<Contribution> side[2];
  bool vanishes[2] = {false, false};
  std::vector<double> cuts;
  for (std::size_t i = 0; i < w.log_values.size(); ++i) {
    const double x = w.position(i), lw = w.log_values[i];
    const double lo = x - h, hi = x + h;
    for (int s = 0; s < 2; ++s) {
      const double a = s == 0 ? std::max(lo, 0.0) : lo, b = s == 0 ? hi : std::min(hi, 0.0);
      if (b <= a) continue;
      if (!std::isfinite(lw)) {
        vanishes[s] = true;
        continue;
      }
      split_dyadic(a, b, cuts);
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        if (cuts[k + 1] > cuts[k])
          side[s].push_back({0.5 * (cuts[k] + cuts[k + 1]), std::abs(lw) * atan_diff(cuts[k], cuts[k + 1])});
    }
  }
  const char* names[2] = {"log_w_right", "log_w_left"};
  bool summable = true;
  bool zero_half = false;
  for (int s = 0; s < 2; ++s) {
    SumVerdict sv = classify_contributions(side[s], ext);
    if (vanishes[s]) {
      sv.classification = Classification::Divergent;
      sv.value_truncated = std::numeric_limits<double>::infinity();
    }
    v.evidence[names[s]] = sv;
    if (!sv.convergent()) summable = false;
    if (sv.divergent() && monotone_flag) {
      std::vector<double> vals;
      for (std::size_t i = 0; i < w.log_values.size(); ++i) {
        const double x = w.position(i);
        if ((s == 0 && x >= 0) || (s == 1 && x <= 0)) vals.push_back(w.log_values[i]);
      }
      if (s == 1) std::reverse(vals.begin(), vals.end());
      const bool dec = std::is_sorted(vals.begin(), vals.end(), std::greater<double>());
      const bool inc = std::is_sorted(vals.begin(), vals.end());
      v.data[std::string(names[s]) + "_monotone"] = (dec || inc) ? 1.0 : 0.0;
      if (dec || inc) zero_half = true;
    }
  }
  if (summable) {
    v.applicable = true;
    v.conclusion = Conclusion::TypeInfinite;
  } else if (zero_half) {
    v.applicable = true;
    v.conclusion = Conclusion::TypeZero;
  }
  return v;
}

/// mu(I_{x,delta}) <= C (1+|x|)^l (nu(2 I_{x,delta}) + e^{-2 delta |x|}) on atoms and gap midpoints.
inline TheoremVerdict borichev_sodin_compare(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double delta,
                                             double C, double l) {
  require(delta > 0 && C > 0, ErrorCode::InvalidArgument, "delta and C must be positive");
  TheoremVerdict v;
  v.theorem = "borichev_sodin";
  std::vector<double> xs;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    xs.push_back(mu.atoms()[i].position);
    if (i + 1 < mu.size()) xs.push_back(0.5 * (mu.atoms()[i].position + mu.atoms()[i + 1].position));
  }
  std::vector<double> bad;
  double worst = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    const double r = std::exp(-delta * std::abs(x));
    const double lhs = mu.log_mass_closed(x - r, x + r);
    const double ln = nu.log_mass_closed(x - 2 * r, x + 2 * r), le = -2.0 * delta * std::abs(x);
    const double m = std::max(ln, le);
    const double rhs = std::log(C) + l * std::log1p(std::abs(x)) + m + std::log1p(std::exp(std::min(ln, le) - m));
    if (!std::isfinite(lhs)) continue;
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) bad.push_back(x);
  }
  v.arrays["violations"] = bad;
  v.data["max_log_excess"] = worst;
  v.data["test_points"] = static_cast<double>(xs.size());
  if (bad.empty()) {
    v.applicable = true;
    v.conclusion = Conclusion::TypeAtMostReference;
    v.notes.push_back("relation holds: type(mu) <= type(nu)");
  }
  return v;
}

/// mu([x-L, x+L]) > c/(1+x^2) on atoms and gap midpoints gives type >= pi/L.
inline TheoremVerdict duffin_schaeffer_check(const DiscreteMeasure& mu, double L, double c) {
  require(L > 0 && c > 0, ErrorCode::InvalidArgument, "L and c must be positive");
  TheoremVerdict v;
  v.theorem = "duffin_schaeffer";
  std::vector<double> xs;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    xs.push_back(mu.atoms()[i].position);
    if (i + 1 < mu.size()) xs.push_back(0.5 * (mu.atoms()[i].position + mu.atoms()[i + 1].position));
  }
  std::vector<double> bad;
  for (double x : xs) {
    const double lhs = mu.log_mass_closed(x - L, x + L);
    if (!(lhs > std::log(c) - std::log1p(x * x))) bad.push_back(x);
  }
  v.arrays["violations"] = bad;
  v.data["test_points"] = static_cast<double>(xs.size());
  if (bad.empty()) {
    v.applicable = true;
    v.conclusion = Conclusion::TypeAtLeast;
    v.bound = std::numbers::pi / L;
  }
  return v;
}

struct BenedicksLayout {
  std::vector<Interval> intervals;  // contiguous, sorted
  std::ptrdiff_t zero = 0;          // position of I_0 = (0, a_1]
  long index(std::size_t pos) const { return static_cast<long>(pos) - static_cast<long>(zero); }
  bool odd(std::size_t pos) const { return (index(pos) % 2 + 2) % 2 == 1; }
};

inline BenedicksLayout benedicks_layout(std::span<const Interval> intervals) {
  require(!intervals.empty(), ErrorCode::BadAlternation, "no intervals");
  BenedicksLayout L;
  L.intervals.assign(intervals.begin(), intervals.end());
  std::sort(L.intervals.begin(), L.intervals.end(), [](const Interval& a, const Interval& b) { return a.left < b.left; });
  for (std::size_t i = 1; i < L.intervals.size(); ++i)
    require(L.intervals[i].left == L.intervals[i - 1].right, ErrorCode::BadAlternation, "intervals are not contiguous");
  const auto it = std::find_if(L.intervals.begin(), L.intervals.end(), [](const Interval& I) { return I.left == 0.0; });
  require(it != L.intervals.end(), ErrorCode::BadAlternation, "no interval starts at 0");
  L.zero = it - L.intervals.begin();
  return L;
}

/// Conditions 1-4 for unions of even intervals.
inline TheoremVerdict benedicks_conditions(std::span<const Interval> intervals, double C1, double C2, double C3) {
  require(C1 > 0 && C2 > 0 && C3 > 0, ErrorCode::InvalidArgument, "constants must be positive");
  const auto L = benedicks_layout(intervals);
  TheoremVerdict v;
  v.theorem = "benedicks";
  std::vector<std::size_t> odd;
  for (std::size_t p = 0; p < L.intervals.size(); ++p)
    if (L.odd(p)) odd.push_back(p);

  auto first_fail = [&](const char* key, long idx) {
    if (!v.data.count(key)) v.data[key] = static_cast<double>(idx);
  };
  bool c1 = true, c2 = true, c3 = true;
  for (std::size_t i = 0; i < odd.size(); ++i) {
    const Interval& In = L.intervals[odd[i]];
    const double an = In.left;
    for (std::size_t k = 0; k < odd.size(); ++k) {
      if (k == i) continue;
      const double ak = L.intervals[odd[k]].left;
      if (an == 0.0 || (an > 0) != (ak > 0) || ak == 0.0) continue;
      if (std::abs(an) / C1 < std::abs(ak) && std::abs(ak) < C1 * std::abs(an)) {
        const double r = L.intervals[odd[k]].length() / In.length();
        if (!(r > 1.0 / C2 && r < C2)) {
          if (c1) first_fail("condition1_failed_index", L.index(odd[i]));
          c1 = false;
        }
      }
    }
    if (i > 0) {
      const double prev = std::abs(L.intervals[odd[i - 1]].left), cur = std::abs(an);
      if (!(cur / C1 < prev && prev < C1 * cur)) {
        if (c2) first_fail("condition2_failed_index", L.index(odd[i]));
        c2 = false;
      }
    }
    const std::size_t ev = odd[i] > 0 ? odd[i] - 1 : odd[i] + 1;
    const double even_len = ev < L.intervals.size() ? L.intervals[ev].length() : 0.0;
    if (!(In.length() > C3 * std::max(even_len, 1.0))) {
      if (c3) first_fail("condition3_failed_index", L.index(odd[i]));
      c3 = false;
    }
  }
  std::vector<Term> terms;
  double cov = 0.0;
  for (std::size_t p : odd) {
    const Interval& I = L.intervals[p];
    const std::size_t ev = p > 0 ? p - 1 : p + 1;
    const double e = ev < L.intervals.size() ? L.intervals[ev].length() : I.length();
    const double lp = std::max(0.0, std::log(I.length() / e));
    terms.push_back({I.left, I.length() * I.length() * (lp + 1.0)});
    cov = std::max({cov, std::abs(I.left), std::abs(I.right)});
  }
  const auto s4 = poisson_tail_sum(terms, cov);
  v.evidence["condition4"] = s4;
  v.data["condition1"] = c1;
  v.data["condition2"] = c2;
  v.data["condition3"] = c3;
  v.data["condition4"] = s4.convergent();
  v.applicable = c1 && c2 && c3 && s4.convergent();
  if (v.applicable)
    v.notes.push_back("quantitative bound: build benedicks_sequence and estimate with type_discrete");
  return v;
}

/// nu = mu/(1+|x|^alpha); the type is unchanged.
inline DiscreteMeasure polynomial_rescale(const DiscreteMeasure& mu, double alpha) {
  require(alpha >= 0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be >= 0");
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) {
    const double lp = std::log1p(std::pow(std::abs(a.position), alpha));
    const double lm = a.log_mass - lp;
    atoms.push_back({a.position, a.mass / (1.0 + std::pow(std::abs(a.position), alpha)), lm});
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", alpha);
  return DiscreteMeasure(std::move(atoms), mu.window(), mu.tag() + "|polynomial_rescale(alpha=" + buf + "):type_invariant");
}

}  // namespace typelab
