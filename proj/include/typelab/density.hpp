#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "core.hpp"
#include "partitions.hpp"
#include "uniformity.hpp"

namespace typelab {

/// n(x): +#(0, x] for x > 0, -#(x, 0] for x < 0, 0 at 0.
inline long counting_function(const RealSequence& seq, double x) {
  require(std::abs(x) <= seq.window(), ErrorCode::OutOfWindow, "x outside window");
  if (x > 0) return static_cast<long>(seq.count_in(0.0, x));
  if (x < 0) return -static_cast<long>(seq.count_in(x, 0.0));
  return 0;
}

namespace detail {

// Exact integral of (c - a x)/(1+x^2) over [u, v].
inline double signed_defect_integral(double c, double a, double u, double v) {
  return c * atan_diff(u, v) - 0.5 * a * log1p_sq_diff(u, v);
}

}  // namespace detail

/// integral of |n(x) - a x|/(1+x^2) over the window, exact per piece, classified by dyadic shell.
inline SumVerdict strong_regularity_defect(const RealSequence& seq, double a) {
  require(a >= 0 && std::isfinite(a), ErrorCode::InvalidArgument, "a must be >= 0");
  const double T = seq.window();
  std::vector<double> cuts{-T, 0.0, T};
  for (double x : seq.points())
    if (std::abs(x) < T && x != 0.0) cuts.push_back(x);
  for (double p = 1.0; p < T; p *= 2.0) {
    cuts.push_back(p);
    cuts.push_back(-p);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Contribution> contrib;
  contrib.reserve(2 * cuts.size());
  auto piece = [&](double c, double u, double v) {
    if (v <= u) return;
    const double mid = 0.5 * (u + v);
    contrib.push_back({mid, std::abs(detail::signed_defect_integral(c, a, u, v))});
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double u = cuts[k], v = cuts[k + 1];
    const double c = static_cast<double>(counting_function(seq, 0.5 * (u + v)));
    if (a > 0) {
      const double x0 = c / a;
      if (x0 > u && x0 < v) {
        piece(c, u, x0);
        piece(c, x0, v);
        continue;
      }
    }
    piece(c, u, v);
  }
  return classify_contributions(contrib, T);
}

/// Family of long deviant intervals: dyadic tiles where |count/length - a| >= eps.
inline SumVerdict long_family_defect(const RealSequence& seq, double a, double eps) {
  const double T = seq.window();
  std::vector<Interval> family;
  for (int side : {1, -1}) {
    for (double p = 1.0; 2.0 * p <= T; p *= 2.0) {
      std::vector<Interval> best;
      double best_sum = -1.0;
      for (int m : {1, 2, 4, 8}) {
        std::vector<Interval> dev;
        double sum = 0.0;
        const double len = p / m;
        for (int i = 0; i < m; ++i) {
          const double lo = p + i * len, hi = lo + len;
          const Interval I = side > 0 ? Interval(lo, hi) : Interval(-hi, -lo);
          const double r = static_cast<double>(seq.count_in(I.left, I.right)) / len;
          if (std::abs(r - a) >= eps) {
            dev.push_back(I);
            sum += len * len / (1.0 + lo * lo);
          }
        }
        if (sum > best_sum) {
          best_sum = sum;
          best = dev;
        }
      }
      family.insert(family.end(), best.begin(), best.end());
    }
  }
  std::vector<Term> terms;
  for (const auto& I : family) terms.push_back({I.dist_to_origin(), I.length() * I.length()});
  return poisson_tail_sum(terms, T);
}

enum class DensityKind { Interior, Exterior };

struct DensityScanRow {
  double d = 0.0;
  bool passed = false;
  int attempt = 0;
  std::string reason;
};

struct DensityEstimate {
  double value = 0.0;
  DensityKind kind = DensityKind::Interior;
  std::optional<RealSequence> certificate;        // subsequence or supersequence
  std::optional<UniformityReport> report;         // interior certificate check
  std::optional<SumVerdict> regularity;           // exterior certificate check
  std::vector<DensityScanRow> diagnostics;
};

struct SelectionResult {
  RealSequence subsequence = RealSequence::empty(1.0);
  bool shortfall = false;
  std::ptrdiff_t shortfall_interval = -1;
};

/// Farthest-point selection of floor(d|I|) points per interval, endpoints acting as anchors.
inline SelectionResult select_spread(const RealSequence& seq, const Partition& p, double d) {
  const auto iv = p.intervals();
  const auto outer = detail::outer_half(iv);
  std::vector<char> is_outer(iv.size(), 0);
  for (auto k : outer) is_outer[k] = 1;
  std::vector<std::vector<double>> chosen(iv.size());
  std::vector<char> short_of(iv.size(), 0);
  const auto pts = seq.points();
  parallel::for_each_index(iv.size(), [&](std::size_t k) {
    const Interval& I = iv[k];
    auto lo = std::upper_bound(pts.begin(), pts.end(), I.left);
    auto hi = std::upper_bound(pts.begin(), pts.end(), I.right);
    std::vector<double> cand(lo, hi);
    const auto want = static_cast<std::size_t>(std::floor(d * I.length() + 1e-9));
    if (want >= cand.size()) {
      if (want > cand.size()) short_of[k] = 1;
      chosen[k] = std::move(cand);
      return;
    }
    std::vector<double> gap(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) gap[i] = std::min(cand[i] - I.left, I.right - cand[i]);
    std::vector<char> taken(cand.size(), 0);
    for (std::size_t n = 0; n < want; ++n) {
      std::size_t best = cand.size();
      for (std::size_t i = 0; i < cand.size(); ++i)
        if (!taken[i] && (best == cand.size() || gap[i] > gap[best])) best = i;
      taken[best] = 1;
      for (std::size_t i = 0; i < cand.size(); ++i) gap[i] = std::min(gap[i], std::abs(cand[i] - cand[best]));
    }
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (taken[i]) chosen[k].push_back(cand[i]);
  });
  SelectionResult r;
  std::vector<double> out;
  for (std::size_t k = 0; k < iv.size(); ++k) {
    out.insert(out.end(), chosen[k].begin(), chosen[k].end());
    if (short_of[k] && is_outer[k] && !r.shortfall) {
      r.shortfall = true;
      r.shortfall_interval = static_cast<std::ptrdiff_t>(k);
    }
  }
  r.subsequence = RealSequence(std::move(out), seq.window(), seq.generator() + "|subsequence");
  return r;
}

namespace detail {

inline void require_grid(const std::vector<double>& grid) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0 && std::isfinite(grid[i]), ErrorCode::InvalidArgument, "grid values must be positive");
    require(i == 0 || grid[i] > grid[i - 1], ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }
}

struct ThinAttempt {
  bool passed = false;
  std::string reason;
  int attempt = 0;
  SelectionResult selection;
  std::optional<UniformityReport> report;
};

// Partition, spread selection, uniformity check; doubled lengths on failure.
inline ThinAttempt thin_and_check(const RealSequence& seq, double d, bool with_energy) {
  ThinAttempt out;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    PartitionOptions po;
    po.scale = attempt == 1 ? 1.0 : 2.0;
    out.attempt = attempt;
    Partition part(std::vector<double>{0.0, 1.0});
    try {
      part = find_short_partition(seq, d, po);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      out.reason = "insufficient data";
      continue;
    }
    out.selection = select_spread(seq, part, d);
    if (out.selection.shortfall) {
      out.reason = "shortfall in interval " + std::to_string(out.selection.shortfall_interval);
      continue;
    }
    UniformityOptions uo;
    uo.check_energy = with_energy;
    uo.short_circuit = true;
    auto rep = check_d_uniform(out.selection.subsequence, d, part, uo);
    rep.attempt = attempt;
    out.report = rep;
    if (rep.overall) {
      out.passed = true;
      out.reason.clear();
      return out;
    }
    out.reason = !rep.shortness.convergent() ? "partition not short"
                 : !rep.density_verdict.pass ? "density"
                                             : "energy";
  }
  return out;
}

}  // namespace detail

/// Largest d in the grid with a verifiable d-uniform subsequence (lower bound for the interior density).
inline DensityEstimate interior_density(const RealSequence& seq, std::vector<double> d_grid, bool with_energy = true) {
  detail::require_grid(d_grid);
  require(!seq.empty(), ErrorCode::InsufficientData, "empty sequence");
  DensityEstimate est;
  est.kind = DensityKind::Interior;
  for (auto it = d_grid.rbegin(); it != d_grid.rend(); ++it) {
    auto a = detail::thin_and_check(seq, *it, with_energy);
    est.diagnostics.push_back({*it, a.passed, a.attempt, a.reason});
    if (a.passed) {
      est.value = *it;
      est.certificate = a.selection.subsequence;
      est.report = a.report;
      break;
    }
  }
  return est;
}

/// Breakpoints grown from 0 with the minimal-length rule only.
inline Partition scaffold_partition(double T) {
  std::vector<double> side;
  double A = 0.0;
  while (A < T) {
    double B = A + min_interval_length(A);
    if (T - B < min_interval_length(B)) B = T;
    side.push_back(B);
    A = B;
  }
  std::vector<double> bp;
  for (auto it = side.rbegin(); it != side.rend(); ++it) bp.push_back(-*it);
  bp.push_back(0.0);
  bp.insert(bp.end(), side.begin(), side.end());
  return Partition(std::move(bp));
}

namespace detail {

// Adds k points to (l, r] spreading them over the largest gaps between existing points and the ends.
inline void fill_interval(double l, double r, const std::vector<double>& existing, std::size_t k,
                          std::vector<double>& out) {
  if (k == 0) return;
  std::vector<double> ends{l};
  ends.insert(ends.end(), existing.begin(), existing.end());
  if (ends.back() < r) ends.push_back(r);
  const std::size_t g = ends.size() - 1;
  std::vector<std::size_t> n(g, 0);
  using Item = std::pair<double, std::size_t>;
  auto cmp = [](const Item& x, const Item& y) { return x.first < y.first || (x.first == y.first && x.second > y.second); };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  for (std::size_t i = 0; i < g; ++i) pq.push({ends[i + 1] - ends[i], i});
  for (std::size_t t = 0; t < k; ++t) {
    auto [len, i] = pq.top();
    pq.pop();
    ++n[i];
    pq.push({(ends[i + 1] - ends[i]) / static_cast<double>(n[i] + 1), i});
  }
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 1; j <= n[i]; ++j)
      out.push_back(ends[i] + (ends[i + 1] - ends[i]) * static_cast<double>(j) / static_cast<double>(n[i] + 1));
}

}  // namespace detail

/// Fills seq up to round(a x) cumulative counts on the scaffold partition.
inline RealSequence regular_supersequence(const RealSequence& seq, double a) {
  const double T = seq.window();
  const Partition p = scaffold_partition(T);
  const auto& bp = p.breakpoints();
  const auto zero = static_cast<std::size_t>(std::find(bp.begin(), bp.end(), 0.0) - bp.begin());
  std::vector<double> added;
  const auto pts = seq.points();
  auto inside = [&](double l, double r) {
    auto lo = std::upper_bound(pts.begin(), pts.end(), l);
    auto hi = std::upper_bound(pts.begin(), pts.end(), r);
    return std::vector<double>(lo, hi);
  };
  long cum = 0;
  for (std::size_t k = zero; k + 1 < bp.size(); ++k) {
    auto ex = inside(bp[k], bp[k + 1]);
    cum += static_cast<long>(ex.size());
    const long target = std::lround(a * bp[k + 1]);
    if (target > cum) {
      detail::fill_interval(bp[k], bp[k + 1], ex, static_cast<std::size_t>(target - cum), added);
      cum = target;
    }
  }
  cum = 0;
  for (std::size_t k = zero; k > 0; --k) {
    auto ex = inside(bp[k - 1], bp[k]);
    cum += static_cast<long>(ex.size());
    const long target = std::lround(a * -bp[k - 1]);
    if (target > cum) {
      detail::fill_interval(bp[k - 1], bp[k], ex, static_cast<std::size_t>(target - cum), added);
      cum = target;
    }
  }
  std::vector<double> all(pts.begin(), pts.end());
  all.insert(all.end(), added.begin(), added.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return RealSequence(std::move(all), T, seq.generator() + "|supersequence");
}

/// Smallest a in the grid admitting an a-regular supersequence (upper bound for the exterior density).
inline DensityEstimate exterior_density(const RealSequence& seq, std::vector<double> a_grid,
                                        bool long_family_test = false) {
  detail::require_grid(a_grid);
  DensityEstimate est;
  est.kind = DensityKind::Exterior;
  if (seq.empty()) {
    est.value = a_grid.front();
    est.diagnostics.push_back({a_grid.front(), true, 0, "empty sequence"});
    return est;
  }
  for (double a : a_grid) {
    const auto sup = regular_supersequence(seq, a);
    const auto v = long_family_test ? long_family_defect(sup, a, 0.05 * a) : strong_regularity_defect(sup, a);
    const bool ok = long_family_test ? !v.divergent() : v.convergent();
    est.diagnostics.push_back({a, ok, 0, ok ? "" : std::string(to_string(v.classification))});
    if (ok) {
      est.value = a;
      est.certificate = sup;
      est.regularity = v;
      return est;
    }
  }
  est.value = std::numeric_limits<double>::infinity();
  return est;
}

}  // namespace typelab
