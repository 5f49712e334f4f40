#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"

namespace typelab {

namespace detail {

inline std::vector<Interval> sorted_disjoint(std::span<const Interval> intervals) {
  std::vector<Interval> v(intervals.begin(), intervals.end());
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.left < b.left; });
  for (std::size_t i = 1; i < v.size(); ++i)
    require(v[i].left >= v[i - 1].right, ErrorCode::OverlappingIntervals, "intervals overlap");
  return v;
}

inline double extent(std::span<const Interval> v) {
  double e = 0.0;
  for (const auto& I : v) e = std::max({e, std::abs(I.left), std::abs(I.right)});
  return e;
}

}  // namespace detail

/// Short/long test: sum |I|^2/(1+dist^2(0,I)).
inline SumVerdict classify_family(std::span<const Interval> intervals, std::optional<double> coverage = std::nullopt) {
  const auto v = detail::sorted_disjoint(intervals);
  std::vector<Term> terms;
  terms.reserve(v.size());
  for (const auto& I : v) terms.push_back({I.dist_to_origin(), I.length() * I.length()});
  return poisson_tail_sum(terms, coverage ? coverage : std::optional<double>(detail::extent(v)));
}

inline SumVerdict classify_family(const Partition& p, std::optional<double> coverage = std::nullopt) {
  const auto v = p.intervals();
  return classify_family(std::span<const Interval>(v), coverage);
}

struct PartitionOptions {
  double scale = 1.0;      // multiplies the minimal length
  double lookahead = 4.0;  // candidate horizon in units of the minimal length
};

inline double min_interval_length(double x, double scale = 1.0) {
  return scale * std::max(1.0, std::sqrt(std::abs(x)));
}

namespace detail {

// Grows intervals outward from 0 over mirrored points q >= 0.
// closed_left: count points in [A, B) (negative side); otherwise (A, B].
inline std::vector<double> grow_side(const std::vector<double>& q, double T, double d, bool closed_left,
                                     const PartitionOptions& opt) {
  auto count = [&](double A, double B) -> double {
    if (closed_left)
      return static_cast<double>(std::lower_bound(q.begin(), q.end(), B) - std::lower_bound(q.begin(), q.end(), A));
    return static_cast<double>(std::upper_bound(q.begin(), q.end(), B) - std::upper_bound(q.begin(), q.end(), A));
  };
  std::vector<double> bps;
  double A = 0.0;
  while (A < T) {
    const double L = min_interval_length(A, opt.scale);
    if (T - A < L) {
      if (bps.empty())
        bps.push_back(T);
      else
        bps.back() = T;
      break;
    }
    const double H = std::min(T, A + opt.lookahead * L);
    std::vector<double> cand{A + L};
    for (auto it = std::upper_bound(q.begin(), q.end(), A + L); it != q.end() && *it <= H; ++it) cand.push_back(*it);
    double B = -1.0;
    for (double b : cand) {
      if (count(A, b) >= d * (b - A)) {
        B = b;
        break;
      }
    }
    if (B < 0.0) {
      const bool horizon_empty = closed_left
                                     ? std::lower_bound(q.begin(), q.end(), A) == std::upper_bound(q.begin(), q.end(), H)
                                     : count(A, H) == 0.0;
      if (horizon_empty) {
        auto it = std::upper_bound(q.begin(), q.end(), H);
        B = it == q.end() ? T : *it;
      } else {
        double best = -1.0;
        for (double b : cand) {
          const double r = count(A, b) / (b - A);
          if (r > best) {
            best = r;
            B = b;
          }
        }
      }
    }
    B = std::min(B, T);
    if (T - B < min_interval_length(B, opt.scale)) B = T;
    bps.push_back(B);
    A = B;
  }
  return bps;
}

}  // namespace detail

/// Greedy short partition adapted to seq at target density d.
inline Partition find_short_partition(const RealSequence& seq, double d, const PartitionOptions& opt = {}) {
  require(d > 0 && std::isfinite(d), ErrorCode::InvalidArgument, "d must be positive");
  require(!seq.empty(), ErrorCode::InsufficientData, "empty sequence");
  const double T = seq.window();
  std::vector<double> right, left;
  for (double x : seq.points()) {
    if (x > 0) right.push_back(x);
    if (x <= 0) left.push_back(-x);
  }
  std::reverse(left.begin(), left.end());
  const auto r = detail::grow_side(right, T, d, false, opt);
  const auto l = detail::grow_side(left, T, d, true, opt);
  std::vector<double> bps;
  bps.reserve(r.size() + l.size() + 1);
  for (auto it = l.rbegin(); it != l.rend(); ++it) bps.push_back(-*it);
  bps.push_back(0.0);
  bps.insert(bps.end(), r.begin(), r.end());
  require(bps.size() >= 5, ErrorCode::InsufficientData, "window too small for 4 intervals");
  return Partition(std::move(bps));
}

/// sum l_n |I_n|/(1+dist^2) where l_n sums |I_m| over I_m meeting the C-dilation of I_n.
inline SumVerdict short2I_diagnostic(std::span<const Interval> intervals, double C,
                                     std::optional<double> coverage = std::nullopt) {
  require(C > 1.0, ErrorCode::InvalidArgument, "C must exceed 1");
  const auto v = detail::sorted_disjoint(intervals);
  const double cov = coverage ? *coverage : detail::extent(v);
  require(classify_family(std::span<const Interval>(v), cov).convergent(), ErrorCode::NotShort,
          "interval family is not short");
  std::vector<double> prefix(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i].length();
  std::vector<Term> terms;
  terms.reserve(v.size());
  for (const auto& I : v) {
    const double c = 0.5 * (I.left + I.right), h = 0.5 * C * I.length();
    const auto lo = std::upper_bound(v.begin(), v.end(), c - h,
                                     [](double x, const Interval& J) { return x < J.right; });
    const auto hi = std::lower_bound(v.begin(), v.end(), c + h,
                                     [](const Interval& J, double x) { return J.left < x; });
    const double l = hi > lo ? prefix[static_cast<std::size_t>(hi - v.begin())] -
                                   prefix[static_cast<std::size_t>(lo - v.begin())]
                             : 0.0;
    terms.push_back({I.dist_to_origin(), l * I.length()});
  }
  return poisson_tail_sum(terms, cov);
}

inline SumVerdict short2I_diagnostic(const Partition& p, double C, std::optional<double> coverage = std::nullopt) {
  const auto v = p.intervals();
  return short2I_diagnostic(std::span<const Interval>(v), C, coverage);
}

}  // namespace typelab
