#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"
#include "typeproblem.hpp"

namespace typelab {

/// d^{-1} Z inside [-T, T].
inline RealSequence arithmetic(double d, double T) {
  require(d > 0 && T > 0 && std::isfinite(d) && std::isfinite(T), ErrorCode::InvalidArgument, "d and T must be positive");
  const long K = static_cast<long>(std::floor(T * d * (1.0 + 1e-15)));
  std::vector<double> pts;
  pts.reserve(2 * static_cast<std::size_t>(K) + 1);
  for (long k = -K; k <= K; ++k) {
    const double x = static_cast<double>(k) / d;
    if (std::abs(x) <= T) pts.push_back(x);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "arithmetic(%.12g)", d);
  return RealSequence(std::move(pts), T, buf);
}

/// Each point moved by U(-1, 1) e^{-c|x|}; later colliding points and points leaving the window are dropped.
inline RealSequence perturb_exponential(const RealSequence& seq, double c, std::uint64_t seed) {
  require(c > 0, ErrorCode::InvalidArgument, "c must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> pts;
  pts.reserve(seq.size());
  for (double x : seq.points()) {
    const double y = x + u(rng) * std::exp(-c * std::abs(x));
    if (std::abs(y) <= seq.window()) pts.push_back(y);
  }
  std::stable_sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return RealSequence(std::move(pts), seq.window(), seq.generator() + "|perturbed");
}

struct AuxiliaryResult {
  RealSequence A = RealSequence::empty(1.0);
  RealSequence C = RealSequence::empty(1.0);
  RealSequence B_prime = RealSequence::empty(1.0);
  std::vector<double> pair_width;  // p_{2n+1} - p_{2n} per b_n
  std::size_t fill_points = 0;
  double max_gap = 0.0;
  double gap_bound = 0.0;          // 1/epsilon
  double max_width_ratio = 0.0;    // max pair_width / w(n)
  bool conclusion1 = false;        // every A-gap < 1/epsilon
  bool conclusion3 = false;        // every pair width <= w(n)
};

/// Pairs around each b_n, uniform fill of long gaps, midpoints of A.
inline AuxiliaryResult auxiliary_sequence(const RealSequence& B, const std::vector<double>& w, double epsilon, double L) {
  require(B.size() >= 2, ErrorCode::InsufficientData, "B needs two points");
  require(w.size() == B.size(), ErrorCode::InvalidArgument, "one weight per point of B");
  require(epsilon > 0, ErrorCode::InvalidArgument, "epsilon must be positive");
  for (double x : w) require(std::isfinite(x) && x > 0, ErrorCode::WeightUnbounded, "weights must be finite and positive");
  require(L > 0 && L <= 1.0 / epsilon, ErrorCode::BadL, "need 0 < L <= 1/epsilon");
  const std::size_t n = B.size();
  std::vector<double> l(n), P;
  for (std::size_t i = 0; i < n; ++i) {
    double g = std::numeric_limits<double>::infinity();
    if (i + 1 < n) g = std::min(g, B[i + 1] - B[i]);
    if (i > 0) g = std::min(g, B[i] - B[i - 1]);
    l[i] = std::min(g, w[i]);
  }
  AuxiliaryResult r;
  std::vector<double> A, mids;
  for (std::size_t i = 0; i < n; ++i) {
    const double p0 = B[i] - l[i] / 3.0, p1 = B[i] + l[i] / 3.0;
    A.push_back(p0);
    A.push_back(p1);
    r.pair_width.push_back(p1 - p0);
    r.max_width_ratio = std::max(r.max_width_ratio, (p1 - p0) / w[i]);
    mids.push_back(B[i]);
    if (i + 1 < n) {
      const double q0 = p1, q1 = B[i + 1] - l[i + 1] / 3.0;
      const auto M = static_cast<std::size_t>(std::floor((q1 - q0) / L));
      std::vector<double> seg{q0};
      for (std::size_t k = 1; k <= M; ++k) {
        const double q = q0 + static_cast<double>(k) * (q1 - q0) / static_cast<double>(M + 1);
        A.push_back(q);
        seg.push_back(q);
      }
      seg.push_back(q1);
      for (std::size_t k = 0; k + 1 < seg.size(); ++k) mids.push_back(0.5 * (seg[k] + seg[k + 1]));
      r.fill_points += M;
    }
  }
  std::sort(A.begin(), A.end());
  for (std::size_t i = 1; i < A.size(); ++i) r.max_gap = std::max(r.max_gap, A[i] - A[i - 1]);
  r.gap_bound = 1.0 / epsilon;
  r.conclusion1 = r.max_gap < r.gap_bound;
  r.conclusion3 = r.max_width_ratio <= 1.0;
  const double T = B.window() + *std::max_element(l.begin(), l.end());
  std::sort(mids.begin(), mids.end());
  r.A = RealSequence(std::move(A), T, "auxiliary_A");
  r.C = RealSequence(std::move(mids), T, "auxiliary_C");
  std::vector<double> bp;
  for (double c : r.C.points())
    if (std::binary_search(B.values().begin(), B.values().end(), c)) bp.push_back(c);
  r.B_prime = RealSequence(std::move(bp), T, "auxiliary_B_prime");
  return r;
}

struct BenedicksConstants {
  double C1 = 5.0;
  double C2 = 2.0;
  double C3 = 1.5;
};

struct BenedicksBlock {
  Interval block;
  std::size_t points = 0;
};

struct BenedicksResult {
  RealSequence sequence = RealSequence::empty(1.0);
  std::vector<BenedicksBlock> blocks;
};

inline long default_benedicks_b(long n) {
  return static_cast<long>(std::ceil(std::log(2.0 + std::labs(n))));
}

/// Points at equal-measure spacing inside the even intervals of each block J_k.
inline BenedicksResult benedicks_sequence(std::span<const Interval> intervals, double C, const BenedicksConstants& K = {},
                                          const std::function<long(long)>& b = default_benedicks_b) {
  require(C > 0, ErrorCode::InvalidArgument, "C must be positive");
  const auto verdict = benedicks_conditions(intervals, K.C1, K.C2, K.C3);
  require(verdict.applicable, ErrorCode::ConditionsFailed, "Benedicks conditions fail");
  const auto lay = benedicks_layout(intervals);
  const auto& iv = lay.intervals;
  // even interval index n maps to position zero + 2n
  const long n_lo = -static_cast<long>(lay.zero / 2), n_hi = static_cast<long>((iv.size() - 1 - lay.zero) / 2);
  auto a_even = [&](long n) { return iv[static_cast<std::size_t>(lay.zero + 2 * n)].left; };
  std::vector<long> marks{0};
  for (long n = 0;;) {
    const long next = n + std::max(1L, b(n));
    if (next > n_hi) break;
    marks.push_back(next);
    n = next;
  }
  if (marks.back() <= n_hi) {
    if (marks.size() > 1)
      marks.back() = n_hi + 1;
    else
      marks.push_back(n_hi + 1);
  }
  std::vector<long> left;
  for (long n = 0;;) {
    long next = n;
    for (long s = 1; n - s >= n_lo; ++s)
      if (s >= std::max(1L, b(n - s))) {
        next = n - s;
        break;
      }
    if (next == n) break;
    left.push_back(next);
    n = next;
  }
  if (n_lo < 0) {
    if (left.empty())
      left.push_back(n_lo);
    else
      left.back() = n_lo;
  }
  std::reverse(left.begin(), left.end());
  marks.insert(marks.begin(), left.begin(), left.end());
  auto edge = [&](long m) {
    if (m == n_hi + 1) return iv.back().right;
    if (m == n_lo && n_lo < 0) return iv.front().left;
    return a_even(m);
  };

  BenedicksResult r;
  std::vector<double> pts;
  double T = 0.0;
  for (const auto& I : iv) T = std::max({T, std::abs(I.left), std::abs(I.right)});
  for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
    const double lo = edge(marks[k]), hi = edge(marks[k + 1]);
    std::vector<Interval> evens;
    double total = 0.0;
    for (long n = marks[k]; n < marks[k + 1]; ++n) {
      const auto& I = iv[static_cast<std::size_t>(lay.zero + 2 * n)];
      evens.push_back(I);
      total += I.length();
    }
    // cumulative integer parts from 0 keep the running count within 1 of C|x|
    const auto N = static_cast<std::size_t>(hi > 0 ? std::floor(C * hi) - std::floor(C * std::max(lo, 0.0))
                                                   : std::floor(-C * lo) - std::floor(-C * hi));
    std::size_t placed = 0;
    std::size_t e = 0;
    double before = 0.0;
    for (std::size_t i = 1; i <= N; ++i) {
      const double level = total * static_cast<double>(i) / static_cast<double>(N + 1);
      while (e + 1 < evens.size() && before + evens[e].length() < level) {
        before += evens[e].length();
        ++e;
      }
      pts.push_back(evens[e].left + (level - before));
      ++placed;
    }
    r.blocks.push_back({Interval(lo, hi), placed});
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  char buf[64];
  std::snprintf(buf, sizeof buf, "benedicks(C=%.12g)", C);
  r.sequence = RealSequence(std::move(pts), T, buf);
  return r;
}

/// Alternating partition with |I_{2n}| = even_len, |I_{2n+1}| = odd_len tiling [-T, T] (ends trimmed to whole intervals).
inline std::vector<Interval> alternating_partition(double even_len, double odd_len, double T) {
  require(even_len > 0 && odd_len > 0 && T > 0, ErrorCode::InvalidArgument, "lengths must be positive");
  std::vector<Interval> right, left;
  double x = 0.0;
  for (long n = 0;; ++n) {
    const double len = n % 2 == 0 ? even_len : odd_len;
    if (x + len > T) break;
    right.emplace_back(x, x + len);
    x += len;
  }
  x = 0.0;
  for (long n = -1;; --n) {
    const double len = (n % 2 + 2) % 2 == 0 ? even_len : odd_len;
    if (x - len < -T) break;
    left.emplace_back(x - len, x);
    x -= len;
  }
  std::reverse(left.begin(), left.end());
  left.insert(left.end(), right.begin(), right.end());
  return left;
}

struct WeightFamily {
  std::string name;
  double beta = 2.0;
  double c = 1.0;

  double log_weight(long n) const {
    const double x = static_cast<double>(n);
    if (name == "polynomial") return -beta * std::log1p(x * x);
    if (name == "exponential") return -c * std::abs(x);
    if (name == "superexponential") return -x * x;
    if (name == "doubly_exponential") return -std::exp(std::abs(x));
    if (name == "mixed") return (n % 2 == 0) ? -c * std::abs(x) : -beta * std::log1p(x * x);
    throw Error(ErrorCode::UnknownFamily, name);
  }
  double weight(long n) const { return std::exp(log_weight(n)); }
};

inline WeightFamily weight_families(const std::string& name, const std::map<std::string, double>& params = {}) {
  static const char* known[] = {"polynomial", "exponential", "superexponential", "mixed", "doubly_exponential"};
  require(std::find(std::begin(known), std::end(known), name) != std::end(known), ErrorCode::UnknownFamily,
          "unknown weight family '" + name + "'");
  WeightFamily f;
  f.name = name;
  if (auto it = params.find("beta"); it != params.end()) f.beta = it->second;
  if (auto it = params.find("c"); it != params.end()) f.c = it->second;
  return f;
}

/// mu = sum w(n) delta_{b_n}, n counted from the first nonnegative point.
inline DiscreteMeasure weighted_measure(const RealSequence& support, const WeightFamily& w) {
  std::vector<double> pos(support.points().begin(), support.points().end()), lm;
  const auto origin = static_cast<long>(support.origin_index());
  for (std::size_t i = 0; i < pos.size(); ++i) lm.push_back(w.log_weight(static_cast<long>(i) - origin));
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s|%s(beta=%.6g,c=%.6g)", support.generator().c_str(), w.name.c_str(), w.beta, w.c);
  return DiscreteMeasure::from_log_masses(pos, lm, support.window(), buf);
}

/// Support Z (or d^{-1} Z) with polynomial weights (1+n^2)^{-2}.
inline DiscreteMeasure koosis_measure(double T, double d = 1.0) {
  return weighted_measure(arithmetic(d, T), weight_families("polynomial", {{"beta", 2.0}}));
}

}  // namespace typelab
