#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "energy.hpp"
#include "partitions.hpp"

namespace typelab {

struct IntervalStat {
  Interval interval;
  std::size_t delta = 0;
  double length = 0.0;
  double ratio = 0.0;
  double deficit = std::numeric_limits<double>::quiet_NaN();  // NaN when not evaluated
};

struct DensityVerdict {
  bool pass = false;
  double max_deviation = 0.0;  // over the outer half
  std::ptrdiff_t worst_interval = -1;
  std::vector<std::size_t> flagged;  // every interval outside its tolerance
  std::vector<IntervalStat> per_interval;
};

namespace detail {

// Intervals ranked by distance from the origin, farthest first; the first ceil(n/2) form the outer half.
inline std::vector<std::size_t> outer_half(const std::vector<Interval>& iv) {
  std::vector<std::size_t> idx(iv.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return iv[a].dist_to_origin() > iv[b].dist_to_origin();
  });
  idx.resize((iv.size() + 1) / 2);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline void require_covers(const RealSequence& seq, const Partition& p) {
  const double T = seq.window(), slack = 1e-9 * T;
  require(p.first() <= -T + slack && p.last() >= T - slack, ErrorCode::WindowMismatch,
          "partition does not cover the sequence window");
}

}  // namespace detail

inline double density_tolerance(double d, double length, double factor = 0.05) {
  return std::max(factor * d, 2.0 / length);
}

/// Counts per interval against d; pass when every outer-half interval is within tolerance.
inline DensityVerdict check_density(const RealSequence& seq, const Partition& partition, double d,
                                    double tolerance_factor = 0.05) {
  require(d > 0, ErrorCode::InvalidArgument, "d must be positive");
  detail::require_covers(seq, partition);
  const auto iv = partition.intervals();
  DensityVerdict v;
  v.per_interval.reserve(iv.size());
  for (std::size_t k = 0; k < iv.size(); ++k) {
    IntervalStat s;
    s.interval = iv[k];
    s.delta = seq.count_in(iv[k].left, iv[k].right);
    s.length = iv[k].length();
    s.ratio = static_cast<double>(s.delta) / s.length;
    if (std::abs(s.ratio - d) > density_tolerance(d, s.length, tolerance_factor)) v.flagged.push_back(k);
    v.per_interval.push_back(s);
  }
  v.pass = true;
  for (std::size_t k : detail::outer_half(iv)) {
    const auto& s = v.per_interval[k];
    const double dev = std::abs(s.ratio - d);
    if (v.worst_interval < 0 || dev > v.max_deviation) {
      v.max_deviation = dev;
      v.worst_interval = static_cast<std::ptrdiff_t>(k);
    }
    if (dev > density_tolerance(d, s.length, tolerance_factor)) v.pass = false;
  }
  return v;
}

inline std::vector<EnergyReport> energy_deficits(const RealSequence& seq, const Partition& partition) {
  const auto iv = partition.intervals();
  for (const auto& I : iv) require(I.length() >= 1.0, ErrorCode::IntervalTooShort, "interval shorter than 1");
  std::vector<EnergyReport> out(iv.size());
  parallel::for_each_index(iv.size(), [&](std::size_t k) { out[k] = energy_report(seq.points(), iv[k]); });
  return out;
}

inline SumVerdict energy_verdict_from(const std::vector<EnergyReport>& reports, double coverage) {
  std::vector<Term> terms;
  terms.reserve(reports.size());
  for (const auto& r : reports) terms.push_back({r.interval.dist_to_origin(), std::max(0.0, r.deficit)});
  return poisson_tail_sum(terms, coverage);
}

/// Poisson-weighted energy deficits over the partition.
inline SumVerdict check_energy(const RealSequence& seq, const Partition& partition) {
  const auto reports = energy_deficits(seq, partition);
  return energy_verdict_from(reports, std::max(std::abs(partition.first()), std::abs(partition.last())));
}

/// Merges intervals shorter than 1 into their right neighbour (left neighbour when 0 blocks it).
inline Partition merge_short_intervals(const Partition& p) {
  std::vector<double> bp = p.breakpoints();
  for (;;) {
    std::size_t k = 0;
    while (k + 1 < bp.size() && bp[k + 1] - bp[k] >= 1.0) ++k;
    if (k + 1 >= bp.size() || bp.size() <= 2) break;
    if (k + 2 < bp.size() && bp[k + 1] != 0.0)
      bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(k + 1));
    else if (k > 0 && bp[k] != 0.0)
      bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(k));
    else
      break;
  }
  return Partition(std::move(bp));
}

struct UniformityOptions {
  double tolerance = 0.05;
  bool check_energy = true;
  bool retry = true;
  bool short_circuit = false;  // skip the energy sum once shortness or density has failed
};

struct UniformityReport {
  double d = 0.0;
  Partition partition{std::vector<double>{0.0, 1.0}};
  int attempt = 0;  // 0 given partition, 1 greedy, 2 greedy with doubled lengths
  std::vector<IntervalStat> per_interval;
  DensityVerdict density_verdict;
  SumVerdict shortness;
  SumVerdict energy_verdict;
  bool energy_checked = false;
  bool overall = false;
};

namespace detail {

inline UniformityReport uniformity_attempt(const RealSequence& seq, double d, const Partition& p, int attempt,
                                           const UniformityOptions& opt) {
  UniformityReport r;
  r.d = d;
  r.partition = p;
  r.attempt = attempt;
  const double cov = std::max(std::abs(p.first()), std::abs(p.last()));
  r.shortness = classify_family(p, cov);
  r.density_verdict = check_density(seq, p, d, opt.tolerance);
  r.per_interval = r.density_verdict.per_interval;
  const bool pre = r.shortness.convergent() && r.density_verdict.pass;
  if (opt.check_energy && (pre || !opt.short_circuit)) {
    const Partition merged = merge_short_intervals(p);
    const auto reports = energy_deficits(seq, merged);
    r.energy_verdict = energy_verdict_from(reports, cov);
    r.energy_checked = true;
    if (merged.size() == p.size())
      for (std::size_t k = 0; k < reports.size(); ++k) r.per_interval[k].deficit = reports[k].deficit;
  }
  r.overall = pre && (!opt.check_energy || (r.energy_checked && r.energy_verdict.convergent()));
  return r;
}

}  // namespace detail

/// Density and energy conditions on a short partition (given, or greedy with one doubled retry).
inline UniformityReport check_d_uniform(const RealSequence& seq, double d,
                                        const std::optional<Partition>& partition = std::nullopt,
                                        const UniformityOptions& opt = {}) {
  require(d > 0 && std::isfinite(d), ErrorCode::InvalidArgument, "d must be positive");
  if (partition) return detail::uniformity_attempt(seq, d, *partition, 0, opt);
  auto r = detail::uniformity_attempt(seq, d, find_short_partition(seq, d), 1, opt);
  if (r.overall || !opt.retry) return r;
  PartitionOptions po;
  po.scale = 2.0;
  return detail::uniformity_attempt(seq, d, find_short_partition(seq, d, po), 2, opt);
}

}  // namespace typelab
