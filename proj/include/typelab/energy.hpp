#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "core.hpp"

namespace typelab {

struct EnergyReport {
  std::size_t delta = 0;
  double energy = 0.0;
  double deficit = 0.0;
  Interval interval;
};

/// sum over ordered pairs k != l of log|x_k - x_l|.
inline double coulomb_energy(std::span<const double> pts) {
  require(pts.size() >= 2, ErrorCode::TooFewPoints, "energy needs at least 2 points");
  const std::size_t n = pts.size();
  constexpr std::size_t block = 64;
  const std::size_t nb = (n + block - 1) / block;
  std::vector<CompensatedSum> partial(nb);
  std::vector<char> degenerate(nb, 0);
  parallel::for_each_index(nb, [&](std::size_t b) {
    CompensatedSum s;
    const std::size_t hi = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < hi; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dist = std::abs(pts[j] - pts[i]);
        if (!(dist >= 1e-300)) {
          degenerate[b] = 1;
          return;
        }
        s.add(std::log(dist));
      }
    }
    partial[b] = s;
  });
  for (char d : degenerate)
    require(!d, ErrorCode::DegenerateDistance, "points closer than 1e-300");
  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return 2.0 * total.value();
}

inline double coulomb_energy(const RealSequence& config) { return coulomb_energy(config.points()); }

/// E of d^{-1}{0..delta-1} via log-gamma.
inline double grid_energy_closed_form(std::size_t delta, double d) {
  require(delta >= 2, ErrorCode::TooFewPoints, "delta must be >= 2");
  require(d > 0 && std::isfinite(d), ErrorCode::InvalidArgument, "d must be positive");
  CompensatedSum s;
  const double D = static_cast<double>(delta);
  for (std::size_t m = 1; m <= delta; ++m) {
    s.add(std::lgamma(static_cast<double>(m)));
    s.add(std::lgamma(D - static_cast<double>(m) + 1.0));
  }
  s.add(-D * (D - 1.0) * std::log(d));
  return s.value();
}

inline EnergyReport energy_report(std::span<const double> sorted_points, const Interval& I) {
  require(I.length() >= 1.0, ErrorCode::IntervalTooShort, "interval shorter than 1");
  auto lo = std::upper_bound(sorted_points.begin(), sorted_points.end(), I.left);
  auto hi = std::upper_bound(sorted_points.begin(), sorted_points.end(), I.right);
  EnergyReport r;
  r.interval = I;
  r.delta = static_cast<std::size_t>(hi - lo);
  r.energy = r.delta >= 2 ? coulomb_energy(std::span<const double>(&*lo, r.delta)) : 0.0;
  const double D = static_cast<double>(r.delta);
  r.deficit = D * D * std::log(I.length()) - r.energy;
  return r;
}

inline EnergyReport energy_report(const RealSequence& config, const Interval& I) {
  return energy_report(config.points(), I);
}

}  // namespace typelab
