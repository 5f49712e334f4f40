#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "core.hpp"

namespace typelab {

using quad = boost::multiprecision::float128;

struct OracleOptions {
  double freq_density = 8.0;        // rows per unit frequency (lower bound)
  bool extended_precision = false;  // allow the 128-bit path when double conditioning collapses
  double refuse_ratio = 1e-14;      // double path refuses below this sigma_min/sigma_max
  double ladder_ratio = 1e-12;      // switch to 128-bit below this ratio
  int inverse_iterations = 30;
};

struct ResidualCurve {
  std::vector<double> a_values;
  std::vector<double> sigma_min;
  std::vector<double> sigma_max;
  std::vector<double> conditioning;  // sigma_min / sigma_max
  std::vector<std::size_t> rows;
  std::vector<char> extended;        // 128-bit solve used at this a
  std::optional<double> knee;
  double knee_strength = 0.0;        // -(second difference of log sigma_min) at the knee
};

/// Rows needed to resolve e^{i lambda t} on [0, a]: the density floor, half-Nyquist in t_max, and N+1.
inline std::size_t oracle_rows(const DiscreteMeasure& mu, double a, double freq_density) {
  double tmax = 0.0;
  for (const auto& at : mu.atoms()) tmax = std::max(tmax, std::abs(at.position));
  const auto by_density = static_cast<std::size_t>(std::ceil(freq_density * a)) + 1;
  const auto by_band = static_cast<std::size_t>(std::ceil(2.0 * a * tmax / std::numbers::pi)) + 1;
  return std::max({by_density, by_band, mu.size() + 1});
}

/// A_{jm} = sqrt(h_j) sqrt(m_m) e^{i lambda_j t_m}, lambda_j uniform on [0, a], trapezoid weights h_j.
inline Eigen::MatrixXcd annihilation_matrix(const DiscreteMeasure& mu, double a, std::size_t freq_count) {
  require(freq_count >= 2, ErrorCode::DegenerateGrid, "need at least 2 frequencies");
  require(a > 0 && std::isfinite(a), ErrorCode::DegenerateGrid, "a must be positive");
  require(mu.size() >= 1, ErrorCode::InsufficientData, "measure has no atoms");
  const auto M = static_cast<Eigen::Index>(freq_count), N = static_cast<Eigen::Index>(mu.size());
  const double h = a / static_cast<double>(freq_count - 1);
  Eigen::MatrixXcd A(M, N);
  for (Eigen::Index m = 0; m < N; ++m) {
    const auto& at = mu.atoms()[static_cast<std::size_t>(m)];
    const double sm = std::exp(0.5 * at.log_mass);
    for (Eigen::Index j = 0; j < M; ++j) {
      const double w = (j == 0 || j == M - 1) ? 0.5 * h : h;
      const double lam = a * static_cast<double>(j) / static_cast<double>(M - 1);
      A(j, m) = std::sqrt(w) * sm * std::polar(1.0, lam * at.position);
    }
  }
  return A;
}

namespace detail {

using QuadMatrix = Eigen::Matrix<quad, Eigen::Dynamic, Eigen::Dynamic>;
using QuadVector = Eigen::Matrix<quad, Eigen::Dynamic, 1>;

// Real embedding [[Re, -Im], [Im, Re]] of the annihilation matrix, built directly in 128-bit.
inline QuadMatrix embedded_matrix(const DiscreteMeasure& mu, double a, std::size_t freq_count) {
  const auto M = static_cast<Eigen::Index>(freq_count), N = static_cast<Eigen::Index>(mu.size());
  QuadMatrix E(2 * M, 2 * N);
  const quad qa = a, h = qa / quad(static_cast<double>(freq_count - 1));
  for (Eigen::Index m = 0; m < N; ++m) {
    const auto& at = mu.atoms()[static_cast<std::size_t>(m)];
    const quad sm = boost::multiprecision::exp(quad(0.5) * quad(at.log_mass));
    const quad t = at.position;
    for (Eigen::Index j = 0; j < M; ++j) {
      const quad w = (j == 0 || j == M - 1) ? h / 2 : h;
      const quad lam = qa * quad(static_cast<double>(j)) / quad(static_cast<double>(M - 1));
      const quad s = boost::multiprecision::sqrt(w) * sm;
      const quad re = s * boost::multiprecision::cos(lam * t), im = s * boost::multiprecision::sin(lam * t);
      E(j, m) = re;
      E(j, m + N) = -im;
      E(j + M, m) = im;
      E(j + M, m + N) = re;
    }
  }
  return E;
}

struct QuadSolve {
  double sigma_min = 0.0;
  QuadVector vec;
};

// Smallest singular value by Householder QR and inverse iteration on R^T R.
inline QuadSolve smallest_singular_quad(const QuadMatrix& E, int iterations) {
  Eigen::HouseholderQR<QuadMatrix> qr(E);
  const Eigen::Index n = E.cols();
  QuadMatrix R = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  // guard exact zeros on the diagonal
  for (Eigen::Index i = 0; i < n; ++i)
    if (R(i, i) == 0) R(i, i) = quad(1e-300);
  QuadVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = quad(1.0 + 0.25 * std::sin(1.0 + static_cast<double>(i)));
  x /= x.norm();
  for (int it = 0; it < iterations; ++it) {
    QuadVector y = R.transpose().template triangularView<Eigen::Lower>().solve(x);
    QuadVector z = R.template triangularView<Eigen::Upper>().solve(y);
    const quad nz = z.norm();
    if (!(nz > 0)) break;
    x = z / nz;
  }
  QuadSolve out;
  out.sigma_min = static_cast<double>((R * x).norm());
  out.vec = x;
  return out;
}

struct PointSolve {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool extended = false;
};

inline PointSolve solve_point(const DiscreteMeasure& mu, double a, std::size_t rows, const OracleOptions& opt) {
  const auto A = annihilation_matrix(mu, a, rows);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  const auto& s = svd.singularValues();
  PointSolve p;
  p.sigma_max = s(0);
  p.sigma_min = s(s.size() - 1);
  if (p.sigma_min / p.sigma_max < opt.ladder_ratio) {
    if (!opt.extended_precision) {
      require(p.sigma_min / p.sigma_max >= opt.refuse_ratio, ErrorCode::IllConditioned,
              "conditioning below 1e-14 at a = " + std::to_string(a) + "; enable extended precision");
      return p;
    }
    p.sigma_min = smallest_singular_quad(embedded_matrix(mu, a, rows), opt.inverse_iterations).sigma_min;
    p.extended = true;
  }
  return p;
}

}  // namespace detail

/// Corner where log sigma_min bends from its rise into the plateau (most negative second difference).
inline void locate_knee(ResidualCurve& c) {
  c.knee.reset();
  c.knee_strength = 0.0;
  const std::size_t n = c.a_values.size();
  if (n < 3) return;
  std::vector<double> L(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double floor_rel = c.extended[i] ? 1e-30 : 1e-12;
    L[i] = std::log(std::max(c.sigma_min[i], floor_rel * c.sigma_max[i]));
  }
  double best = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s2 = -(L[i - 1] - 2.0 * L[i] + L[i + 1]);
    if (s2 > best) {
      best = s2;
      at = i;
    }
  }
  c.knee_strength = best;
  if (best >= 2.0) c.knee = c.a_values[at];
}

/// sigma_min of the annihilation matrix over an a-grid, with knee.
inline ResidualCurve residual_scan(const DiscreteMeasure& mu, const std::vector<double>& a_grid,
                                   const OracleOptions& opt = {}) {
  require(!a_grid.empty(), ErrorCode::DegenerateGrid, "empty a grid");
  for (double a : a_grid) require(a > 0 && std::isfinite(a), ErrorCode::DegenerateGrid, "a must be positive");
  ResidualCurve c;
  const std::size_t n = a_grid.size();
  c.a_values = a_grid;
  c.sigma_min.assign(n, 0.0);
  c.sigma_max.assign(n, 0.0);
  c.conditioning.assign(n, 0.0);
  c.rows.assign(n, 0);
  c.extended.assign(n, 0);
  parallel::for_each_index(n, [&](std::size_t i) {
    const std::size_t rows = oracle_rows(mu, a_grid[i], opt.freq_density);
    const auto p = detail::solve_point(mu, a_grid[i], rows, opt);
    c.rows[i] = rows;
    c.sigma_min[i] = p.sigma_min;
    c.sigma_max[i] = p.sigma_max;
    c.conditioning[i] = p.sigma_min / p.sigma_max;
    c.extended[i] = p.extended;
  });
  locate_knee(c);
  return c;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  require(steps >= 2 && hi > lo, ErrorCode::DegenerateGrid, "need hi > lo and at least 2 steps");
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return g;
}

struct AnnihilatorReport {
  std::vector<std::complex<double>> coefficients;  // f at each atom, unit L2(mu)
  double sigma_min = 0.0;
  double residual = 0.0;             // sup over the fine grid of |sum m f e^{i lambda t}|
  double residual_normalized = 0.0;  // residual / sum m |f|
  std::size_t rows = 0;
  bool extended = false;
};

/// Right singular vector for sigma_min and its residual on a 10x finer frequency grid.
inline AnnihilatorReport annihilator_extract(const DiscreteMeasure& mu, double a, std::size_t freq_count,
                                             const OracleOptions& opt = {}) {
  const std::size_t rows = std::max(freq_count, oracle_rows(mu, a, opt.freq_density));
  const auto A = annihilation_matrix(mu, a, rows);
  const auto N = static_cast<Eigen::Index>(mu.size());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  AnnihilatorReport r;
  r.rows = rows;
  Eigen::VectorXcd c = svd.matrixV().col(s.size() - 1);
  r.sigma_min = s(s.size() - 1);
  detail::QuadSolve q;
  if (r.sigma_min / s(0) < opt.ladder_ratio) {
    require(opt.extended_precision || r.sigma_min / s(0) >= opt.refuse_ratio, ErrorCode::IllConditioned,
            "conditioning below 1e-14; enable extended precision");
    if (opt.extended_precision) {
      q = detail::smallest_singular_quad(detail::embedded_matrix(mu, a, rows), opt.inverse_iterations);
      r.sigma_min = q.sigma_min;
      r.extended = true;
      for (Eigen::Index m = 0; m < N; ++m)
        c(m) = {static_cast<double>(q.vec(m)), static_cast<double>(q.vec(m + N))};
      c /= c.norm();
    }
  }
  double tv = 0.0;
  for (Eigen::Index m = 0; m < N; ++m) {
    const double sm = std::exp(0.5 * mu.atoms()[static_cast<std::size_t>(m)].log_mass);
    r.coefficients.push_back(c(m) / sm);
    tv += sm * std::abs(c(m));
  }
  const std::size_t fine = 10 * (rows - 1) + 1;
  double sup = 0.0;
  if (r.extended) {
    // evaluate in 128-bit: the cancellation is below double resolution
    std::vector<quad> sm(static_cast<std::size_t>(N));
    for (Eigen::Index m = 0; m < N; ++m)
      sm[static_cast<std::size_t>(m)] = boost::multiprecision::exp(quad(0.5) * quad(mu.atoms()[static_cast<std::size_t>(m)].log_mass));
    for (std::size_t j = 0; j < fine; ++j) {
      const quad lam = quad(a) * quad(static_cast<double>(j)) / quad(static_cast<double>(fine - 1));
      quad re = 0, im = 0;
      for (Eigen::Index m = 0; m < N; ++m) {
        const quad t = mu.atoms()[static_cast<std::size_t>(m)].position;
        const quad cs = boost::multiprecision::cos(lam * t), sn = boost::multiprecision::sin(lam * t);
        const quad xr = q.vec(m), xi = q.vec(m + N), w = sm[static_cast<std::size_t>(m)];
        re += w * (xr * cs - xi * sn);
        im += w * (xr * sn + xi * cs);
      }
      sup = std::max(sup, static_cast<double>(boost::multiprecision::sqrt(re * re + im * im) / q.vec.norm()));
    }
  } else {
    for (std::size_t j = 0; j < fine; ++j) {
      const double lam = a * static_cast<double>(j) / static_cast<double>(fine - 1);
      std::complex<double> F = 0.0;
      for (Eigen::Index m = 0; m < N; ++m) {
        const auto& at = mu.atoms()[static_cast<std::size_t>(m)];
        F += std::exp(0.5 * at.log_mass) * c(m) * std::polar(1.0, lam * at.position);
      }
      sup = std::max(sup, std::abs(F));
    }
  }
  r.residual = sup;
  r.residual_normalized = tv > 0 ? sup / tv : 0.0;
  return r;
}

}  // namespace typelab
