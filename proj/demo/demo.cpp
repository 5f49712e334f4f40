// Walks the Koosis example end to end: density of the support, type estimate, oracle knee.
#include <cstdio>
#include <numbers>

#include <typelab/constructions.hpp>
#include <typelab/density.hpp>
#include <typelab/oracle.hpp>
#include <typelab/typeproblem.hpp>

int main() {
  using namespace typelab;
  const auto mu = koosis_measure(1000.0);
  const auto support = mu.support();

  std::vector<double> grid;
  for (int k = 1; k <= 40; ++k) grid.push_back(0.05 * k);
  const auto dens = interior_density(support, grid);
  std::printf("interior density of the support: %.3f\n", dens.value);

  const auto t = type_separated(mu);
  std::printf("type (separated, two-sided): %.4f  (2*pi = %.4f)\n", t.lower_bound_type, 2 * std::numbers::pi);

  const auto small = koosis_measure(30.5);
  OracleOptions opt;
  opt.extended_precision = true;
  const auto curve = residual_scan(small, linear_grid(0.5, 4 * std::numbers::pi, 24), opt);
  for (std::size_t i = 0; i < curve.a_values.size(); ++i)
    std::printf("a = %6.3f  sigma_min = %.3e%s\n", curve.a_values[i], curve.sigma_min[i], curve.extended[i] ? "  (128-bit)" : "");
  if (curve.knee) std::printf("knee at a = %.3f\n", *curve.knee);
  return 0;
}
