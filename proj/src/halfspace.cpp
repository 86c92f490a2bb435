#include "renyi/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fmt/core.h>
#include <gsl/gsl_integration.h>

#include "renyi/errors.hpp"
#include "renyi/parallel.hpp"

namespace renyi {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

Rule gauss_legendre(int n, double half_width) {
  if (n < 2) throw std::domain_error("QuadratureSpec: need at least 2 nodes per axis");
  if (!(half_width > 0.0)) throw std::domain_error("QuadratureSpec: alpha_cutoff must be positive");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  if (!table) throw std::runtime_error("gauss_legendre: allocation failed");
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(-half_width, half_width, static_cast<size_t>(i), &r.x[i], &r.w[i], table);
  gsl_integration_glfixed_table_free(table);
  return r;
}

std::vector<double> kernel_table(BoundaryCondition bc, const Rule& r) {
  const std::size_t n = r.x.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k[i * n + j] = kernel_C(bc, r.x[i], r.x[j]);
  return k;
}

// Tr N for one boundary condition with l = 1: (1/2pi) iint K^2 / (cosh a + cosh a').
double first_order_unit(BoundaryCondition bc, const Rule& r) {
  const std::size_t n = r.x.size();
  std::vector<double> ch(n);
  for (std::size_t i = 0; i < n; ++i) ch[i] = std::cosh(r.x[i]);
  const std::vector<double> k = kernel_table(bc, r);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += r.w[j] * k[i * n + j] * k[i * n + j] / (ch[i] + ch[j]);
    sum += r.w[i] * row;
  }
  return sum / (2.0 * kPi);
}

// Tr N^2 / 2 for one boundary condition with l = 1:
// (1/4pi) int d^4a K12 K23 K34 K41 / (sum cosh).
double second_order_unit(BoundaryCondition bc, const Rule& r, int threads) {
  const std::size_t n = r.x.size();
  std::vector<double> ch(n);
  for (std::size_t i = 0; i < n; ++i) ch[i] = std::cosh(r.x[i]);
  const std::vector<double> k = kernel_table(bc, r);
  std::vector<double> partial(n, 0.0);
  parallel_for(
      n,
      [&](std::size_t i) {
        double si = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double kij = r.w[j] * k[i * n + j];
          double sj = 0.0;
          for (std::size_t l = 0; l < n; ++l) {
            const double kjl = r.w[l] * k[j * n + l];
            const double cijl = ch[i] + ch[j] + ch[l];
            double sl = 0.0;
            for (std::size_t m = 0; m < n; ++m) sl += r.w[m] * k[l * n + m] * k[m * n + i] / (cijl + ch[m]);
            sj += kjl * sl;
          }
          si += kij * sj;
        }
        partial[i] = r.w[i] * si;
      },
      threads);
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum / (4.0 * kPi);
}

double disk_integral(const Rule& r) {
  const std::size_t n = r.x.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = r.x[i], b = r.x[j];
      row += r.w[j] * (1.0 / std::cosh(0.5 * (a + b)) + 1.0 / std::cosh(0.5 * (a - b))) /
             (std::cosh(a) + std::cosh(b));
    }
    sum += r.w[i] * row;
  }
  return sum;
}

// Evaluates f on the requested grid and on one with doubled nodes.
template <class F>
double doubled(const QuadratureSpec& quad, const char* what, F&& f) {
  const double coarse = f(gauss_legendre(quad.nodes_per_axis, quad.alpha_cutoff));
  const double fine = f(gauss_legendre(2 * quad.nodes_per_axis, quad.alpha_cutoff));
  const double scale = std::max(std::abs(fine), std::numeric_limits<double>::min());
  if (std::abs(fine - coarse) > quad.tolerance * scale)
    throw QuadratureNotConverged(fmt::format("{}: node doubling {} -> {} changed the result by {:.3e} relative",
                                             what, quad.nodes_per_axis, 2 * quad.nodes_per_axis,
                                             std::abs(fine - coarse) / scale));
  return fine;
}

}  // namespace

HalfSpacePairGeometry::HalfSpacePairGeometry(double l) : separation(l) {
  if (!(l > 0.0)) throw std::domain_error("HalfSpacePairGeometry: separation must be positive");
}

DiskHalfSpaceGeometry::DiskHalfSpaceGeometry(double R, double l) : disk_radius(R), separation(l) {
  if (!(R > 0.0)) throw std::domain_error("DiskHalfSpaceGeometry: radius must be positive");
  if (!(l > 0.0)) throw std::domain_error("DiskHalfSpaceGeometry: separation must be positive");
}

double kernel_C(BoundaryCondition bc, double alpha, double alpha_prime) {
  const double plus = 1.0 / std::cosh(0.5 * (alpha + alpha_prime));
  const double minus = 1.0 / std::cosh(0.5 * (alpha - alpha_prime));
  return (bc == BoundaryCondition::Dirichlet ? plus + minus : plus - minus) / (4.0 * kPi);
}

HalfSpaceResult first_reflection_halfspaces(const HalfSpacePairGeometry& geom, const QuadratureSpec& quad) {
  HalfSpaceResult out;
  out.dirichlet = doubled(quad, "first reflection (dirichlet)", [](const Rule& r) {
                    return first_order_unit(BoundaryCondition::Dirichlet, r);
                  }) / geom.separation;
  out.neumann = doubled(quad, "first reflection (neumann)", [](const Rule& r) {
                  return first_order_unit(BoundaryCondition::Neumann, r);
                }) / geom.separation;
  return out;
}

HalfSpaceResult second_reflection_halfspaces(const HalfSpacePairGeometry& geom, const QuadratureSpec& quad,
                                             int threads) {
  HalfSpaceResult out;
  out.dirichlet = doubled(quad, "second reflection (dirichlet)", [&](const Rule& r) {
                    return second_order_unit(BoundaryCondition::Dirichlet, r, threads);
                  }) / geom.separation;
  out.neumann = doubled(quad, "second reflection (neumann)", [&](const Rule& r) {
                  return second_order_unit(BoundaryCondition::Neumann, r, threads);
                }) / geom.separation;
  return out;
}

DiskHalfSpaceResult disk_halfspace(const DiskHalfSpaceGeometry& geom, const QuadratureSpec& quad) {
  DiskHalfSpaceResult out;
  out.double_integral = doubled(quad, "disk-half-space integral", disk_integral);
  const double c0 = disk_capacitance_monopole(geom.disk_radius);
  out.value = c0 / (8.0 * kPi * kPi * geom.separation) * out.double_integral;
  const double ratio = geom.disk_radius / geom.separation;
  out.relative_error = ratio * ratio;
  return out;
}

double disk_capacitance_monopole(double R) {
  if (!(R > 0.0)) throw std::domain_error("disk_capacitance_monopole: R must be positive");
  return 2.0 * R / kPi;
}

}  // namespace renyi
