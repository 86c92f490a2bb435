#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "renyi/errors.hpp"
#include "renyi/halfspace.hpp"

using namespace renyi;

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid nodes on [-cut, cut]; spectrally accurate for these smooth, decaying integrands.
std::vector<double> trapezoid(double cut, double step) {
  std::vector<double> x;
  const int n = static_cast<int>(std::lround(cut / step));
  for (int i = -n; i <= n; ++i) x.push_back(i * step);
  return x;
}

double first_by_trapezoid(BoundaryCondition bc, double cut, double step) {
  const auto x = trapezoid(cut, step);
  double sum = 0.0;
  for (double a : x)
    for (double b : x) {
      const double k = kernel_C(bc, a, b);
      sum += k * k / (std::cosh(a) + std::cosh(b));
    }
  return sum * step * step / (2 * kPi);
}

// 1/sum(cosh) = int_0^inf exp(-t sum(cosh)) dt turns the 4-d integral into
// int dt tr(M_t^4) with M_t(i, j) = h exp(-t cosh a_i / 2) K(a_i, a_j) exp(-t cosh a_j / 2).
double second_by_laplace(BoundaryCondition bc, double cut, double step) {
  const auto x = trapezoid(cut, step);
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd k(n, n);
  Eigen::VectorXd ch(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ch(i) = std::cosh(x[i]);
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = step * kernel_C(bc, x[i], x[j]);
  }
  const double ds = 0.1;
  double total = 0.0;
  for (double s = -32.0; s <= 5.0 + 1e-9; s += ds) {
    const double t = std::exp(s);
    const Eigen::VectorXd e = (-0.5 * t * ch.array()).exp();
    const Eigen::MatrixXd m = e.asDiagonal() * k * e.asDiagonal();
    const Eigen::MatrixXd m2 = m * m;
    total += t * (m2.cwiseProduct(m2.transpose())).sum();
  }
  return total * ds / (4 * kPi);
}

}  // namespace

TEST_CASE("kernel values and symmetries") {
  CHECK(kernel_C(BoundaryCondition::Dirichlet, 0, 0) == doctest::Approx(1 / (2 * kPi)).epsilon(1e-15));
  CHECK(kernel_C(BoundaryCondition::Neumann, 0, 0) == 0.0);
  for (double a : {-3.0, -0.4, 0.0, 1.1, 5.0})
    for (double b : {-2.0, 0.3, 4.0}) {
      CHECK(kernel_C(BoundaryCondition::Dirichlet, a, b) == doctest::Approx(kernel_C(BoundaryCondition::Dirichlet, b, a)));
      CHECK(kernel_C(BoundaryCondition::Neumann, a, b) == doctest::Approx(kernel_C(BoundaryCondition::Neumann, b, a)));
      CHECK(kernel_C(BoundaryCondition::Dirichlet, a, -b) == doctest::Approx(kernel_C(BoundaryCondition::Dirichlet, a, b)));
      CHECK(kernel_C(BoundaryCondition::Neumann, a, -b) ==
            doctest::Approx(-kernel_C(BoundaryCondition::Neumann, a, b)));
    }
}

TEST_CASE("first reflection equals 1/(16 pi l)") {
  for (double l : {0.5, 1.0, 2.0}) {
    const auto r = first_reflection_halfspaces(HalfSpacePairGeometry(l));
    CHECK(r.total() * l == doctest::Approx(1 / (16 * kPi)).epsilon(1e-6));
  }
  const double one = first_reflection_halfspaces(HalfSpacePairGeometry(1.0)).total();
  const double two = first_reflection_halfspaces(HalfSpacePairGeometry(2.0)).total();
  CHECK(two == doctest::Approx(one / 2).epsilon(1e-14));
}

TEST_CASE("first reflection split matches an independent trapezoid rule") {
  const auto r = first_reflection_halfspaces(HalfSpacePairGeometry(1.0));
  CHECK(r.dirichlet == doctest::Approx(first_by_trapezoid(BoundaryCondition::Dirichlet, 40, 0.05)).epsilon(1e-8));
  CHECK(r.neumann == doctest::Approx(first_by_trapezoid(BoundaryCondition::Neumann, 40, 0.05)).epsilon(1e-8));
  CHECK(r.neumann > 0.0);
  CHECK(r.neumann < r.dirichlet);
}

TEST_CASE("first reflection is stable under a larger cutoff") {
  const HalfSpacePairGeometry g(1.0);
  const double base = first_reflection_halfspaces(g).total();
  const double wider = first_reflection_halfspaces(g, {45.0, 225, 1e-6}).total();
  CHECK(wider == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("under-resolved quadrature is reported") {
  CHECK_THROWS_AS(first_reflection_halfspaces(HalfSpacePairGeometry(1.0), {40.0, 6, 1e-6}), QuadratureNotConverged);
  CHECK_THROWS_AS(first_reflection_halfspaces(HalfSpacePairGeometry(1.0), {40.0, 1, 1e-6}), std::domain_error);
  CHECK_THROWS_AS(HalfSpacePairGeometry(0.0), std::domain_error);
}

TEST_CASE("second reflection matches the Laplace-transform evaluation") {
  const HalfSpacePairGeometry g(1.0);
  const auto second = second_reflection_halfspaces(g);
  const double dir = second_by_laplace(BoundaryCondition::Dirichlet, 20, 0.25);
  const double neu = second_by_laplace(BoundaryCondition::Neumann, 20, 0.25);
  CHECK(second.dirichlet == doctest::Approx(dir).epsilon(1e-5));
  CHECK(second.neumann == doctest::Approx(neu).epsilon(1e-4));
  const double a2 = first_reflection_halfspaces(g).total() + second.total();
  CHECK(a2 == doctest::Approx(0.022).epsilon(0.001 / 0.022));
  CHECK(second.total() > 0.0);
  CHECK(second.total() < 0.2 * first_reflection_halfspaces(g).total());
}

TEST_CASE("second reflection is stable under a larger cutoff") {
  const double base = second_reflection_halfspaces(HalfSpacePairGeometry(1.0)).total();
  const double wider = second_reflection_halfspaces(HalfSpacePairGeometry(1.0), {25.0, 80, 1e-6}).total();
  CHECK(wider == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("disk facing a half-space") {
  const auto r = disk_halfspace(DiskHalfSpaceGeometry(1.0, 10.0));
  CHECK(r.value == doctest::Approx(1 / (10 * kPi * kPi)).epsilon(1e-10));
  CHECK(r.double_integral == doctest::Approx(4 * kPi).epsilon(1e-10));
  CHECK(r.relative_error == doctest::Approx(0.01));
  CHECK(DiskHalfSpaceGeometry(1.0, 10.0).in_asymptotic_regime());
  CHECK_FALSE(DiskHalfSpaceGeometry(2.0, 1.5).in_asymptotic_regime());
  const auto small = disk_halfspace(DiskHalfSpaceGeometry(1e-9, 1.0));
  CHECK(small.value < 1e-9);
  CHECK_THROWS_AS(DiskHalfSpaceGeometry(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(DiskHalfSpaceGeometry(1.0, -1.0), std::domain_error);
}

TEST_CASE("disk monopole capacitance") {
  CHECK(disk_capacitance_monopole(1.0) == doctest::Approx(2 / kPi));
  CHECK(disk_capacitance_monopole(kPi / 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(disk_capacitance_monopole(0.0), std::domain_error);
}
