#include "renyi/disk_multipole.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/core.h>

#include "renyi/errors.hpp"
#include "renyi/parallel.hpp"

namespace renyi {

namespace {

constexpr double kSeriesNormThreshold = 0.05;
constexpr double kImagTolerance = 1e-10;

// Radial and angular factors of the translation entries, tabulated once for
// every composite degree L <= 2 n_max.
struct CompositeTable {
  int l_max = 0;
  std::vector<double> log_h;                 // by flat index of (L, M), M >= 0 used
  std::vector<std::complex<double>> ylm;     // by flat index of (L, M)

  CompositeTable(double xi0, double eta0, double phi0, int l_max_) : l_max(l_max_) {
    log_h.resize(basis_size(l_max));
    ylm.resize(basis_size(l_max));
    for (int L = 0; L <= l_max; ++L) {
      for (int M = -L; M <= L; ++M) {
        const MultipoleIndex idx(L, M);
        log_h[flat_index(idx)] = log_h_fn(idx, xi0);
        ylm[flat_index(idx)] = sph_harm(idx, eta0, phi0);
      }
    }
  }
};

// Entry (row = (n', m'), col = (n, m)) multiplied by exp(row_log_scale + col_log_scale).
std::complex<double> translation_entry(const CompositeTable& tab, MultipoleIndex row, MultipoleIndex col,
                                       double log_scale) {
  const int n = col.n, m = col.m, np = row.n, mp = row.m;
  const int L = n + np;
  const int M = m - mp;
  if (std::abs(M) > L) return 0.0;
  const double w1 = wigner3j(n, np, L, 0, 0, 0);
  if (w1 == 0.0) return 0.0;
  const double w2 = wigner3j(n, np, L, m, -mp, mp - m);
  if (w2 == 0.0) return 0.0;
  const int k = flat_index(MultipoleIndex(L, M));
  const std::complex<double> y = tab.ylm[k];
  if (y == 0.0) return 0.0;
  const double log_mag = 0.5 * std::log(4.0 * std::numbers::pi * (2 * n + 1) * (2 * np + 1) * (2 * L + 1)) +
                         std::log(std::abs(w1 * w2)) + tab.log_h[k] + log_scale;
  double sign = (w1 * w2 > 0.0) ? 1.0 : -1.0;
  if ((n + m) % 2 != 0) sign = -sign;
  return sign * std::exp(log_mag) * y;
}

struct ScaledCapacitance {
  std::vector<int> kept;            // flat indices with C != 0
  std::vector<double> log_sqrt_abs;  // log sqrt|C| per kept index
  std::vector<double> sign;
};

ScaledCapacitance scaled_capacitance(BoundaryCondition bc, int n_max) {
  ScaledCapacitance out;
  for (int n = 0; n <= n_max; ++n) {
    for (int m = -n; m <= n; ++m) {
      const MultipoleIndex idx(n, m);
      const int parity = (n - std::abs(m)) % 2;
      if (bc == BoundaryCondition::Dirichlet && parity != 0) continue;
      if (bc == BoundaryCondition::Neumann && parity == 0) continue;
      double log_abs = 0.0;
      double sign = 1.0;
      if (bc == BoundaryCondition::Dirichlet) {
        log_abs = std::log(j_fn(idx, 0.0)) - log_h_fn(idx, 0.0);
      } else {
        log_abs = std::log(j_fn_deriv(idx)) - std::log(-h_fn_deriv(idx));
        sign = -1.0;
      }
      out.kept.push_back(flat_index(idx));
      out.log_sqrt_abs.push_back(0.5 * log_abs);
      out.sign.push_back(sign);
    }
  }
  return out;
}

// K = S M+ S M- with M = D U D, similar to N restricted to indices where C != 0.
Eigen::MatrixXcd scaled_round_trip(const DiskPairGeometry& geom, BoundaryCondition bc, int n_max) {
  const ScaledCapacitance cap = scaled_capacitance(bc, n_max);
  const auto dim = static_cast<Eigen::Index>(cap.kept.size());
  const double xi0 = geom.xi0();
  const CompositeTable plus(xi0, 0.0, 0.5 * std::numbers::pi, 2 * n_max);
  const CompositeTable minus(xi0, 0.0, -0.5 * std::numbers::pi, 2 * n_max);
  Eigen::MatrixXcd mp(dim, dim), mm(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const MultipoleIndex row = index_at(cap.kept[a]);
    for (Eigen::Index b = 0; b < dim; ++b) {
      const MultipoleIndex col = index_at(cap.kept[b]);
      const double log_scale = cap.log_sqrt_abs[a] + cap.log_sqrt_abs[b];
      mp(a, b) = cap.sign[a] * translation_entry(plus, row, col, log_scale);
      mm(a, b) = cap.sign[a] * translation_entry(minus, row, col, log_scale);
    }
  }
  return mp * mm;
}

double wrap_angle(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

}  // namespace

const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

DiskPairGeometry::DiskPairGeometry(double separation_ratio) : separation_ratio_(separation_ratio) {
  if (!(separation_ratio > 2.0))
    throw std::domain_error(fmt::format("DiskPairGeometry: r/R = {} must exceed 2", separation_ratio));
}

double DiskPairGeometry::xi0() const {
  return std::sqrt(separation_ratio_ * separation_ratio_ - 1.0);
}

CapacitanceMatrix capacitance_disk(BoundaryCondition bc, int n_max) {
  if (n_max < 0) throw std::domain_error("capacitance_disk: n_max must be nonnegative");
  CapacitanceMatrix c{bc, n_max, std::vector<double>(basis_size(n_max), 0.0)};
  for (int n = 0; n <= n_max; ++n) {
    for (int m = -n; m <= n; ++m) {
      const MultipoleIndex idx(n, m);
      double value = 0.0;
      if (bc == BoundaryCondition::Dirichlet) {
        const double j0 = j_fn(idx, 0.0);
        if (j0 != 0.0) value = std::exp(std::log(j0) - log_h_fn(idx, 0.0));
      } else {
        const double jp = j_fn_deriv(idx);
        if (jp != 0.0) value = -std::exp(std::log(jp) - std::log(-h_fn_deriv(idx)));
      }
      c.entries[flat_index(idx)] = value;
    }
  }
  return c;
}

TranslationMatrix translation_matrix(double xi0, double eta0, double phi0, int n_max) {
  if (!(xi0 > 0.0)) throw std::domain_error("translation_matrix: xi0 must be positive");
  if (!(std::abs(eta0) <= 1.0)) throw std::domain_error("translation_matrix: |eta0| must not exceed 1");
  if (n_max < 0) throw std::domain_error("translation_matrix: n_max must be nonnegative");
  const CompositeTable tab(xi0, eta0, phi0, 2 * n_max);
  const int dim = basis_size(n_max);
  TranslationMatrix u{xi0, eta0, phi0, n_max, Eigen::MatrixXcd::Zero(dim, dim)};
  for (int a = 0; a < dim; ++a) {
    const MultipoleIndex row = index_at(a);
    for (int b = 0; b < dim; ++b) u.entries(a, b) = translation_entry(tab, row, index_at(b), 0.0);
  }
  return u;
}

Eigen::MatrixXcd reflection_operator(const DiskPairGeometry& geom, BoundaryCondition bc, int n_max) {
  const CapacitanceMatrix c = capacitance_disk(bc, n_max);
  const double xi0 = geom.xi0();
  const Eigen::MatrixXcd up = translation_matrix(xi0, 0.0, 0.5 * std::numbers::pi, n_max).entries;
  const Eigen::MatrixXcd um = translation_matrix(xi0, 0.0, -0.5 * std::numbers::pi, n_max).entries;
  const Eigen::VectorXcd diag = Eigen::Map<const Eigen::VectorXd>(c.entries.data(), c.entries.size()).cast<std::complex<double>>();
  return diag.asDiagonal() * up * diag.asDiagonal() * um;
}

LogDetResult reflection_logdet(const DiskPairGeometry& geom, BoundaryCondition bc, int n_max) {
  if (n_max < 0) throw std::domain_error("reflection_logdet: n_max must be nonnegative");
  const Eigen::MatrixXcd k = scaled_round_trip(geom, bc, n_max);
  LogDetResult out;
  if (k.size() == 0) return out;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(k, false);
  if (eig.info() != Eigen::Success)
    throw NonConvergent(fmt::format("eigenvalue solver failed at r/R = {}", geom.separation_ratio()));
  out.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(out.spectral_radius < 1.0))
    throw NonConvergent(fmt::format("spectral radius {} of the {} round trip at r/R = {} is not below 1",
                                    out.spectral_radius, to_string(bc), geom.separation_ratio()));

  std::complex<double> minus_logdet = 0.0;  // -log det(I - K)
  const double norm = k.norm();
  if (norm < kSeriesNormThreshold) {
    // -log det(I - K) = sum_p tr(K^p) / p, with |tr(K^p)| <= |K|_F^p.
    out.used_series = true;
    Eigen::MatrixXcd power = k;
    for (int p = 1;; ++p) {
      minus_logdet += power.trace() / static_cast<double>(p);
      const double tail = std::pow(norm, p + 1) / ((p + 1) * (1.0 - norm));
      if (tail <= 1e-17 * std::abs(minus_logdet) || p > 200) break;
      power = power * k;
    }
  } else {
    const Eigen::Index dim = k.rows();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Eigen::MatrixXcd::Identity(dim, dim) - k);
    const Eigen::MatrixXcd& packed = lu.matrixLU();
    std::complex<double> logdet = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) logdet += std::log(packed(i, i));
    if (lu.permutationP().determinant() < 0) logdet += std::complex<double>(0.0, std::numbers::pi);
    minus_logdet = -logdet;
  }

  if (std::abs(wrap_angle(minus_logdet.imag())) > kImagTolerance)
    throw NonConvergent(fmt::format("log det has imaginary part {} at r/R = {} ({})", minus_logdet.imag(),
                                    geom.separation_ratio(), to_string(bc)));
  out.value = 0.5 * minus_logdet.real();
  return out;
}

TwoDiskRenyi renyi2_two_disks_parts(const DiskPairGeometry& geom, int n_max) {
  return {reflection_logdet(geom, BoundaryCondition::Dirichlet, n_max).value,
          reflection_logdet(geom, BoundaryCondition::Neumann, n_max).value};
}

double renyi2_two_disks(const DiskPairGeometry& geom, int n_max) {
  return renyi2_two_disks_parts(geom, n_max).total();
}

double renyi2_two_disks_asymptotic(const DiskPairGeometry& geom) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double x = 1.0 / (geom.separation_ratio() * geom.separation_ratio());
  return 2.0 / pi2 * x + (10.0 / (3.0 * pi2) + 4.0 / (pi2 * pi2)) * x * x;
}

double renyi2_large_separation(double c0_a, double c0_b, double r, int d) {
  if (!(r > 0.0)) throw std::domain_error("renyi2_large_separation: r must be positive");
  if (d < 2) throw std::domain_error("renyi2_large_separation: d must exceed 1");
  return c0_a * c0_b / (2.0 * std::pow(r, 2 * (d - 1)));
}

std::vector<SweepPoint> separation_sweep(const std::vector<double>& r_over_R_grid, int n_max, int threads) {
  for (double r : r_over_R_grid)
    if (!(r > 2.0)) throw std::domain_error(fmt::format("separation_sweep: grid point {} must exceed 2", r));
  std::vector<SweepPoint> out(r_over_R_grid.size());
  parallel_for(
      out.size(),
      [&](std::size_t i) {
        SweepPoint& pt = out[i];
        pt.r_over_R = r_over_R_grid[i];
        try {
          pt.value = renyi2_two_disks_parts(DiskPairGeometry(pt.r_over_R), n_max);
        } catch (const NonConvergent& e) {
          pt.converged = false;
          pt.message = e.what();
        }
      },
      threads);
  return out;
}

}  // namespace renyi
