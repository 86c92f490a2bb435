#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "renyi/specfun.hpp"

namespace renyi {

enum class BoundaryCondition { Dirichlet, Neumann };

inline constexpr BoundaryCondition kBoundaryConditions[] = {BoundaryCondition::Dirichlet,
                                                            BoundaryCondition::Neumann};

const char* to_string(BoundaryCondition bc);

/// Diagonal multipole response C_nm of a unit disk, stored in flat-index order.
struct CapacitanceMatrix {
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int n_max = 0;
  std::vector<double> entries;

  double operator()(MultipoleIndex idx) const { return entries.at(flat_index(idx)); }
};

/// Re-expansion of outgoing waves about a displaced origin. Rows are the
/// regular index (n', m') about the new origin, columns the outgoing index
/// (n, m) about the old one.
struct TranslationMatrix {
  double xi0 = 0.0;
  double eta0 = 0.0;
  double phi0 = 0.0;
  int n_max = 0;
  Eigen::MatrixXcd entries;

  std::complex<double> operator()(MultipoleIndex row, MultipoleIndex col) const {
    return entries(flat_index(row), flat_index(col));
  }
};

/// Two coplanar disks of equal radius; lengths in units of the radius.
class DiskPairGeometry {
 public:
  explicit DiskPairGeometry(double separation_ratio);
  double separation_ratio() const { return separation_ratio_; }
  /// Spheroidal radial coordinate of the center-to-center vector.
  double xi0() const;

 private:
  double separation_ratio_;
};

CapacitanceMatrix capacitance_disk(BoundaryCondition bc, int n_max);

TranslationMatrix translation_matrix(double xi0, double eta0, double phi0, int n_max);

/// N = C U+ C U- for the given boundary condition, (n_max+1)^2 square.
Eigen::MatrixXcd reflection_operator(const DiskPairGeometry& geom, BoundaryCondition bc, int n_max);

struct LogDetResult {
  double value = 0.0;          // -1/2 log det(I - N)
  double spectral_radius = 0.0;
  bool used_series = false;
};

/// -1/2 log det(I - N) for one boundary condition. Throws NonConvergent when
/// the spectral radius reaches 1 or the determinant fails its reality check.
LogDetResult reflection_logdet(const DiskPairGeometry& geom, BoundaryCondition bc, int n_max);

struct TwoDiskRenyi {
  double dirichlet = 0.0;
  double neumann = 0.0;
  double total() const { return dirichlet + neumann; }
};

TwoDiskRenyi renyi2_two_disks_parts(const DiskPairGeometry& geom, int n_max);
double renyi2_two_disks(const DiskPairGeometry& geom, int n_max);

/// Leading plus subleading large-separation series.
double renyi2_two_disks_asymptotic(const DiskPairGeometry& geom);

/// Monopole-only large-distance law C0_A C0_B / (2 r^(2(d-1))).
double renyi2_large_separation(double c0_a, double c0_b, double r, int d);

struct SweepPoint {
  double r_over_R = 0.0;
  TwoDiskRenyi value;
  bool converged = true;
  std::string message;
};

/// Independent evaluation at every grid point; non-convergent points are flagged.
std::vector<SweepPoint> separation_sweep(const std::vector<double>& r_over_R_grid, int n_max,
                                         int threads = 0);

}  // namespace renyi
