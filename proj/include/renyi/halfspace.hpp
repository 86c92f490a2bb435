#pragma once

#include "renyi/disk_multipole.hpp"

namespace renyi {

/// Two opposite half-spaces with faces a distance l apart.
struct HalfSpacePairGeometry {
  double separation = 1.0;
  explicit HalfSpacePairGeometry(double l);
};

/// A disk of radius R a distance l from the face of a half-space.
struct DiskHalfSpaceGeometry {
  double disk_radius = 1.0;
  double separation = 1.0;
  DiskHalfSpaceGeometry(double R, double l);
  /// R/l < 1; outside this regime the monopole result is only indicative.
  bool in_asymptotic_regime() const { return disk_radius < separation; }
};

/// Gauss-Legendre tensor grid on [-alpha_cutoff, alpha_cutoff] per axis.
/// Every result is recomputed with twice the nodes; a relative change above
/// `tolerance` raises QuadratureNotConverged.
struct QuadratureSpec {
  double alpha_cutoff = 40.0;
  int nodes_per_axis = 200;
  double tolerance = 1e-6;
};

inline constexpr QuadratureSpec kDefaultQuadrature2d{40.0, 200, 1e-6};
inline constexpr QuadratureSpec kDefaultQuadrature4d{20.0, 64, 1e-6};

/// (1/4pi)[sech((a+a')/2) +- sech((a-a')/2)], + Dirichlet, - Neumann.
double kernel_C(BoundaryCondition bc, double alpha, double alpha_prime);

struct HalfSpaceResult {
  double dirichlet = 0.0;
  double neumann = 0.0;
  double total() const { return dirichlet + neumann; }
};

/// Tr N contribution to I2 per unit edge length.
HalfSpaceResult first_reflection_halfspaces(const HalfSpacePairGeometry& geom,
                                            const QuadratureSpec& quad = kDefaultQuadrature2d);

/// Tr N^2 / 2 contribution to I2 per unit edge length.
HalfSpaceResult second_reflection_halfspaces(const HalfSpacePairGeometry& geom,
                                             const QuadratureSpec& quad = kDefaultQuadrature4d,
                                             int threads = 0);

struct DiskHalfSpaceResult {
  double value = 0.0;            // I2
  double double_integral = 0.0;  // bare alpha integral, 4 pi analytically
  double relative_error = 0.0;   // (R/l)^2 estimate of dropped multipoles
};

DiskHalfSpaceResult disk_halfspace(const DiskHalfSpaceGeometry& geom,
                                   const QuadratureSpec& quad = kDefaultQuadrature2d);

/// Monopole capacitance 2R/pi of a disk.
double disk_capacitance_monopole(double R);

}  // namespace renyi
