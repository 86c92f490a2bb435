#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace renyi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Closed region of the tau = 0 plane.
class PlanarRegion {
 public:
  struct Disk {
    Vec2 center;
    double radius = 1.0;
  };
  /// Points p with dot(normal, p) >= offset.
  struct HalfPlane {
    double offset = 0.0;
    Vec2 normal{1.0, 0.0};
  };
  struct Union {
    std::vector<PlanarRegion> members;
  };

  static PlanarRegion disk(Vec2 center, double radius);
  static PlanarRegion half_plane(double offset, Vec2 normal);
  /// Throws std::invalid_argument unless the members are pairwise disjoint.
  static PlanarRegion union_of(std::vector<PlanarRegion> members);

  bool contains(Vec2 p) const;
  bool bounded() const;
  double area() const;  // infinity when unbounded
  /// Axis-aligned bounding box {xmin, ymin, xmax, ymax}; infinite sides when unbounded.
  std::array<double, 4> bounds() const;
  /// Uniform point of a bounded region.
  Vec2 sample_uniform(std::mt19937_64& rng) const;
  /// Lower bound on the distance between the two regions (0 if they may touch).
  static double gap(const PlanarRegion& a, const PlanarRegion& b);
  /// True when the regions are provably disjoint.
  static bool disjoint(const PlanarRegion& a, const PlanarRegion& b);

  const std::variant<Disk, HalfPlane, Union>& shape() const { return shape_; }
  std::string describe() const;

 private:
  explicit PlanarRegion(std::variant<Disk, HalfPlane, Union> s) : shape_(std::move(s)) {}
  std::variant<Disk, HalfPlane, Union> shape_;
};

/// Discrete closed Brownian bridge in three dimensions (x, y, tau) with unit
/// diffusion over t in [0, 1] and zero centroid. points has n_points + 1
/// entries, the last repeating the first.
struct WorldlineLoop {
  int n_points = 0;
  std::vector<std::array<double, 3>> points;
};

std::vector<WorldlineLoop> sample_unit_loops(int n_loops, int n_points, std::uint64_t seed);

/// Mean squared radius of gyration of loops from sample_unit_loops.
double mean_gyration_radius_sq(int n_points);

struct IntersectionResult {
  std::vector<bool> hits;      // per region: some crossing lies inside it
  bool outside = false;        // some crossing lies outside every listed region
  int crossings = 0;
};

/// Places the loop as x_cm + sqrt(s) y and classifies its crossings of tau = 0.
IntersectionResult intersection_counts(const WorldlineLoop& loop, const std::array<double, 3>& x_cm, double s,
                                       const std::vector<PlanarRegion>& regions);

struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct SamplingParams {
  int n_loops = 4096;  // mean per stratum; a quarter is a pilot, the rest is allocated by spread
  int n_points = 1024;
  int placements_per_loop = 16;
  /// Stratum edges in loop length s, ascending; the last may be infinity.
  /// Empty selects default_s_edges for the configuration.
  std::vector<double> s_edges;
  std::uint64_t seed = 1;
  int threads = 0;
  /// Bridge refinement stops at this planar step; <= 0 selects 0.1% of the smallest disk radius.
  double resolution = 0.0;
  /// InsufficientStatistics when the Dirichlet stderr/mean exceeds this (<= 0 disables).
  double max_rel_stderr = 0.0;
};

/// n_strata edges equally spaced in s^(-1/2) from 0 up to kappa / gap, as s values.
std::vector<double> default_s_edges(double gap, int n_strata = 16, double kappa = 3.0);

struct SectorEstimates {
  MCEstimate dirichlet;
  MCEstimate neumann;
  /// Share of the Dirichlet estimate from the stratum of shortest loops.
  double short_loop_fraction = 0.0;
};

/// int ds s^(-5/2) int d^3x_cm <N(A,B)> and its Neumann analogue.
SectorEstimates estimate_mutual(const PlanarRegion& a, const PlanarRegion& b, const SamplingParams& params);

/// Same integral with the tripartite indicators; the Neumann sector is <= 0.
SectorEstimates estimate_tripartite(const PlanarRegion& a, const PlanarRegion& b, const PlanarRegion& c,
                                    const SamplingParams& params);

struct InequalityCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;
};

struct InequalityReport {
  SectorEstimates mutual;
  SectorEstimates tripartite;
  std::int64_t samples = 0;
  std::int64_t dominance_violations = 0;  // N(A,B,C) > N(A,B)
  std::int64_t neumann_violations = 0;    // N'(A,B) > N(A,B) or |N'(A,B,C)| > N(A,B,C)
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
};

InequalityReport inequality_suite(const PlanarRegion& a, const PlanarRegion& b, const PlanarRegion& c,
                                  const SamplingParams& params);

/// 1 / (2 (2 pi)^(3/2)): converts the unnormalized loop integral of unit-diffusion loops into
/// the Dirichlet free-energy combination.
double worldline_prefactor();

}  // namespace renyi
