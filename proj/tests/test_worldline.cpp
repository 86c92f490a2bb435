#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "renyi/disk_multipole.hpp"
#include "renyi/errors.hpp"
#include "renyi/worldline.hpp"

using namespace renyi;

namespace {

constexpr double kPi = std::numbers::pi;

SamplingParams small_run(int n_loops, std::uint64_t seed) {
  SamplingParams p;
  p.n_loops = n_loops;
  p.n_points = 256;
  p.seed = seed;
  return p;
}

// Square loop in the (x, tau) plane crossing tau = 0 at x = +-1.
WorldlineLoop square_loop() {
  WorldlineLoop loop;
  loop.n_points = 4;
  loop.points = {{-1, 0, 1}, {1, 0, 1}, {1, 0, -1}, {-1, 0, -1}, {-1, 0, 1}};
  return loop;
}

bool consistent(const MCEstimate& a, const MCEstimate& b, double sigmas) {
  return std::abs(a.mean - b.mean) <= sigmas * std::hypot(a.stderr_, b.stderr_);
}

}  // namespace

TEST_CASE("regions") {
  const auto d = PlanarRegion::disk({1, 2}, 0.5);
  CHECK(d.contains({1.5, 2}));
  CHECK_FALSE(d.contains({1.51, 2}));
  CHECK(d.bounded());
  CHECK(d.area() == doctest::Approx(kPi / 4));
  const auto h = PlanarRegion::half_plane(2, {0, 2});
  CHECK(h.contains({5, 1}));
  CHECK_FALSE(h.contains({5, 0.99}));
  CHECK_FALSE(h.bounded());
  CHECK(std::isinf(h.area()));
  CHECK(PlanarRegion::gap(d, PlanarRegion::disk({4, 2}, 1)) == doctest::Approx(1.5));
  CHECK(PlanarRegion::gap(PlanarRegion::disk({0, -3}, 1), h) == doctest::Approx(3.0));
  CHECK(PlanarRegion::disjoint(PlanarRegion::half_plane(1, {1, 0}), PlanarRegion::half_plane(1, {-1, 0})));
  CHECK_FALSE(PlanarRegion::disjoint(PlanarRegion::half_plane(1, {1, 0}), PlanarRegion::half_plane(1, {0, 1})));
  const auto u = PlanarRegion::union_of({PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({5, 0}, 2)});
  CHECK(u.area() == doctest::Approx(5 * kPi));
  CHECK(u.contains({6.5, 0}));
  CHECK_FALSE(u.contains({2.5, 0}));
  CHECK(u.bounds()[2] == doctest::Approx(7.0));
  CHECK_THROWS_AS(PlanarRegion::union_of({PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({1, 0}, 1)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PlanarRegion::disk({0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(PlanarRegion::half_plane(0, {0, 0}), std::invalid_argument);
}

TEST_CASE("uniform samples stay inside and cover the region evenly") {
  const auto u = PlanarRegion::union_of({PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({5, 0}, 2)});
  std::mt19937_64 rng(7);
  int big = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = u.sample_uniform(rng);
    REQUIRE(u.contains(p));
    big += p.x > 2.5;
  }
  // Area fraction 4/5.
  CHECK(std::abs(big / double(n) - 0.8) < 4 * std::sqrt(0.16 / n));
}

TEST_CASE("unit loops are closed and centered") {
  const auto loops = sample_unit_loops(50, 64, 3);
  REQUIRE(loops.size() == 50);
  for (const auto& l : loops) {
    REQUIRE(l.points.size() == 65);
    for (int c = 0; c < 3; ++c) {
      CHECK(l.points.front()[c] == l.points.back()[c]);
      double mean = 0;
      for (int j = 0; j < 64; ++j) mean += l.points[j][c];
      CHECK(std::abs(mean / 64) < 1e-13);
    }
  }
  CHECK_THROWS_AS(sample_unit_loops(1, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_unit_loops(0, 64, 1), std::invalid_argument);
}

TEST_CASE("loops are deterministic in the seed") {
  const auto a = sample_unit_loops(3, 32, 11), b = sample_unit_loops(3, 32, 11), c = sample_unit_loops(3, 32, 12);
  CHECK(a[2].points == b[2].points);
  CHECK(a[2].points != c[2].points);
}

TEST_CASE("gyration radius matches the discrete bridge") {
  for (int n : {8, 64, 1024})
    CHECK(mean_gyration_radius_sq(n) == doctest::Approx((1.0 - 1.0 / (double(n) * n)) / 4).epsilon(1e-13));

  const int n_points = 64, n_loops = 4000;
  const auto loops = sample_unit_loops(n_loops, n_points, 5);
  double sum = 0, sum2 = 0, inc = 0, inc2 = 0;
  for (const auto& l : loops) {
    double rg = 0;
    for (int j = 0; j < n_points; ++j) rg += l.points[j][0] * l.points[j][0] + l.points[j][1] * l.points[j][1] +
                                             l.points[j][2] * l.points[j][2];
    rg /= n_points;
    sum += rg;
    sum2 += rg * rg;
    const double d = l.points[1][0] - l.points[0][0];
    inc += d * d;
    inc2 += d * d * d * d;
  }
  const double mean = sum / n_loops, sd = std::sqrt(sum2 / n_loops - mean * mean);
  CHECK(std::abs(mean - mean_gyration_radius_sq(n_points)) < 3 * sd / std::sqrt(double(n_loops)));
  // Single-step variance of a closed bridge: (1/N)(1 - 1/N).
  const double want = (1.0 / n_points) * (1.0 - 1.0 / n_points);
  const double inc_mean = inc / n_loops, inc_sd = std::sqrt(inc2 / n_loops - inc_mean * inc_mean);
  CHECK(std::abs(inc_mean - want) < 3 * inc_sd / std::sqrt(double(n_loops)));
}

TEST_CASE("intersection counts") {
  const auto loop = square_loop();
  const std::vector<PlanarRegion> regions{PlanarRegion::disk({3, 0}, 1), PlanarRegion::disk({-3, 0}, 1)};

  // Crossings at (+-2, 0): exactly on both boundaries, which count as inside.
  auto r = intersection_counts(loop, {0, 0, 0}, 4.0, regions);
  CHECK(r.crossings == 2);
  CHECK(r.hits == std::vector<bool>{true, true});
  CHECK_FALSE(r.outside);

  r = intersection_counts(loop, {0, 0, 0}, 1.0, regions);
  CHECK(r.hits == std::vector<bool>{false, false});
  CHECK(r.outside);

  r = intersection_counts(loop, {1, 0, 0}, 4.0, regions);
  CHECK(r.hits == std::vector<bool>{true, false});
  CHECK(r.outside);

  r = intersection_counts(loop, {0, 0, 5}, 1.0, regions);
  CHECK(r.crossings == 0);
  CHECK(r.hits == std::vector<bool>{false, false});
  CHECK_FALSE(r.outside);

  CHECK_THROWS_AS(intersection_counts(loop, {0, 0, 0}, 0.0, regions), std::invalid_argument);
}

TEST_CASE("default loop-length strata") {
  const auto e = default_s_edges(2.0, 4, 3.0);
  REQUIRE(e.size() == 5);
  CHECK(e.front() == doctest::Approx(4.0 / 9));
  CHECK(std::isinf(e.back()));
  for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(e[i] < e[i + 1]);
  CHECK_THROWS_AS(default_s_edges(0.0), std::invalid_argument);
}

TEST_CASE("estimates do not depend on the worker count") {
  auto p = small_run(12, 42);
  p.threads = 1;
  const auto a = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1), p);
  p.threads = 3;
  const auto b = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1), p);
  CHECK(a.dirichlet.mean == b.dirichlet.mean);
  CHECK(a.dirichlet.stderr_ == b.dirichlet.stderr_);
  CHECK(a.neumann.mean == b.neumann.mean);
  CHECK(a.dirichlet.n_samples == b.dirichlet.n_samples);
  p.seed = 43;
  const auto c = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1), p);
  CHECK(c.dirichlet.mean != a.dirichlet.mean);
}

TEST_CASE("mutual estimate is symmetric and scale invariant") {
  const auto p = small_run(100, 9);
  const auto ab = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({5, 0}, 1), p);
  const auto ba = estimate_mutual(PlanarRegion::disk({5, 0}, 1), PlanarRegion::disk({0, 0}, 1), small_run(100, 10));
  const auto big = estimate_mutual(PlanarRegion::disk({0, 0}, 2), PlanarRegion::disk({10, 0}, 2), small_run(100, 11));
  CHECK(ab.dirichlet.mean > 0.0);
  CHECK(consistent(ab.dirichlet, ba.dirichlet, 3.0));
  CHECK(consistent(ab.dirichlet, big.dirichlet, 3.0));
  CHECK(ab.neumann.mean >= 0.0);
  CHECK(ab.neumann.mean < ab.dirichlet.mean);
}

TEST_CASE("normalized mutual estimate tracks the multipole Dirichlet value") {
  const auto e = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({5, 0}, 1), small_run(200, 21));
  const double want = renyi2_two_disks_parts(DiskPairGeometry(5.0), 12).dirichlet;
  const double got = worldline_prefactor() * e.dirichlet.mean;
  const double err = worldline_prefactor() * e.dirichlet.stderr_;
  CHECK(e.dirichlet.stderr_ / e.dirichlet.mean < 0.1);
  CHECK(std::abs(got - want) < 3 * err);
}

TEST_CASE("widely separated small disks: Neumann vanishes, Dirichlet survives") {
  const auto e = estimate_mutual(PlanarRegion::disk({0, 0}, 0.1), PlanarRegion::disk({10, 0}, 0.1), small_run(60, 4));
  CHECK(e.dirichlet.mean > 0.0);
  CHECK(std::abs(e.neumann.mean) <= 3 * e.neumann.stderr_);
}

TEST_CASE("disk facing a half-plane") {
  const auto e = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::half_plane(3, {1, 0}), small_run(40, 8));
  CHECK(e.dirichlet.mean > 0.0);
  CHECK(e.dirichlet.stderr_ < e.dirichlet.mean);
  CHECK_THROWS_AS(estimate_mutual(PlanarRegion::half_plane(1, {1, 0}), PlanarRegion::half_plane(1, {-1, 0}),
                                  small_run(8, 1)),
                  std::invalid_argument);
}

TEST_CASE("inequalities for three collinear disks") {
  const auto rep = inequality_suite(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({6, 0}, 1),
                                    PlanarRegion::disk({3, 0}, 1), small_run(40, 17));
  CHECK(rep.samples > 0);
  CHECK(rep.dominance_violations == 0);
  CHECK(rep.neumann_violations == 0);
  CHECK(rep.checks.size() == 6);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  CHECK(rep.all_pass());
  CHECK(rep.tripartite.dirichlet.mean > 0.0);
  CHECK(rep.tripartite.neumann.mean <= 0.0);
}

TEST_CASE("a distant tiny third disk carries no tripartite information") {
  const auto a = PlanarRegion::disk({0, 0}, 1), b = PlanarRegion::disk({4, 0}, 1);
  const auto c = PlanarRegion::disk({2, 60}, 0.01);
  auto p = small_run(24, 5);
  p.s_edges = default_s_edges(2.0);
  const auto rep = inequality_suite(a, b, c, p);
  CHECK(rep.all_pass());
  CHECK(rep.tripartite.dirichlet.mean <= 1e-3 * rep.mutual.dirichlet.mean + 3 * rep.tripartite.dirichlet.stderr_);
  const auto tri = estimate_tripartite(a, b, c, p);
  CHECK(tri.dirichlet.mean <= 1e-3 * rep.mutual.dirichlet.mean + 3 * tri.dirichlet.stderr_);
}

TEST_CASE("preconditions") {
  const auto p = small_run(8, 1);
  CHECK_THROWS_AS(estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({1.5, 0}, 1), p),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_tripartite(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1),
                                      PlanarRegion::disk({4.5, 0}, 1), p),
                  std::invalid_argument);
  auto bad = p;
  bad.n_points = 100;
  CHECK_THROWS_AS(estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1), bad),
                  std::invalid_argument);
  bad = p;
  bad.s_edges = {1.0, 0.5};
  CHECK_THROWS_AS(estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1), bad),
                  std::invalid_argument);
}

TEST_CASE("a demanding precision target raises InsufficientStatistics") {
  auto p = small_run(8, 1);
  p.max_rel_stderr = 1e-6;
  CHECK_THROWS_AS(estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({4, 0}, 1), p),
                  InsufficientStatistics);
}
