#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>

#include <fmt/core.h>
#include <gsl/gsl_integration.h>

#include "renyi/disk_multipole.hpp"
#include "renyi/errors.hpp"
#include "renyi/halfspace.hpp"
#include "renyi/specfun.hpp"
#include "renyi/worldline.hpp"

namespace renyi::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Fit {
  double slope = 0.0;
  double slope_err = 0.0;
};

// Weighted least squares of y against x.
Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  return {(sw * sxy - sx * sy) / det, std::sqrt(sw / det)};
}

struct Worldlines {
  const Options& opts;
  std::map<double, MCEstimate> cache;

  const MCEstimate& dirichlet_at(double r) {
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;
    SamplingParams p;
    const std::int64_t per_loop = 16 * static_cast<std::int64_t>(p.placements_per_loop);
    p.n_loops = static_cast<int>(std::max<std::int64_t>(8, (opts.placements + per_loop - 1) / per_loop));
    p.seed = opts.seed + static_cast<std::uint64_t>(std::llround(r * 1000));
    p.threads = opts.threads;
    const auto e = estimate_mutual(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({r, 0}, 1), p);
    return cache.emplace(r, e.dirichlet).first->second;
  }
};

void capacitances(Criterion& c) {
  const auto d = capacitance_disk(BoundaryCondition::Dirichlet, 1);
  const auto n = capacitance_disk(BoundaryCondition::Neumann, 1);
  double worst = 0.0;
  bool exact_zero = true;
  auto check = [&](double got, double want) {
    if (want == 0.0)
      exact_zero = exact_zero && got == 0.0;
    else
      worst = std::max(worst, rel_diff(got, want));
  };
  check(d({0, 0}), 2 / kPi);
  check(d({1, -1}), 4 / (9 * kPi));
  check(d({1, 1}), 4 / (9 * kPi));
  check(d({1, 0}), 0.0);
  check(n({0, 0}), 0.0);
  check(n({1, -1}), 0.0);
  check(n({1, 1}), 0.0);
  check(n({1, 0}), -2 / (9 * kPi));
  c.pass = exact_zero && worst <= 1e-12;
  c.detail = fmt::format("max rel err {:.2e}, vanishing entries exact: {}", worst, exact_zero);
}

void translation_monopole(Criterion& c) {
  double worst = 0.0;
  for (double r : {2.05, 3.0, 10.0, 100.0}) {
    const DiskPairGeometry g(r);
    const auto u = translation_matrix(g.xi0(), 0.0, kPi / 2, 0);
    worst = std::max(worst, std::abs(u({0, 0}, {0, 0}) - std::asin(1 / r)));
  }
  c.pass = worst <= 1e-10;
  c.detail = fmt::format("max |U0000 - arcsin(R/r)| = {:.2e}", worst);
}

void leading_asymptote(Criterion& c) {
  const double r = 40.0;
  const double v = renyi2_two_disks(DiskPairGeometry(r), 3) * r * r * kPi * kPi / 2;
  c.pass = v >= 0.99 && v <= 1.01;
  c.detail = fmt::format("I2 r^2 pi^2/2 = {:.6f}", v);
}

void subleading(Criterion& c) {
  const double r = 10.0;
  const double target = 10 / (3 * kPi * kPi) + 4 / std::pow(kPi, 4);
  const double i2 = renyi2_two_disks(DiskPairGeometry(r), 20);
  const double coeff = (i2 - 2 / (kPi * kPi * r * r)) * std::pow(r, 4);
  c.pass = rel_diff(coeff, target) <= 0.05;
  c.detail = fmt::format("coefficient {:.5f} vs {:.5f} ({:+.2f}%)", coeff, target, 100 * (coeff / target - 1));
}

void truncation(Criterion& c) {
  const DiskPairGeometry g(2.5);
  const double lo = renyi2_two_disks(g, 15), hi = renyi2_two_disks(g, 25);
  const double d = rel_diff(lo, hi);
  c.pass = d < 0.01;
  c.detail = fmt::format("I2(25) = {:.10g}, relative change {:.2e}", hi, d);
}

void monotonic(Criterion& c, int threads) {
  const std::vector<double> grid{2.1, 2.5, 3, 4, 5, 7, 10, 15, 20};
  const auto pts = separation_sweep(grid, 20, threads);
  bool ok = true;
  std::string why;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = pts[i].value.total();
    if (!pts[i].converged || !(v > 0.0)) {
      ok = false;
      why = fmt::format("r/R = {}: {}", pts[i].r_over_R, pts[i].converged ? "not positive" : pts[i].message);
      break;
    }
    if (i > 0 && !(v < pts[i - 1].value.total())) {
      ok = false;
      why = fmt::format("not decreasing at r/R = {}", pts[i].r_over_R);
      break;
    }
  }
  c.pass = ok;
  c.detail = ok ? fmt::format("I2 from {:.6g} down to {:.6g}", pts.front().value.total(), pts.back().value.total())
                : why;
}

void neumann_decay(Criterion& c) {
  std::vector<double> x, y, s;
  for (double r : {20.0, 30.0, 50.0, 70.0, 100.0}) {
    x.push_back(std::log(r));
    y.push_back(std::log(renyi2_two_disks_parts(DiskPairGeometry(r), 8).neumann));
    s.push_back(1.0);
  }
  const double slope = linear_fit(x, y, s).slope;
  c.pass = std::abs(slope + 6) <= 0.2;
  c.detail = fmt::format("slope {:.4f}", slope);
}

void halfspace_first(Criterion& c) {
  double worst = 0.0;
  for (double l : {0.5, 1.0, 2.0}) {
    const double v = l * first_reflection_halfspaces(HalfSpacePairGeometry(l)).total();
    worst = std::max(worst, rel_diff(v, 1 / (16 * kPi)));
  }
  c.pass = worst <= 1e-6;
  c.detail = fmt::format("max rel err of l * first reflection: {:.2e}", worst);
}

void halfspace_second(Criterion& c, int threads) {
  const HalfSpacePairGeometry g(1.0);
  const double first = first_reflection_halfspaces(g).total();
  const double second = second_reflection_halfspaces(g, kDefaultQuadrature4d, threads).total();
  const double a2 = first + second;
  c.pass = std::abs(a2 - 0.022) <= 0.001 && a2 >= 0.020 && a2 <= 0.024;
  c.detail = fmt::format("A2 = {:.7f} (first {:.7f}, second {:.7f})", a2, first, second);
}

void disk_halfspace_check(Criterion& c) {
  double worst = 0.0, integral_err = 0.0;
  for (auto [R, l] : {std::pair{1.0, 10.0}, std::pair{0.5, 20.0}}) {
    const auto res = disk_halfspace(DiskHalfSpaceGeometry(R, l));
    worst = std::max(worst, rel_diff(res.value * l / R, 1 / (kPi * kPi)));
    integral_err = std::max(integral_err, rel_diff(res.double_integral, 4 * kPi));
  }
  c.pass = worst <= 1e-4 && integral_err <= 1e-6;
  c.detail = fmt::format("I2 l/R rel err {:.2e}, double integral rel err {:.2e}", worst, integral_err);
}

void cross_validation(Criterion& c, Worldlines& wl) {
  const auto& w5 = wl.dirichlet_at(5.0);
  const auto& w8 = wl.dirichlet_at(8.0);
  const double m5 = renyi2_two_disks_parts(DiskPairGeometry(5.0), 20).dirichlet;
  const double m8 = renyi2_two_disks_parts(DiskPairGeometry(8.0), 20).dirichlet;
  const double scale = m5 / w5.mean;
  const double predicted = scale * w8.mean;
  const double rel5 = w5.stderr_ / w5.mean, rel8 = w8.stderr_ / w8.mean;
  const double sigma = predicted * std::hypot(rel5, rel8);
  const double z = (predicted - m8) / sigma;
  c.pass = std::abs(z) <= 3.0 && rel5 <= 0.05 && rel8 <= 0.05;
  c.detail = fmt::format("predicted {:.5e} vs multipole {:.5e} ({:+.2f} sigma), stderr/mean {:.2f}% and {:.2f}%, "
                         "{} placements each",
                         predicted, m8, z, 100 * rel5, 100 * rel8, w8.n_samples);
}

void worldline_exponent(Criterion& c, Worldlines& wl) {
  std::vector<double> x, y, s;
  for (double r : {5.0, 8.0, 12.0, 20.0}) {
    const auto& e = wl.dirichlet_at(r);
    x.push_back(std::log(r));
    y.push_back(std::log(e.mean));
    s.push_back(e.stderr_ / e.mean);
  }
  const Fit f = linear_fit(x, y, s);
  c.pass = std::abs(f.slope + 2) <= 0.3;
  c.detail = fmt::format("exponent {:.3f} +- {:.3f}", f.slope, f.slope_err);
}

void inequalities(Criterion& c, const Options& opts) {
  SamplingParams p;
  p.n_loops = 1000;
  p.seed = opts.seed + 13;
  p.threads = opts.threads;
  const auto rep = inequality_suite(PlanarRegion::disk({0, 0}, 1), PlanarRegion::disk({6, 0}, 1),
                                    PlanarRegion::disk({3, 0}, 1), p);
  c.pass = rep.all_pass();
  const double i_ab = rep.mutual.dirichlet.mean + rep.mutual.neumann.mean;
  const double i_abc = rep.tripartite.dirichlet.mean + rep.tripartite.neumann.mean;
  std::string failed;
  for (const auto& chk : rep.checks)
    if (!chk.pass) failed += (failed.empty() ? "" : "; ") + chk.name;
  c.detail = fmt::format("{} samples, violations {}/{}, I(A,B,C) = {:.5g} <= I(A,B) = {:.5g}{}", rep.samples,
                         rep.dominance_violations, rep.neumann_violations, i_abc, i_ab,
                         failed.empty() ? "" : ", failed: " + failed);
}

void properties(Criterion& c) {
  std::vector<std::string> failures;

  // 3j: permutation and sign-flip symmetries, both orthogonality relations.
  double sym_err = 0.0;
  for (int j1 = 0; j1 <= 4; ++j1)
    for (int j2 = 0; j2 <= 4; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(4, j1 + j2); ++j3)
        for (int m1 = -j1; m1 <= j1; ++m1)
          for (int m2 = -j2; m2 <= j2; ++m2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            const double w = wigner3j(j1, j2, j3, m1, m2, m3);
            const double sign = (j1 + j2 + j3) % 2 ? -1.0 : 1.0;
            sym_err = std::max({sym_err, std::abs(wigner3j(j2, j3, j1, m2, m3, m1) - w),
                                std::abs(wigner3j(j2, j1, j3, m2, m1, m3) - sign * w),
                                std::abs(wigner3j(j1, j2, j3, -m1, -m2, -m3) - sign * w)});
          }
  double orth_err = 0.0;
  for (int j1 = 0; j1 <= 4; ++j1)
    for (int j2 = 0; j2 <= 4; ++j2) {
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(4, j1 + j2); ++j3)
        for (int j3p = std::abs(j1 - j2); j3p <= std::min(4, j1 + j2); ++j3p)
          for (int m3 = -std::min(j3, j3p); m3 <= std::min(j3, j3p); ++m3) {
            double sum = 0.0;
            for (int m1 = -j1; m1 <= j1; ++m1) {
              const int m2 = -m3 - m1;
              if (std::abs(m2) > j2) continue;
              sum += wigner3j(j1, j2, j3, m1, m2, m3) * wigner3j(j1, j2, j3p, m1, m2, m3);
            }
            orth_err = std::max(orth_err, std::abs((2 * j3 + 1) * sum - (j3 == j3p ? 1.0 : 0.0)));
          }
      for (int m1 = -j1; m1 <= j1; ++m1)
        for (int m1p = -j1; m1p <= j1; ++m1p)
          for (int m2 = -j2; m2 <= j2; ++m2)
            for (int m2p = -j2; m2p <= j2; ++m2p) {
              double sum = 0.0;
              for (int j3 = std::abs(j1 - j2); j3 <= j1 + j2; ++j3)
                sum += (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, -m1 - m2) *
                       wigner3j(j1, j2, j3, m1p, m2p, -m1 - m2);
              orth_err = std::max(orth_err, std::abs(sum - (m1 == m1p && m2 == m2p ? 1.0 : 0.0)));
            }
    }
  if (sym_err > 1e-13) failures.push_back(fmt::format("3j symmetry {:.1e}", sym_err));
  if (orth_err > 1e-12) failures.push_back(fmt::format("3j orthogonality {:.1e}", orth_err));

  // Spherical harmonics: Gram matrix on a rule exact for degree <= 8.
  constexpr int kEta = 20, kPhi = 24, kN = 8;
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(kEta);
  std::vector<double> eta(kEta), weight(kEta);
  for (int i = 0; i < kEta; ++i) gsl_integration_glfixed_point(-1, 1, i, &eta[i], &weight[i], table);
  gsl_integration_glfixed_table_free(table);
  const int size = basis_size(kN);
  std::vector<std::complex<double>> values(static_cast<size_t>(size) * kEta * kPhi);
  for (int f = 0; f < size; ++f)
    for (int i = 0; i < kEta; ++i)
      for (int k = 0; k < kPhi; ++k)
        values[(static_cast<size_t>(f) * kEta + i) * kPhi + k] = sph_harm(index_at(f), eta[i], 2 * kPi * k / kPhi);
  double gram_err = 0.0;
  for (int a = 0; a < size; ++a)
    for (int b = a; b < size; ++b) {
      std::complex<double> sum = 0.0;
      for (int i = 0; i < kEta; ++i)
        for (int k = 0; k < kPhi; ++k)
          sum += weight[i] * std::conj(values[(static_cast<size_t>(a) * kEta + i) * kPhi + k]) *
                 values[(static_cast<size_t>(b) * kEta + i) * kPhi + k];
      sum *= 2 * kPi / kPhi;
      gram_err = std::max(gram_err, std::abs(sum - (a == b ? 1.0 : 0.0)));
    }
  if (gram_err > 1e-10) failures.push_back(fmt::format("Y normalization {:.1e}", gram_err));

  // Radial functions: finite and nonnegative.
  int bad = 0;
  for (int n = 0; n <= 20; ++n)
    for (int m = 0; m <= n; ++m)
      for (int i = 0; i <= 5000; ++i) {
        const double xi = 0.01 * i;
        const double j = j_fn({n, m}, xi), h = h_fn({n, m}, xi);
        if (!(std::isfinite(j) && std::isfinite(h) && j >= 0.0 && h >= 0.0)) ++bad;
      }
  if (bad) failures.push_back(fmt::format("{} negative or non-finite radial values", bad));

  c.pass = failures.empty();
  if (c.pass)
    c.detail = fmt::format("3j sym {:.1e}, orth {:.1e}; Y gram {:.1e}; radial functions nonnegative", sym_err,
                           orth_err, gram_err);
  else
    for (const auto& f : failures) c.detail += (c.detail.empty() ? "" : "; ") + f;
}

}  // namespace

std::vector<Criterion> run(const Options& opts, const std::function<void(const Criterion&)>& report) {
  Worldlines wl{opts, {}};
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> suite{
      {"disk capacitances", capacitances},
      {"translation monopole closed form", translation_monopole},
      {"two-disk leading asymptote", leading_asymptote},
      {"two-disk subleading coefficient", subleading},
      {"truncation convergence", truncation},
      {"monotonicity and positivity", [&](Criterion& c) { monotonic(c, opts.threads); }},
      {"Neumann decay exponent", neumann_decay},
      {"half-space first reflection", halfspace_first},
      {"half-space two-reflection coefficient", [&](Criterion& c) { halfspace_second(c, opts.threads); }},
      {"disk-half-space", disk_halfspace_check},
      {"worldline cross-validation", [&](Criterion& c) { cross_validation(c, wl); }},
      {"worldline exponent", [&](Criterion& c) { worldline_exponent(c, wl); }},
      {"inequality suite", [&](Criterion& c) { inequalities(c, opts); }},
      {"property suites", properties},
  };
  std::vector<Criterion> out;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    Criterion c;
    c.id = id;
    c.name = suite[i].first;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      suite[i].second(c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = fmt::format("error: {}", e.what());
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) report(c);
    out.push_back(std::move(c));
  }
  return out;
}

std::string format_line(const Criterion& c) {
  return fmt::format("[{}] {:2d} {:<38} {:8.2f}s  {}", c.pass ? "PASS" : "FAIL", c.id, c.name, c.seconds, c.detail);
}

}  // namespace renyi::acceptance
