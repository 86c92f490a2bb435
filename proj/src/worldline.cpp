#include "renyi/worldline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>
#include <fmt/core.h>

#include "renyi/errors.hpp"
#include "renyi/parallel.hpp"

namespace renyi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

double dist(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

// FFTW planning is not thread safe; plans are made and destroyed under this lock.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class BridgeSynth {
 public:
  explicit BridgeSynth(int n) : n_(n) {
    spectrum_ = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    samples_ = fftw_alloc_real(static_cast<size_t>(n));
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_c2r_1d(n, spectrum_, samples_, FFTW_ESTIMATE);
  }
  ~BridgeSynth() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(spectrum_);
    fftw_free(samples_);
  }
  BridgeSynth(const BridgeSynth&) = delete;
  BridgeSynth& operator=(const BridgeSynth&) = delete;

  // Exact N-step closed bridge: increments i.i.d. N(0, 1/N) conditioned on a
  // zero sum, centroid removed. Mode k of y has E|Y_k|^2 = 1/(4 sin^2(pi k/N)).
  WorldlineLoop make(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    WorldlineLoop loop;
    loop.n_points = n_;
    loop.points.assign(static_cast<size_t>(n_) + 1, {0.0, 0.0, 0.0});
    for (int dim = 0; dim < 3; ++dim) {
      spectrum_[0][0] = spectrum_[0][1] = 0.0;
      for (int k = 1; k < n_ / 2; ++k) {
        const double sd = 1.0 / (2.0 * std::sqrt(2.0) * n_ * std::sin(kPi * k / n_));
        spectrum_[k][0] = sd * gauss(rng);
        spectrum_[k][1] = sd * gauss(rng);
      }
      spectrum_[n_ / 2][0] = gauss(rng) / (2.0 * n_);
      spectrum_[n_ / 2][1] = 0.0;
      fftw_execute(plan_);
      for (int j = 0; j < n_; ++j) loop.points[j][dim] = samples_[j];
    }
    loop.points[n_] = loop.points[0];
    return loop;
  }

 private:
  int n_;
  fftw_complex* spectrum_ = nullptr;
  double* samples_ = nullptr;
  fftw_plan plan_ = nullptr;
};

BridgeSynth& synth_for(int n) {
  thread_local std::map<int, std::unique_ptr<BridgeSynth>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<BridgeSynth>(n);
  return *slot;
}

void check_loop_size(int n_points) {
  if (n_points < 8 || (n_points & (n_points - 1)) != 0)
    throw std::invalid_argument(fmt::format("n_points = {} must be a power of two >= 8", n_points));
}

WorldlineLoop unit_loop(int n_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return synth_for(n_points).make(rng);
}

// Planar positions (relative to the placement's planar center, in units of
// sqrt(s)) where the unit loop crosses tau = level.
void crossings_at(const WorldlineLoop& loop, double level, std::vector<Vec2>& out) {
  out.clear();
  const auto& p = loop.points;
  bool above = p[0][2] > level;
  for (int j = 0; j < loop.n_points; ++j) {
    const bool next_above = p[j + 1][2] > level;
    if (next_above != above) {
      const double f = (level - p[j][2]) / (p[j + 1][2] - p[j][2]);
      out.push_back({p[j][0] + f * (p[j + 1][0] - p[j][0]), p[j][1] + f * (p[j + 1][1] - p[j][1])});
    }
    above = next_above;
  }
}

// Indicators accumulated per placement. Index order: N(A,B), N'(A,B), N(A,B,C), N'(A,B,C).
constexpr int kQuantities = 4;

// Bridge deviations beyond this many standard deviations are neglected.
constexpr double kTailSigmas = 4.0;

enum class Cover { Inside, Outside, Straddle };

// Position of the closed circle (center, rho) relative to a region.
Cover cover(const PlanarRegion& region, Vec2 center, double rho) {
  return std::visit(
      [&](const auto& s) -> Cover {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlanarRegion::Disk>) {
          const double d = dist(center.x - s.center.x, center.y - s.center.y);
          if (d + rho <= s.radius) return Cover::Inside;
          if (d - rho > s.radius) return Cover::Outside;
          return Cover::Straddle;
        } else if constexpr (std::is_same_v<T, PlanarRegion::HalfPlane>) {
          const double h = dot(s.normal, center) - s.offset;
          if (h >= rho) return Cover::Inside;
          if (h < -rho) return Cover::Outside;
          return Cover::Straddle;
        } else {
          bool all_out = true;
          for (const auto& m : s.members) {
            const Cover c = cover(m, center, rho);
            if (c == Cover::Inside) return Cover::Inside;
            if (c != Cover::Outside) all_out = false;
          }
          return all_out ? Cover::Outside : Cover::Straddle;
        }
      },
      region.shape());
}

double lens_area(double d, double r1, double r2) {
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return kPi * rmin * rmin;
  const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0));
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

// Area of a bounded region inside the circle (center, rho).
double overlap_area(const PlanarRegion& region, Vec2 center, double rho) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlanarRegion::Disk>) {
          return lens_area(dist(center.x - s.center.x, center.y - s.center.y), s.radius, rho);
        } else if constexpr (std::is_same_v<T, PlanarRegion::HalfPlane>) {
          throw std::invalid_argument("overlap_area: unbounded region");
        } else {
          double a = 0.0;
          for (const auto& m : s.members) a += overlap_area(m, center, rho);
          return a;
        }
      },
      region.shape());
}

double smallest_scale(const PlanarRegion& region) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlanarRegion::Disk>) return s.radius;
        else if constexpr (std::is_same_v<T, PlanarRegion::HalfPlane>) return kInf;
        else {
          double r = kInf;
          for (const auto& m : s.members) r = std::min(r, smallest_scale(m));
          return r;
        }
      },
      region.shape());
}

struct PlacedPoint {
  Vec2 p;
  double tau;
};

// Classifies where the continuous loop crosses tau = 0. Segments whose
// crossings could change an undecided flag are refined by Brownian-bridge
// midpoint sampling down to the resolution floor; elsewhere the exact bridge
// crossing probability exp(-2 tau0 tau1 / v) decides.
class CrossingClassifier {
 public:
  CrossingClassifier(const std::vector<PlanarRegion>& regions, double floor_variance, std::mt19937_64& rng)
      : regions_(regions), floor_variance_(floor_variance), rng_(rng) {}

  void reset() {
    hit_.fill(false);
    outside_ = false;
  }
  bool hit(std::size_t r) const { return hit_[r]; }
  bool outside() const { return outside_; }
  bool settled() const {
    for (std::size_t r = 0; r < regions_.size(); ++r)
      if (!hit_[r]) return false;
    return outside_;
  }

  void segment(const PlacedPoint& a, const PlacedPoint& b, double v) {
    if (settled()) return;
    const double sigma = std::sqrt(v);
    const bool crosses = (a.tau > 0.0) != (b.tau > 0.0);
    if (!crosses && std::min(std::abs(a.tau), std::abs(b.tau)) > kTailSigmas * sigma) return;

    const Vec2 mid{0.5 * (a.p.x + b.p.x), 0.5 * (a.p.y + b.p.y)};
    const double rho = 0.5 * dist(b.p.x - a.p.x, b.p.y - a.p.y) + kTailSigmas * sigma;
    int possible = 0, undecided = 0, single = -1;
    bool inside_some = false;
    for (std::size_t r = 0; r < regions_.size(); ++r) {
      const Cover c = cover(regions_[r], mid, rho);
      if (c == Cover::Inside) inside_some = true;
      if (c != Cover::Outside) {
        ++possible;
        single = static_cast<int>(r);
        if (!hit_[r]) ++undecided;
      }
    }
    if (!inside_some) {
      ++possible;
      single = -1;
      if (!outside_) ++undecided;
    }
    if (undecided == 0) return;

    if (possible == 1) {
      if (crosses || bernoulli(std::exp(-2.0 * a.tau * b.tau / v))) mark(single);
      return;
    }
    if (v <= floor_variance_) {
      if (crosses) {
        const double f = a.tau / (a.tau - b.tau);
        classify({a.p.x + f * (b.p.x - a.p.x), a.p.y + f * (b.p.y - a.p.y)});
      } else if (bernoulli(std::exp(-2.0 * a.tau * b.tau / v))) {
        classify(mid);
      }
      return;
    }
    const double half = 0.5 * sigma;  // midpoint deviation of a bridge of variance v
    const PlacedPoint m{{mid.x + half * gauss_(rng_), mid.y + half * gauss_(rng_)},
                        0.5 * (a.tau + b.tau) + half * gauss_(rng_)};
    segment(a, m, 0.5 * v);
    segment(m, b, 0.5 * v);
  }

 private:
  bool bernoulli(double p) { return unit_(rng_) < p; }
  void mark(int cls) {
    if (cls < 0) outside_ = true;
    else hit_[static_cast<std::size_t>(cls)] = true;
  }
  void classify(Vec2 p) {
    for (std::size_t r = 0; r < regions_.size(); ++r) {
      if (regions_[r].contains(p)) {
        hit_[r] = true;
        return;
      }
    }
    outside_ = true;
  }

  const std::vector<PlanarRegion>& regions_;
  double floor_variance_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> gauss_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::array<bool, 3> hit_{};
  bool outside_ = false;
};

struct UnitTally {
  std::array<double, kQuantities> sum{};
  std::int64_t samples = 0;
  std::int64_t dominance_violations = 0;
  std::int64_t neumann_violations = 0;
};

struct EnsembleResult {
  std::array<MCEstimate, kQuantities> est;
  double short_loop_fraction = 0.0;
  std::int64_t samples = 0;
  std::int64_t dominance_violations = 0;
  std::int64_t neumann_violations = 0;
};

EnsembleResult run_ensemble(const std::vector<PlanarRegion>& regions, const SamplingParams& params) {
  check_loop_size(params.n_points);
  if (regions.size() < 2 || regions.size() > 3) throw std::invalid_argument("need two or three regions");
  if (params.n_loops < 2) throw std::invalid_argument("n_loops must be at least 2 per stratum");
  if (params.placements_per_loop < 1) throw std::invalid_argument("placements_per_loop must be positive");
  for (std::size_t i = 0; i < regions.size(); ++i)
    for (std::size_t j = i + 1; j < regions.size(); ++j)
      if (!PlanarRegion::disjoint(regions[i], regions[j]))
        throw std::invalid_argument(fmt::format("regions {} and {} are not disjoint", regions[i].describe(),
                                                regions[j].describe()));

  // Anchor on the smaller bounded one of A and B; every indicator requires hitting both.
  std::size_t anchor = regions.size();
  for (std::size_t i = 0; i < 2; ++i)
    if (regions[i].bounded() && (anchor == regions.size() || regions[i].area() < regions[anchor].area())) anchor = i;
  if (anchor == regions.size()) throw std::invalid_argument("A or B must be bounded");
  const PlanarRegion& anchor_region = regions[anchor];
  const double anchor_area = anchor_region.area();

  double resolution = params.resolution;
  if (!(resolution > 0.0)) {
    double scale = kInf;
    for (const auto& r : regions) scale = std::min(scale, smallest_scale(r));
    resolution = 1e-3 * scale;
  }
  const double floor_variance = resolution * resolution;

  std::vector<double> edges = params.s_edges;
  if (edges.empty()) {
    double gap = kInf;
    for (std::size_t i = 0; i < regions.size(); ++i)
      for (std::size_t j = i + 1; j < regions.size(); ++j) gap = std::min(gap, PlanarRegion::gap(regions[i], regions[j]));
    edges = default_s_edges(gap);
  }
  if (edges.size() < 2) throw std::invalid_argument("need at least two stratum edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] > 0.0 && edges[i + 1] > edges[i]))
      throw std::invalid_argument("stratum edges must be positive and ascending");

  const int n_strata = static_cast<int>(edges.size()) - 1;
  const bool tripartite = regions.size() == 3;
  const int n = params.n_points;

  auto run_loop = [&](int stratum, int loop_id, UnitTally& t) {
        // Loop length enters through u = s^(-1/2): int ds s^(-5/2) f = int du 2 u^2 f.
        const double u_lo = 1.0 / std::sqrt(edges[stratum + 1]);
        const double u_hi = 1.0 / std::sqrt(edges[stratum]);
        const std::uint64_t seed = derive_seed(params.seed, static_cast<std::uint64_t>(stratum),
                                               static_cast<std::uint64_t>(loop_id));
        std::mt19937_64 rng(seed);
        const WorldlineLoop loop = synth_for(n).make(rng);
        const auto& y = loop.points;
        const double unit_sigma = 1.0 / std::sqrt(static_cast<double>(n));  // per-step deviation of a unit loop
        double tau_min = kInf, tau_max = -kInf;
        for (const auto& p : y) {
          tau_min = std::min(tau_min, p[2]);
          tau_max = std::max(tau_max, p[2]);
        }
        std::vector<double> half_chord(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) half_chord[j] = 0.5 * dist(y[j + 1][0] - y[j][0], y[j + 1][1] - y[j][1]);
        tau_min -= kTailSigmas * unit_sigma;
        tau_max += kTailSigmas * unit_sigma;

        std::uniform_real_distribution<double> unit_interval(0.0, 1.0);
        CrossingClassifier classifier(regions, floor_variance, rng);
        std::vector<int> touch;          // segments that may reach the plane
        std::vector<Vec2> foot_center;   // unit-loop footprint centers
        std::vector<double> foot_radius; // unit-loop footprint radii
        for (int rep = 0; rep < params.placements_per_loop; ++rep) {
          ++t.samples;
          const double u = u_lo + (u_hi - u_lo) * unit_interval(rng);
          const double root_s = 1.0 / u;
          const double level = tau_min + (tau_max - tau_min) * unit_interval(rng);

          touch.clear();
          foot_center.clear();
          foot_radius.clear();
          for (int j = 0; j < n; ++j) {
            const double h0 = y[j][2] - level, h1 = y[j + 1][2] - level;
            if ((h0 > 0.0) == (h1 > 0.0) && std::min(std::abs(h0), std::abs(h1)) > kTailSigmas * unit_sigma) continue;
            touch.push_back(j);
            foot_center.push_back({0.5 * (y[j][0] + y[j + 1][0]), 0.5 * (y[j][1] + y[j + 1][1])});
            foot_radius.push_back(half_chord[j] + kTailSigmas * unit_sigma);
          }
          const int k = static_cast<int>(touch.size());
          if (k == 0) continue;

          // Planar shift: anchor point minus a uniform point of a random footprint.
          std::uniform_int_distribution<int> pick(0, k - 1);
          const int chosen = pick(rng);
          const Vec2 a = anchor_region.sample_uniform(rng);
          const double w_r = root_s * foot_radius[chosen] * std::sqrt(unit_interval(rng));
          const double w_th = 2.0 * kPi * unit_interval(rng);
          const Vec2 shift{a.x - root_s * foot_center[chosen].x - w_r * std::cos(w_th),
                           a.y - root_s * foot_center[chosen].y - w_r * std::sin(w_th)};
          // Every indicator needs both A and B reachable from some footprint.
          bool reachable = true;
          for (std::size_t r = 0; r < 2 && reachable; ++r) {
            if (r == anchor) continue;
            reachable = false;
            for (int i = 0; i < k && !reachable; ++i) {
              const Vec2 c{shift.x + root_s * foot_center[i].x, shift.y + root_s * foot_center[i].y};
              reachable = cover(regions[r], c, root_s * foot_radius[i]) != Cover::Outside;
            }
          }
          if (!reachable) continue;

          double density = 0.0;  // proposal density of shift, times k |A|
          for (int i = 0; i < k; ++i) {
            const double rho = root_s * foot_radius[i];
            const Vec2 c{shift.x + root_s * foot_center[i].x, shift.y + root_s * foot_center[i].y};
            if (cover(anchor_region, c, rho) == Cover::Outside) continue;
            density += overlap_area(anchor_region, c, rho) / (kPi * rho * rho);
          }
          if (!(density > 0.0)) throw std::logic_error("proposal density vanished at its own sample");

          classifier.reset();
          const double v = 1.0 / (u * u * n);
          for (int j : touch) {
            const PlacedPoint p0{{shift.x + root_s * y[j][0], shift.y + root_s * y[j][1]}, root_s * (y[j][2] - level)};
            const PlacedPoint p1{{shift.x + root_s * y[j + 1][0], shift.y + root_s * y[j + 1][1]},
                                 root_s * (y[j + 1][2] - level)};
            classifier.segment(p0, p1, v);
            if (classifier.settled()) break;
          }
          if (!classifier.hit(0) || !classifier.hit(1)) continue;

          const double weight = (u_hi - u_lo) * 2.0 * u * u * root_s * (tau_max - tau_min) * k * anchor_area / density;
          const bool outside_two = classifier.outside() || (tripartite && classifier.hit(2));
          const double n_ab = 1.0;
          const double n_ab_neu = outside_two ? 0.0 : 1.0;
          double n_abc = 0.0, n_abc_neu = 0.0;
          if (tripartite) {
            n_abc = classifier.hit(2) ? 1.0 : 0.0;
            n_abc_neu = (n_abc > 0.0 && !classifier.outside()) ? -1.0 : 0.0;
            if (n_abc > n_ab) ++t.dominance_violations;
            if (std::abs(n_abc_neu) > n_abc) ++t.neumann_violations;
          }
          if (n_ab_neu > n_ab) ++t.neumann_violations;
          t.sum[0] += weight * n_ab;
          t.sum[1] += weight * n_ab_neu;
          t.sum[2] += weight * n_abc;
          t.sum[3] += weight * n_abc_neu;
        }
  };

  // Pilot loops in every stratum, then the remaining budget in proportion to
  // each stratum's spread of the leading quantity.
  const int primary = tripartite ? 2 : 0;
  const int pilot = std::max(2, params.n_loops / 4);
  std::vector<std::vector<UnitTally>> tallies(static_cast<size_t>(n_strata));
  auto run_batch = [&](const std::vector<int>& extra) {
    std::vector<std::pair<int, int>> jobs;
    for (int s = 0; s < n_strata; ++s) {
      const int start = static_cast<int>(tallies[s].size());
      tallies[s].resize(static_cast<size_t>(start + extra[s]));
      for (int l = start; l < start + extra[s]; ++l) jobs.emplace_back(s, l);
    }
    parallel_for(
        jobs.size(), [&](std::size_t i) { run_loop(jobs[i].first, jobs[i].second, tallies[jobs[i].first][jobs[i].second]); },
        params.threads);
  };
  auto stratum_stats = [&](int s, int q) {
    const auto& ts = tallies[s];
    const double count = static_cast<double>(ts.size());
    double m = 0.0, m2 = 0.0;
    for (const auto& t : ts) {
      const double x = t.sum[q] / params.placements_per_loop;
      m += x;
      m2 += x * x;
    }
    m /= count;
    const double sample_var = std::max(0.0, (m2 - count * m * m) / (count - 1.0));
    return std::pair{m, sample_var};
  };

  run_batch(std::vector<int>(static_cast<size_t>(n_strata), pilot));
  const long budget = static_cast<long>(n_strata) * (params.n_loops - pilot);
  if (budget > 0) {
    std::vector<double> spread(static_cast<size_t>(n_strata));
    double spread_sum = 0.0;
    for (int s = 0; s < n_strata; ++s) spread_sum += spread[s] = std::sqrt(stratum_stats(s, primary).second);
    std::vector<int> extra(static_cast<size_t>(n_strata));
    for (int s = 0; s < n_strata; ++s)
      extra[s] = spread_sum > 0.0 ? static_cast<int>(std::llround(budget * spread[s] / spread_sum))
                                  : params.n_loops - pilot;
    run_batch(extra);
  }

  EnsembleResult res;
  std::array<double, kQuantities> total{}, var{};
  for (int s = 0; s < n_strata; ++s) {
    for (int q = 0; q < kQuantities; ++q) {
      const auto [m, sample_var] = stratum_stats(s, q);
      total[q] += m;
      var[q] += sample_var / static_cast<double>(tallies[s].size());
    }
    for (const auto& t : tallies[s]) {
      res.samples += t.samples;
      res.dominance_violations += t.dominance_violations;
      res.neumann_violations += t.neumann_violations;
    }
  }
  for (int q = 0; q < kQuantities; ++q) res.est[q] = {total[q], std::sqrt(var[q]), res.samples, params.seed};
  // Stratum 0 holds the shortest loops.
  res.short_loop_fraction = total[primary] != 0.0 ? stratum_stats(0, primary).first / total[primary] : 0.0;
  return res;
}

void check_statistics(const MCEstimate& e, const SamplingParams& params, const char* what) {
  if (params.max_rel_stderr <= 0.0) return;
  if (!(e.mean > 0.0) || e.stderr_ > params.max_rel_stderr * e.mean)
    throw InsufficientStatistics(fmt::format("{}: stderr/mean = {:.3g} exceeds cap {:.3g} (mean {:.6g})", what,
                                             e.mean > 0.0 ? e.stderr_ / e.mean : kInf, params.max_rel_stderr, e.mean));
}

}  // namespace

PlanarRegion PlanarRegion::disk(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
  return PlanarRegion(Disk{center, radius});
}

PlanarRegion PlanarRegion::half_plane(double offset, Vec2 normal) {
  const double len = std::hypot(normal.x, normal.y);
  if (!(len > 0.0)) throw std::invalid_argument("half-plane normal must be nonzero");
  return PlanarRegion(HalfPlane{offset / len, {normal.x / len, normal.y / len}});
}

PlanarRegion PlanarRegion::union_of(std::vector<PlanarRegion> members) {
  if (members.empty()) throw std::invalid_argument("union needs at least one member");
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (!disjoint(members[i], members[j])) throw std::invalid_argument("union members must be pairwise disjoint");
  return PlanarRegion(Union{std::move(members)});
}

bool PlanarRegion::contains(Vec2 p) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const double dx = p.x - s.center.x, dy = p.y - s.center.y;
          return dx * dx + dy * dy <= s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, HalfPlane>) {
          return dot(s.normal, p) >= s.offset;
        } else {
          for (const auto& m : s.members)
            if (m.contains(p)) return true;
          return false;
        }
      },
      shape_);
}

bool PlanarRegion::bounded() const {
  return std::visit(
      [](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) return true;
        else if constexpr (std::is_same_v<T, HalfPlane>) return false;
        else return std::all_of(s.members.begin(), s.members.end(), [](const auto& m) { return m.bounded(); });
      },
      shape_);
}

double PlanarRegion::area() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) return kPi * s.radius * s.radius;
        else if constexpr (std::is_same_v<T, HalfPlane>) return kInf;
        else {
          double a = 0.0;
          for (const auto& m : s.members) a += m.area();
          return a;
        }
      },
      shape_);
}

std::array<double, 4> PlanarRegion::bounds() const {
  return std::visit(
      [](const auto& s) -> std::array<double, 4> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return {s.center.x - s.radius, s.center.y - s.radius, s.center.x + s.radius, s.center.y + s.radius};
        } else if constexpr (std::is_same_v<T, HalfPlane>) {
          std::array<double, 4> b{-kInf, -kInf, kInf, kInf};
          if (s.normal.y == 0.0) (s.normal.x > 0 ? b[0] : b[2]) = s.offset / s.normal.x;
          if (s.normal.x == 0.0) (s.normal.y > 0 ? b[1] : b[3]) = s.offset / s.normal.y;
          return b;
        } else {
          std::array<double, 4> b{kInf, kInf, -kInf, -kInf};
          for (const auto& m : s.members) {
            const auto mb = m.bounds();
            b[0] = std::min(b[0], mb[0]);
            b[1] = std::min(b[1], mb[1]);
            b[2] = std::max(b[2], mb[2]);
            b[3] = std::max(b[3], mb[3]);
          }
          return b;
        }
      },
      shape_);
}

Vec2 PlanarRegion::sample_uniform(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit_interval(0.0, 1.0);
  return std::visit(
      [&](const auto& s) -> Vec2 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const double r = s.radius * std::sqrt(unit_interval(rng));
          const double th = 2.0 * kPi * unit_interval(rng);
          return {s.center.x + r * std::cos(th), s.center.y + r * std::sin(th)};
        } else if constexpr (std::is_same_v<T, HalfPlane>) {
          throw std::invalid_argument("cannot sample uniformly from a half-plane");
        } else {
          double target = unit_interval(rng) * this->area();
          for (const auto& m : s.members) {
            target -= m.area();
            if (target <= 0.0) return m.sample_uniform(rng);
          }
          return s.members.back().sample_uniform(rng);
        }
      },
      shape_);
}

double PlanarRegion::gap(const PlanarRegion& a, const PlanarRegion& b) {
  if (const auto* u = std::get_if<Union>(&a.shape_)) {
    double g = kInf;
    for (const auto& m : u->members) g = std::min(g, gap(m, b));
    return g;
  }
  if (std::holds_alternative<Union>(b.shape_)) return gap(b, a);
  const auto* da = std::get_if<Disk>(&a.shape_);
  const auto* db = std::get_if<Disk>(&b.shape_);
  const auto* ha = std::get_if<HalfPlane>(&a.shape_);
  const auto* hb = std::get_if<HalfPlane>(&b.shape_);
  if (da && db) return std::hypot(da->center.x - db->center.x, da->center.y - db->center.y) - da->radius - db->radius;
  if (da && hb) return hb->offset - dot(hb->normal, da->center) - da->radius;
  if (ha && db) return gap(b, a);
  // Two half-planes are disjoint only when antiparallel.
  if (std::abs(ha->normal.x + hb->normal.x) < 1e-14 && std::abs(ha->normal.y + hb->normal.y) < 1e-14)
    return ha->offset + hb->offset;
  return -kInf;
}

bool PlanarRegion::disjoint(const PlanarRegion& a, const PlanarRegion& b) { return gap(a, b) > 0.0; }

std::string PlanarRegion::describe() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return fmt::format("disk(center=({}, {}), radius={})", s.center.x, s.center.y, s.radius);
        } else if constexpr (std::is_same_v<T, HalfPlane>) {
          return fmt::format("half_plane(offset={}, normal=({}, {}))", s.offset, s.normal.x, s.normal.y);
        } else {
          std::string out = "union(";
          for (std::size_t i = 0; i < s.members.size(); ++i) out += (i ? ", " : "") + s.members[i].describe();
          return out + ")";
        }
      },
      shape_);
}

std::vector<WorldlineLoop> sample_unit_loops(int n_loops, int n_points, std::uint64_t seed) {
  if (n_loops < 1) throw std::invalid_argument("n_loops must be positive");
  check_loop_size(n_points);
  std::vector<WorldlineLoop> loops(static_cast<size_t>(n_loops));
  for (int i = 0; i < n_loops; ++i) loops[i] = unit_loop(n_points, derive_seed(seed, 0xffffffffULL, i));
  return loops;
}

double mean_gyration_radius_sq(int n_points) {
  check_loop_size(n_points);
  double sum = 0.0;
  for (int k = n_points - 1; k >= 1; --k) {
    const double sn = std::sin(kPi * k / n_points);
    sum += 1.0 / (4.0 * sn * sn);
  }
  return 3.0 * sum / (static_cast<double>(n_points) * n_points);
}

IntersectionResult intersection_counts(const WorldlineLoop& loop, const std::array<double, 3>& x_cm, double s,
                                       const std::vector<PlanarRegion>& regions) {
  if (!(s > 0.0)) throw std::invalid_argument("loop length s must be positive");
  const double root_s = std::sqrt(s);
  std::vector<Vec2> cross;
  crossings_at(loop, -x_cm[2] / root_s, cross);
  IntersectionResult out;
  out.hits.assign(regions.size(), false);
  out.crossings = static_cast<int>(cross.size());
  for (const Vec2& q : cross) {
    const Vec2 p{x_cm[0] + root_s * q.x, x_cm[1] + root_s * q.y};
    bool inside_any = false;
    for (std::size_t r = 0; r < regions.size(); ++r) {
      if (regions[r].contains(p)) {
        out.hits[r] = true;
        inside_any = true;
      }
    }
    if (!inside_any) out.outside = true;
  }
  return out;
}

std::vector<double> default_s_edges(double gap, int n_strata, double kappa) {
  if (!(gap > 0.0)) throw std::invalid_argument("default_s_edges: gap must be positive");
  if (n_strata < 1) throw std::invalid_argument("default_s_edges: need at least one stratum");
  const double u_max = kappa / gap;
  std::vector<double> edges;
  for (int i = n_strata; i >= 1; --i) {
    const double u = u_max * i / n_strata;
    edges.push_back(1.0 / (u * u));
  }
  edges.push_back(kInf);
  return edges;
}

SectorEstimates estimate_mutual(const PlanarRegion& a, const PlanarRegion& b, const SamplingParams& params) {
  const EnsembleResult r = run_ensemble({a, b}, params);
  SectorEstimates out{r.est[0], r.est[1], r.short_loop_fraction};
  check_statistics(out.dirichlet, params, "worldline mutual (dirichlet)");
  return out;
}

SectorEstimates estimate_tripartite(const PlanarRegion& a, const PlanarRegion& b, const PlanarRegion& c,
                                    const SamplingParams& params) {
  const EnsembleResult r = run_ensemble({a, b, c}, params);
  SectorEstimates out{r.est[2], r.est[3], r.short_loop_fraction};
  check_statistics(out.dirichlet, params, "worldline tripartite (dirichlet)");
  return out;
}

bool InequalityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.pass; });
}

InequalityReport inequality_suite(const PlanarRegion& a, const PlanarRegion& b, const PlanarRegion& c,
                                  const SamplingParams& params) {
  const EnsembleResult r = run_ensemble({a, b, c}, params);
  InequalityReport rep;
  rep.mutual = {r.est[0], r.est[1], r.short_loop_fraction};
  rep.tripartite = {r.est[2], r.est[3], r.short_loop_fraction};
  rep.samples = r.samples;
  rep.dominance_violations = r.dominance_violations;
  rep.neumann_violations = r.neumann_violations;
  check_statistics(rep.tripartite.dirichlet, params, "inequality suite (tripartite dirichlet)");
  const double i_ab = rep.mutual.dirichlet.mean + rep.mutual.neumann.mean;
  const double i_abc = rep.tripartite.dirichlet.mean + rep.tripartite.neumann.mean;
  rep.checks.push_back({"per-sample N(A,B,C) <= N(A,B)", rep.dominance_violations == 0,
                        static_cast<double>(rep.dominance_violations)});
  rep.checks.push_back({"per-sample Neumann indicators dominated", rep.neumann_violations == 0,
                        static_cast<double>(rep.neumann_violations)});
  rep.checks.push_back({"I2(A,B,C) >= 0", i_abc >= 0.0, i_abc});
  rep.checks.push_back({"I2(A,B,C) <= I2(A,B)", i_abc <= i_ab, i_ab - i_abc});
  rep.checks.push_back({"I2_neu(A,B,C) <= 0", rep.tripartite.neumann.mean <= 0.0, -rep.tripartite.neumann.mean});
  rep.checks.push_back({"|I2_neu(A,B,C)| <= I2_dir(A,B,C)",
                        std::abs(rep.tripartite.neumann.mean) <= rep.tripartite.dirichlet.mean,
                        rep.tripartite.dirichlet.mean - std::abs(rep.tripartite.neumann.mean)});
  return rep;
}

double worldline_prefactor() { return 1.0 / (2.0 * std::pow(2.0 * kPi, 1.5)); }

}  // namespace renyi
