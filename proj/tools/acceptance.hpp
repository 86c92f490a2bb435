#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace renyi::acceptance {

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  int threads = 0;
  std::uint64_t seed = 20240611;
  /// Loop placements per worldline estimate in the cross-validation runs.
  std::int64_t placements = 1000000;
  /// Restricts the run to these criterion ids; empty runs all.
  std::vector<int> only;
};

/// Runs the suite in order, calling report after each criterion.
std::vector<Criterion> run(const Options& opts, const std::function<void(const Criterion&)>& report);

std::string format_line(const Criterion& c);

}  // namespace renyi::acceptance
