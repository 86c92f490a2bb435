#include <cstdlib>
#include <iostream>

#include "acceptance.hpp"

int main() {
  renyi::acceptance::Options opts;
  if (const char* only = std::getenv("RENYI2_ACCEPTANCE_ONLY")) {
    for (const char* p = only; *p;) {
      char* end = nullptr;
      opts.only.push_back(static_cast<int>(std::strtol(p, &end, 10)));
      p = *end ? end + 1 : end;
    }
  }
  int failed = 0;
  const auto results = renyi::acceptance::run(opts, [&](const renyi::acceptance::Criterion& c) {
    std::cout << renyi::acceptance::format_line(c) << std::endl;
    failed += !c.pass;
  });
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
