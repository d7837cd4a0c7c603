// Runs every acceptance criterion at its stated tolerance and prints one
// line per criterion. Exit status is zero only when all of them pass.
// Optional arguments restrict the run to the listed criterion ids.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "criteria.hpp"
#include "fracgs/errors.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= fracgs::tools::kCriterionCount; ++i) ids.push_back(i);
  }

  std::size_t failed = 0;
  auto print = [&](const fracgs::tools::CriterionResult& r) {
    const bool ok = r.ledger.all_passed();
    if (!ok) ++failed;
    std::printf("[%s] criterion %2d: %s (%zu checks, %.1f s)\n", ok ? "PASS" : "FAIL", r.id,
                r.title.c_str(), r.ledger.checks().size(), r.seconds);
    for (const auto& c : r.ledger.checks()) {
      if (!c.passed) {
        std::printf("       %s: value %.6g, tolerance %.6g %s\n", c.name.c_str(), c.value, c.tolerance,
                    c.detail.c_str());
      }
    }
    std::fflush(stdout);
  };

  try {
    fracgs::tools::run_criteria(ids, 1, print);
  } catch (const fracgs::Error& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%zu of %zu criteria passed\n", ids.size() - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
