#include "tvd/acceptance.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  const unsigned seed = argc > 1 ? static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10))
                                 : 20260823u;
  const auto results = tvd::run_acceptance(seed);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-42s %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.details.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed == 0 ? 0 : 1;
}
