// Prints one line per acceptance criterion; exits nonzero if any fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "rmflab/acceptance.hpp"

int main(int argc, char** argv) {
  rmflab::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workers" && i + 1 < argc) {
      options.workers = static_cast<unsigned>(std::stoul(argv[++i]));
    } else if (arg == "--seed" && i + 1 < argc) {
      options.seed = std::stoull(argv[++i]);
    } else {
      options.only.push_back(std::stoi(arg));
    }
  }
  int failed = 0;
  rmflab::run_acceptance(options, [&](const rmflab::CriterionResult& r) {
    std::cout << rmflab::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  });
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
