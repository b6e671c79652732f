// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <cstring>
#include <iostream>

#include "pamlab/acceptance/acceptance.hpp"

int main(int argc, char** argv) {
  pamlab::acceptance::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0)
      opt.full = true;
    else
      opt.only.emplace_back(argv[i]);
  }
  const auto results = pamlab::acceptance::run_acceptance(opt);
  pamlab::acceptance::print_report(std::cout, results);
  return pamlab::acceptance::all_pass(results) ? 0 : 1;
}
