// Acceptance run: one PASS/FAIL line per criterion, then the per-check table.

#include <iostream>

#include "dephase/acceptance.hpp"

int main() {
  dephase::VerifyOptions options;
  const auto reports = dephase::run_acceptance(options, &std::cerr);
  dephase::print_report(reports, std::cout, true);
  return dephase::all_passed(reports) ? 0 : 1;
}
