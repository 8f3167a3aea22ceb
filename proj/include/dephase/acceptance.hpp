#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace dephase {

struct Check {
  enum class Relation {
    Within,  // |measured - target| <= tolerance
    Below,   // measured < target
    AtMost,  // measured <= target + tolerance
  };

  std::string id;
  double target = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Within;
  bool pass = false;
};

struct CriterionReport {
  int number = 0;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;

  bool pass() const;
  const Check* first_failure() const;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  unsigned workers = 0;
  /// Multiplies every tolerance; 0 makes any inexact match fail.
  double tolerance_scale = 1.0;
  /// Only the sampling-free criteria (closed forms and property suites).
  bool properties_only = false;
  /// Restricts the run to these criterion numbers when nonempty.
  std::set<int> only;
  std::uint64_t haar_samples = 1'000'000;
  std::uint64_t energy_accepted = 10'000;
  std::uint64_t dicke_samples = 100'000;
  std::uint64_t property_samples = 10'000;
};

/// Runs the acceptance criteria; progress lines go to `progress` if given.
std::vector<CriterionReport> run_acceptance(const VerifyOptions& options, std::ostream* progress = nullptr);

/// One PASS/FAIL line per criterion, then each check (target, measured, tolerance).
void print_report(const std::vector<CriterionReport>& reports, std::ostream& out, bool details = true);

bool all_passed(const std::vector<CriterionReport>& reports);

}  // namespace dephase
