#pragma once

// Named identity checks shared by `qnorm verify` and the acceptance suite.
// Each check compares library output against the quadrature oracle (or a
// Monte-Carlo band) and reports the worst measured error.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qnormal {

struct VerifyOptions {
  std::optional<double> q;    // replaces each check's stock q values
  std::optional<double> tol;  // replaces each check's stock tolerance
  std::vector<std::string> only;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  double measured = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct Check {
  int id;
  std::string name;
  std::string summary;
  std::function<CheckResult(const VerifyOptions&)> run;
};

const std::vector<Check>& check_registry();

// Runs the selected checks; numerical-convergence failures become skipped
// entries carrying the reason.
std::vector<CheckResult> run_checks(const VerifyOptions& opts);
CheckResult run_check(const Check& check, const VerifyOptions& opts);

std::string format_line(const CheckResult& r);
nlohmann::json to_json(const std::vector<CheckResult>& results);

}  // namespace qnormal
