#pragma once

#include "qfield/qmath.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qfield {

struct SuiteResult {
  std::string name;
  std::string module;
  bool passed = false;
  double worst = 0.0;     // largest residual of the headline clause
  double tolerance = 0.0; // its threshold
  std::string detail;
};

struct VerifyOptions {
  int jobs = 1;
  double rel_tol = 1e-10;
  // Applied to every Gram matrix of the eight-slot evaluation in the
  // BCH-consistency suite. Test fixtures use it to corrupt W on purpose.
  std::function<void(CMatrix&)> gram_mutator;
  // Suite names to run; empty runs all.
  std::vector<std::string> only;
};

std::vector<std::string> verify_suite_names();
std::vector<SuiteResult> run_verify_suites(const VerifyOptions& opt = {});

} // namespace qfield
