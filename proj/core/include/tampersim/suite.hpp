#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tampersim/harness.hpp"

namespace tampersim {

struct SuiteOptions {
  std::uint64_t master_seed = 0;
  long long budgeted_attack_trials = 10000;  // criterion 4
  long long coherence_trials = 100000;       // criterion 9
  std::size_t support_cap = kDefaultSupportCap;
  int threads = 1;
};

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  long long checks_run = 0;
  long long checks_failed = 0;
  std::string detail;  // first few failures, empty when clean
  double wall_ms = 0.0;
};

/// Runs the full acceptance battery and returns one result per criterion.
std::vector<CriterionResult> run_acceptance_suite(const SuiteOptions& options);

}  // namespace tampersim
