#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "willis/config.hpp"

namespace willis::cli {

// Collects pass/fail lines; failures are echoed to stderr as
// "FAIL <check>: <message>".
class Outcome {
 public:
  void pass(const std::string& check, const std::string& detail);
  void fail(const std::string& check, const std::string& detail);
  void info(const std::string& check, const std::string& detail);
  bool ok() const { return failures_.empty(); }
  int exit_code() const { return ok() ? 0 : 1; }
  const std::vector<std::string>& lines() const { return lines_; }
  // summary.txt in the output directory
  void write_summary(const std::string& dir, const std::string& name) const;

 private:
  std::vector<std::string> lines_;
  std::vector<std::string> failures_;
};

int run_validate(const RunConfig& cfg);
int run_assemble(const RunConfig& cfg);
int run_solve(const RunConfig& cfg);
int run_verify(const RunConfig& cfg, const std::vector<std::string>& suites);
int run_convergence(const RunConfig& cfg);

}  // namespace willis::cli
