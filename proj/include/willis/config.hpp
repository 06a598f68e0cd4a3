#pragma once
// Run configuration: sections of `key = value` lines, `#` comments.
//
// [material]  model = isotropic | voigt, rho, lambda, mu, c11 .. c66 (upper
//             triangle), coupling = zero | symmetric | full, s111 .. s333
//             (1-based; `symmetric` takes the 10 sorted triples, `full` all 27)
// [grid]      lower, upper (scalar or three values), cells (one or three),
//             mode = periodic | bounded
// [scheme]    order = 2 | 4, cfl, dissipation
// [initial]   u1 u2 u3 mu1 mu2 mu3
// [lift]      u1 u2 u3
// [run]       T, snapshot_every, output, format = text | binary, threads,
//             kernel = parallel | reference, warn_only_a0
// [verify]    suites (comma separated), fine_cells, T
// [manufactured] u1 u2 u3 (spatial profile), omega, cells, T
//
// [material] and [grid] are required; everything else has defaults.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "willis/grid.hpp"
#include "willis/material.hpp"
#include "willis/solver.hpp"
#include "willis/verify.hpp"

namespace willis {

struct ConfigIssue {
  int line = 0;  // 0 when the issue is not tied to a line
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct GridConfig {
  std::array<double, 3> lower{0.0, 0.0, 0.0};
  std::array<double, 3> upper{1.0, 1.0, 1.0};
  std::array<int, 3> cells{16, 16, 16};
  BoundaryMode mode = BoundaryMode::periodic;
  Grid make() const;
};

enum class SnapshotFormat { text, binary };

struct RunConfig {
  std::optional<MaterialSpec> material;
  std::string coupling = "zero";
  GridConfig grid;
  SchemeConfig scheme;
  InitialData initial;
  std::array<Expr, 3> lift;
  bool lift_given = false;

  double T = 0.0;
  int snapshot_every = 0;
  std::string output_dir = "out";
  SnapshotFormat format = SnapshotFormat::text;
  int threads = 0;  // 0: runtime default
  KernelKind kernel = KernelKind::parallel;
  bool warn_only_A0 = false;

  std::vector<std::string> suites{"all"};
  int fine_cells = 0;  // 0: twice the grid cells
  double verify_T = 0.0;  // 0: run.T

  bool has_manufactured = false;
  ManufacturedSolution manufactured;
  std::vector<int> manufactured_cells{16, 24, 32};
  double manufactured_T = 0.1;

  BoundaryLift make_lift() const { return lift_given ? BoundaryLift(lift) : BoundaryLift(); }
};

// Parses and validates; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// WILLIS_OUTPUT_DIR and WILLIS_THREADS
void apply_environment(RunConfig& cfg);

}  // namespace willis
