#pragma once

#include <string>
#include <vector>

#include "willis/grid.hpp"
#include "willis/linalg.hpp"
#include "willis/solver.hpp"

namespace willis {

// "rows cols" header, then one matrix row per line.
void write_matrix(const std::string& path, const MatX& m);
MatX read_matrix(const std::string& path);

// Header line "time n0 n1 n2 components", then per node (x index fastest)
// all components: one node per line as text, or raw little-endian float64.
void write_snapshot(const std::string& path, const Grid& g, const Field& v, double t, bool binary);
struct Snapshot {
  double time = 0.0;
  std::array<int, 3> dims{};
  int components = 0;
  Field data;
};
Snapshot read_snapshot(const std::string& path, bool binary);

// Columns t, E, radius.
void write_trace(const std::string& path, const Trajectory& tr);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

// Creates the directory (and parents) if missing.
void ensure_directory(const std::string& dir);

}  // namespace willis
