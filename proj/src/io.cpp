#include "willis/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace willis {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return in;
}

void put_le(std::ostream& out, double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  out.write(reinterpret_cast<const char*>(&u), 8);
}

double get_le(std::istream& in) {
  std::uint64_t u = 0;
  in.read(reinterpret_cast<char*>(&u), 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  double x;
  std::memcpy(&x, &u, 8);
  return x;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void ensure_directory(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

void write_matrix(const std::string& path, const MatX& m) {
  std::ofstream out = open_out(path);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << '\n';
  }
}

MatX read_matrix(const std::string& path) {
  std::ifstream in = open_in(path);
  Eigen::Index r = 0, c = 0;
  if (!(in >> r >> c) || r < 0 || c < 0) throw std::runtime_error("bad matrix header in '" + path + "'");
  MatX m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (!(in >> m(i, j))) throw std::runtime_error("truncated matrix file '" + path + "'");
  return m;
}

void write_snapshot(const std::string& path, const Grid& g, const Field& v, double t, bool binary) {
  std::ofstream out = open_out(path, binary);
  out << format_double(t) << ' ' << g.nodes(0) << ' ' << g.nodes(1) << ' ' << g.nodes(2) << ' ' << v.components()
      << '\n';
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (binary) {
      for (int c = 0; c < v.components(); ++c) put_le(out, v.at(c, p));
    } else {
      for (int c = 0; c < v.components(); ++c) out << (c ? " " : "") << format_double(v.at(c, p));
      out << '\n';
    }
  }
}

Snapshot read_snapshot(const std::string& path, bool binary) {
  std::ifstream in = open_in(path, true);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  Snapshot s;
  if (!(hs >> s.time >> s.dims[0] >> s.dims[1] >> s.dims[2] >> s.components))
    throw std::runtime_error("bad snapshot header in '" + path + "'");
  const std::size_t n = static_cast<std::size_t>(s.dims[0]) * s.dims[1] * s.dims[2];
  s.data = Field(n, s.components);
  for (std::size_t p = 0; p < n; ++p)
    for (int c = 0; c < s.components; ++c) {
      if (binary) s.data.at(c, p) = get_le(in);
      else in >> s.data.at(c, p);
      if (!in) throw std::runtime_error("truncated snapshot '" + path + "'");
    }
  return s;
}

void write_trace(const std::string& path, const Trajectory& tr) {
  std::ofstream out = open_out(path);
  out << "t,E,radius\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    out << format_double(tr.times[i]) << ',' << format_double(tr.energy[i]) << ',' << format_double(tr.radius[i])
        << '\n';
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

}  // namespace willis
