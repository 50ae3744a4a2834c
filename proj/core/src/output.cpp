#include "hemo/output.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hemo {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvWriter::comment(std::string_view line) {
  comments_ += "# ";
  comments_ += line;
  comments_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                          std::to_string(width_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

std::string CsvWriter::str() const { return comments_ + text_; }

void CsvWriter::save(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

std::string format_vtk(const Mesh& mesh, const FlowState& state) {
  const std::size_t n = mesh.num_nodes();
  if (state.v.size() != static_cast<Eigen::Index>(3 * n) || state.p.size() != static_cast<Eigen::Index>(n)) {
    throw Error("export_vtk: state does not match the mesh");
  }
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\nhemo flow field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const Vec3& x : mesh.nodes()) {
    os << format_double(x(0)) << ' ' << format_double(x(1)) << ' ' << format_double(x(2)) << '\n';
  }
  os << "CELLS " << mesh.num_tets() << ' ' << 5 * mesh.num_tets() << '\n';
  for (const auto& t : mesh.tets()) os << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  os << "CELL_TYPES " << mesh.num_tets() << '\n';
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) os << "10\n";
  os << "POINT_DATA " << n << "\nVECTORS velocity double\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    os << format_double(state.v(k)) << ' ' << format_double(state.v(k + 1)) << ' ' << format_double(state.v(k + 2))
       << '\n';
  }
  os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < n; ++i) os << format_double(state.p(static_cast<Eigen::Index>(i))) << '\n';
  return os.str();
}

void export_vtk(const Mesh& mesh, const FlowState& state, const std::filesystem::path& path) {
  write_file_atomic(path, format_vtk(mesh, state));
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void mix(std::uint64_t& h, const SparseMatrix& m) {
  const Eigen::Index dims[2] = {m.rows(), m.cols()};
  mix(h, dims, sizeof(dims));
  for (int i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      const int idx[2] = {static_cast<int>(it.row()), static_cast<int>(it.col())};
      const double v = it.value();
      mix(h, idx, sizeof(idx));
      mix(h, &v, sizeof(v));
    }
  }
}

}  // namespace

std::uint64_t fingerprint(const Vector& x) {
  std::uint64_t h = kFnvOffset;
  const Eigen::Index n = x.size();
  mix(h, &n, sizeof(n));
  mix(h, x.data(), sizeof(double) * static_cast<std::size_t>(n));
  return h;
}

std::uint64_t fingerprint(const BlockTangent& t) {
  std::uint64_t h = kFnvOffset;
  mix(h, t.f);
  mix(h, t.b);
  mix(h, t.c);
  mix(h, t.d);
  for (const RankOne& r : t.rank_ones) {
    mix(h, &r.weight, sizeof(double));
    const std::uint64_t ha = fingerprint(r.a);
    mix(h, &ha, sizeof(ha));
  }
  return h;
}

std::string hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

}  // namespace hemo
