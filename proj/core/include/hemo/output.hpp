#ifndef HEMO_OUTPUT_HPP
#define HEMO_OUTPUT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hemo/assembly.hpp"
#include "hemo/mesh.hpp"

namespace hemo {

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest text that reads back to the same double.
std::string format_double(double x);

/// Comma-separated table with optional leading `# key=value` comment lines.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void comment(std::string_view line);
  void row(const std::vector<std::string>& cells);
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string text_;
  std::string comments_;
};

/// Legacy-VTK ASCII unstructured grid with point data `velocity` and `pressure`.
std::string format_vtk(const Mesh& mesh, const FlowState& state);
void export_vtk(const Mesh& mesh, const FlowState& state, const std::filesystem::path& path);

/// FNV-1a fingerprints, rendered as 16 hex digits.
std::uint64_t fingerprint(const Vector& x);
std::uint64_t fingerprint(const BlockTangent& t);
std::string hex(std::uint64_t h);

}  // namespace hemo

#endif  // HEMO_OUTPUT_HPP
