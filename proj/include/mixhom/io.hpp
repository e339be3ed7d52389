#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mixhom/field.hpp"
#include "mixhom/homogenize.hpp"
#include "mixhom/limit_solver.hpp"
#include "mixhom/particle.hpp"

namespace mixhom {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

/// Text table with a header line; every cell is already formatted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string str() const;
  /// Index of a header column; throws Error(io) when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const;
  [[nodiscard]] double number(std::size_t row, std::size_t col) const;
};

/// t, cell_index, x, (y,) u
CsvTable trajectory_table(const std::vector<Field>& traj);
/// t, cell_index, x, (y,) a, b
CsvTable pair_table(const std::vector<DensityPair>& traj);
/// t, particle_id, x, (y,) label
CsvTable ensemble_table(const Ensemble& ensemble);
/// particle_id, event_time, kind, from_x, (from_y,) to_x, (to_y)
CsvTable events_table(const Ensemble& ensemble);
/// family, n, test_id, gap_u, gap_a, gap_b, weak_residual, limit
CsvTable report_table(const ConvergenceReport& report);

/// Throws Error(io) when the file is unreadable or ragged.
CsvTable read_csv(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

struct ManifestEntry {
  std::string filename;
  std::size_t rows = 0;
  std::string digest;
};

/// Writes artifacts into one directory and records each in manifest.json.
class ArtifactWriter {
 public:
  /// Creates the directory; throws Error(io) when that fails.
  explicit ArtifactWriter(std::filesystem::path directory);

  void write_csv(const std::string& filename, const CsvTable& table);
  void write_json(const std::string& filename, const nlohmann::ordered_json& value);
  /// Writes manifest.json (entries sorted by filename) and returns them.
  std::vector<ManifestEntry> finish();

  [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  void write_bytes(const std::string& filename, const std::string& bytes, std::size_t rows);

  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

/// Reads manifest.json back.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& directory);

}  // namespace mixhom
