#include "mixhom/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mixhom/error.hpp"

namespace mixhom {

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::io, "CSV has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::io, "CSV cell '" + s + "' is not a number");
  }
  return v;
}

namespace {

void push_coords(std::vector<std::string>& row, Point p, int dim) {
  row.push_back(format_number(p.x));
  if (dim == 2) row.push_back(format_number(p.y));
}

std::vector<std::string> spatial_header(std::string first, std::string second, int dim) {
  std::vector<std::string> h{std::move(first), std::move(second), "x"};
  if (dim == 2) h.emplace_back("y");
  return h;
}

}  // namespace

CsvTable trajectory_table(const std::vector<Field>& traj) {
  CsvTable t;
  if (traj.empty()) return t;
  const Grid& g = traj.front().grid;
  t.header = spatial_header("t", "cell_index", g.dim());
  t.header.emplace_back("u");
  for (const auto& f : traj) {
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      std::vector<std::string> row{format_number(f.t), std::to_string(i)};
      push_coords(row, g.center(i), g.dim());
      row.push_back(format_number(f.values[i]));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

CsvTable pair_table(const std::vector<DensityPair>& traj) {
  CsvTable t;
  if (traj.empty()) return t;
  const Grid& g = traj.front().a.grid;
  t.header = spatial_header("t", "cell_index", g.dim());
  t.header.emplace_back("a");
  t.header.emplace_back("b");
  for (const auto& s : traj) {
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      std::vector<std::string> row{format_number(s.t), std::to_string(i)};
      push_coords(row, g.center(i), g.dim());
      row.push_back(format_number(s.a.values[i]));
      row.push_back(format_number(s.b.values[i]));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

CsvTable ensemble_table(const Ensemble& ensemble) {
  CsvTable t;
  t.header = spatial_header("t", "particle_id", ensemble.dim);
  t.header.emplace_back("label");
  for (std::size_t s = 0; s < ensemble.snapshots.size(); ++s) {
    const std::string time = format_number(ensemble.times[s]);
    for (std::size_t p = 0; p < ensemble.snapshots[s].size(); ++p) {
      const auto& st = ensemble.snapshots[s][p];
      std::vector<std::string> row{time, std::to_string(p)};
      push_coords(row, st.position, ensemble.dim);
      row.push_back(std::to_string(st.label));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

CsvTable events_table(const Ensemble& ensemble) {
  if (!ensemble.has_events) throw Error(ErrorKind::diagnostic, "ensemble was simulated without event logs");
  CsvTable t;
  t.header = {"particle_id", "event_time", "kind", "from_x"};
  if (ensemble.dim == 2) t.header.emplace_back("from_y");
  t.header.emplace_back("to_x");
  if (ensemble.dim == 2) t.header.emplace_back("to_y");
  for (const auto& ev : ensemble.events) {
    std::vector<std::string> row{std::to_string(ev.particle), format_number(ev.time), std::string(to_string(ev.kind))};
    push_coords(row, ev.from, ensemble.dim);
    push_coords(row, ev.to, ensemble.dim);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable report_table(const ConvergenceReport& report) {
  CsvTable t;
  t.header = {"family", "n", "test_id", "gap_u", "gap_a", "gap_b", "weak_residual", "limit"};
  for (const auto& r : report.rows) {
    t.rows.push_back({std::string(to_string(r.family)), std::to_string(r.n), r.test_id, format_number(r.gaps.gap_u),
                      format_number(r.gaps.gap_a), format_number(r.gaps.gap_b), format_number(r.weak_residual),
                      std::string(to_string(r.limit))});
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, "'" + path.string() + "' is empty");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io, "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void ArtifactWriter::write_bytes(const std::string& filename, const std::string& bytes, std::size_t rows) {
  const auto path = dir_ / filename;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "short write to '" + path.string() + "'");
  entries_.push_back({filename, rows, sha256_hex(bytes)});
}

void ArtifactWriter::write_csv(const std::string& filename, const CsvTable& table) {
  write_bytes(filename, table.str(), table.rows.size());
}

void ArtifactWriter::write_json(const std::string& filename, const nlohmann::ordered_json& value) {
  write_bytes(filename, value.dump(2) + "\n", 1);
}

std::vector<ManifestEntry> ArtifactWriter::finish() {
  std::sort(entries_.begin(), entries_.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.filename < b.filename; });
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& e : entries_) list.push_back({{"filename", e.filename}, {"rows", e.rows}, {"digest", e.digest}});
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  out << nlohmann::ordered_json{{"artifacts", list}}.dump(2) << "\n";
  return entries_;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& directory) {
  const auto path = directory / "manifest.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
  std::vector<ManifestEntry> out;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& e : j.at("artifacts")) {
      out.push_back({e.at("filename").get<std::string>(), e.at("rows").get<std::size_t>(),
                     e.at("digest").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::io, "malformed manifest '" + path.string() + "': " + ex.what());
  }
  return out;
}

}  // namespace mixhom
