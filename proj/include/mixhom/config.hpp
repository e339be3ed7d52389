#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixhom/field.hpp"
#include "mixhom/geometry.hpp"
#include "mixhom/homogenize.hpp"
#include "mixhom/kernel.hpp"
#include "mixhom/particle.hpp"
#include "mixhom/rk4.hpp"

namespace mixhom {

struct PartitionSpec {
  PartitionFamily family = PartitionFamily::alternating1d;
  int n = 2;
  double k = 0.5;
  double r = 0.25;
};

struct TimeSpec {
  double horizon = 1.0;
  /// Unset: cfl_factor h^2 for the coupled solver, 1e-3 for the limit.
  std::optional<double> dt;
  double cfl_factor = 0.2;
  /// Empty: snapshot_count uniform times in [0, T].
  std::vector<double> snapshots;
  std::size_t snapshot_count = 11;
};

struct ParticleSpec {
  std::size_t count = 10000;
  std::uint64_t seed = 20261018;
  /// Unset: min(1e-3, (min component width)^2 / 16).
  std::optional<double> delta;
  bool events = false;
};

struct SweepSection {
  std::vector<int> n_list{2, 4, 8, 16};
  /// m = base * n; 0 picks 64 in 1-d and 8 in 2-d.
  int base = 0;
  std::vector<std::string> tests;
  double limit_dt = 1e-3;
};

struct LimitSection {
  /// Constant theta overriding the partition's value.
  std::optional<double> theta;
  bool strip = false;
  double strip_coefficient = 0.5;
};

struct CompareSection {
  /// Solver CSV: a trajectory (column u) or a pair (columns a, b).
  std::string density;
  /// Ensemble CSV from simulate-n or simulate-limit.
  std::string ensemble;
  int bins = 16;
  /// Unset: every snapshot present in both files.
  std::optional<double> t;
};

struct ExperimentConfig {
  int dim = 1;
  int m = 64;
  PartitionSpec partition;
  KernelSpec kernel;
  TimeSpec time;
  InitialSpec initial;
  ParticleSpec particles;
  SweepSection sweep;
  LimitSection limit;
  CompareSection compare;
  std::string output_directory = "out";

  /// Throws Error(config) on any out-of-range value.
  void validate() const;

  [[nodiscard]] Grid grid() const;
  [[nodiscard]] Partition build_partition(const Grid& grid) const;
  [[nodiscard]] std::vector<double> snapshot_times() const;
  [[nodiscard]] IntegrationOptions coupled_options(const Grid& grid) const;
  [[nodiscard]] IntegrationOptions limit_options(const Grid& grid) const;
  [[nodiscard]] SimConfig sim_config(const Partition* partition) const;
  [[nodiscard]] SweepSpec sweep_spec() const;
};

/// Parses and validates. Unknown sections or fields and wrong value types
/// raise Error(config).
ExperimentConfig parse_config(const nlohmann::json& j);
/// Throws Error(io) when unreadable, Error(config) when malformed.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field, defaults included, in parse_config's format.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace mixhom
