#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mixhom/field.hpp"
#include "mixhom/geometry.hpp"
#include "mixhom/kernel.hpp"

namespace mixhom {

/// label 1: white (in A / nonlocal), label 2: black (in B / local).
struct ParticleState {
  Point position;
  int label = 1;
  /// Absolute time of the next exponential clock ring.
  double clock = 0.0;
};

struct SimConfig {
  std::size_t particle_count = 10000;
  std::uint64_t seed = 20261018;
  /// Brownian substep delta (pre-limit process only).
  double brownian_substep = 1e-4;
  double horizon = 1.0;
  std::vector<double> snapshot_times{0.0, 1.0};
  bool record_events = false;

  /// Throws Error(config) on an empty ensemble, a non-positive substep or an
  /// unsorted snapshot list outside [0, horizon].
  void validate() const;
};

enum class EventKind { jump, suppressed, label_switch };
std::string_view to_string(EventKind kind) noexcept;

/// One clock ring. `jump` moves without changing the label, `label_switch`
/// moves and changes it, `suppressed` leaves the state untouched and keeps the
/// rejected proposal in `to`.
struct Event {
  std::size_t particle = 0;
  double time = 0.0;
  EventKind kind = EventKind::jump;
  Point from;
  Point to;
  int label_from = 1;
  int label_to = 1;
};

struct Ensemble {
  int dim = 1;
  std::vector<double> times;
  /// State at t = 0.
  std::vector<ParticleState> initial;
  /// snapshots[s][p]
  std::vector<std::vector<ParticleState>> snapshots;
  /// Sorted by particle, then time. Empty unless record_events was set.
  std::vector<Event> events;
  bool has_events = false;
  /// Free-form identifiers (partition, kernel, process).
  std::string description;
};

/// Folds pos into [lo, hi] by repeated reflection at the ends.
double reflect(double pos, double lo, double hi);

/// Per-particle stream derived from the master seed; independent of how
/// particles are scheduled over threads.
Rng particle_stream(std::uint64_t seed, std::size_t particle);

/// Pre-limit process: rate-1 clocks with jump proposals from the kernel rows,
/// B-to-B proposals suppressed, standard Brownian motion reflected inside the
/// current B component between clocks, rest in A. Throws Error(config) when
/// the substep exceeds (min component width)^2 / 16 or u0 is not a
/// probability density.
Ensemble simulate_coupled(const Partition& partition, const DiscreteKernel& kernel, const Field& u0,
                          const SimConfig& config);

/// Limit labeled jump process. Label 1 jumps to y ~ J(x, .) and becomes
/// label 2 with probability theta(y); label 2 proposes y and moves there as
/// label 1 with probability 1 - theta(y), else stays.
Ensemble simulate_limit(const std::vector<double>& theta, const DiscreteKernel& kernel, const Field& u0,
                        const SimConfig& config);

struct EmpiricalDensity {
  Field total;
  Field label1;
  Field label2;
};

/// Histogram of one snapshot normalized by N h^dim.
EmpiricalDensity empirical_density(const Ensemble& ensemble, std::size_t snapshot, const Grid& grid);

struct BinScore {
  std::size_t bin = 0;
  /// 0: all particles, 1 or 2: one label.
  int label = 0;
  double empirical = 0.0;
  double expected = 0.0;
  double sigma = 0.0;
  double z = 0.0;
};

struct HistogramComparison {
  std::size_t samples = 0;
  std::vector<BinScore> bins;
  double max_abs_z = 0.0;
  /// Fraction of label-2 particles against the expected B mass.
  BinScore label2_mass;
};

/// Per-bin binomial z-scores of one snapshot against expected densities
/// (cell values on any grid that refines `bins`). `label1`/`label2` may be
/// null; when given, each label is scored separately as well. sigma uses the
/// expected probability; empty expected bins score 0 when empty and
/// infinity otherwise.
HistogramComparison compare_histogram(const Ensemble& ensemble, std::size_t snapshot, const Grid& bins,
                                      const Field& expected_total, const Field* label1, const Field* label2,
                                      double expected_label2_mass);

/// f(x, label)
using PathFunction = std::function<double(Point, int)>;

struct MartingaleResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Sample mean of f(X_t, I_t) - f(X_0, I_0) - int_0^t Lf(X_s, I_s) ds for the
/// limit process, with L the limit generator (cell averages of f by
/// Gauss-Legendre quadrature). Throws Error(diagnostic) without event logs.
MartingaleResult martingale_residual(const Ensemble& ensemble, const std::vector<double>& theta,
                                     const DiscreteKernel& kernel, const PathFunction& f, double t);

}  // namespace mixhom
