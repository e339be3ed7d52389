#include "mixhom/particle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mixhom/error.hpp"

namespace mixhom {

void SimConfig::validate() const {
  if (particle_count == 0) throw Error(ErrorKind::config, "particle count must be positive");
  if (!(brownian_substep > 0.0) || !std::isfinite(brownian_substep)) {
    throw Error(ErrorKind::config, "Brownian substep must be positive");
  }
  if (!(horizon > 0.0)) throw Error(ErrorKind::config, "horizon must be positive");
  if (snapshot_times.empty()) throw Error(ErrorKind::config, "no snapshot times requested");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()) || snapshot_times.front() < 0.0 ||
      snapshot_times.back() > horizon) {
    throw Error(ErrorKind::config, "snapshot times must be sorted inside [0, horizon]");
  }
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::jump: return "jump";
    case EventKind::suppressed: return "suppressed";
    case EventKind::label_switch: return "label-switch";
  }
  return "unknown";
}

double reflect(double pos, double lo, double hi) {
  const double width = hi - lo;
  double r = std::fmod(pos - lo, 2.0 * width);
  if (r < 0.0) r += 2.0 * width;
  if (r > width) r = 2.0 * width - r;
  return lo + r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng particle_stream(std::uint64_t seed, std::size_t particle) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(static_cast<std::uint64_t>(particle)));
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32)};
  return Rng(seq);
}

namespace {

// Cumulative cell masses of a probability density.
std::vector<double> initial_cdf(const Field& u0) {
  if (min_value(u0) < 0.0) throw Error(ErrorKind::config, "initial density has negative values");
  const double mass = total_mass(u0);
  if (std::abs(mass - 1.0) > 1e-8) {
    throw Error(ErrorKind::config, "initial density must have unit mass, got " + std::to_string(mass));
  }
  std::vector<double> cdf(u0.values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += u0.values[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw_initial_cell(const std::vector<double>& cdf, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
}

std::size_t clamped_cell(const Grid& g, Point p, const CellRect& r) {
  auto axis = [&](double c, int lo, int hi) { return std::clamp(static_cast<int>(std::floor(c * g.m())), lo, hi - 1); };
  const int ix = axis(p.x, r.ix0, r.ix1);
  const int iy = g.dim() == 2 ? axis(p.y, r.iy0, r.iy1) : 0;
  return g.index(ix, iy);
}

void record(std::vector<Event>& log, bool enabled, std::size_t id, double t, EventKind kind, Point from, Point to,
            int lf, int lt) {
  if (enabled) log.push_back({id, t, kind, from, to, lf, lt});
}

// Runs `walk(id, rng, ensemble, log)` for every particle. Each particle owns
// its stream, snapshot slots and event log, so the result does not depend
// on the schedule; logs are concatenated in particle order.
template <class Walk>
Ensemble run_ensemble(int dim, const SimConfig& config, std::string description, Walk&& walk) {
  Ensemble e;
  e.dim = dim;
  e.times = config.snapshot_times;
  e.initial.resize(config.particle_count);
  e.snapshots.assign(config.snapshot_times.size(), std::vector<ParticleState>(config.particle_count));
  e.has_events = config.record_events;
  e.description = std::move(description);
  std::vector<std::vector<Event>> logs(config.record_events ? config.particle_count : 0);
  const auto count = static_cast<std::ptrdiff_t>(config.particle_count);
  std::vector<Event> scratch;
#pragma omp parallel for schedule(dynamic, 256) firstprivate(scratch)
  for (std::ptrdiff_t ip = 0; ip < count; ++ip) {
    const auto id = static_cast<std::size_t>(ip);
    Rng rng = particle_stream(config.seed, id);
    std::vector<Event>& log = config.record_events ? logs[id] : scratch;
    walk(id, rng, e, log);
    if (!config.record_events) scratch.clear();
  }
  for (auto& log : logs) e.events.insert(e.events.end(), log.begin(), log.end());
  return e;
}

}  // namespace

Ensemble simulate_coupled(const Partition& partition, const DiscreteKernel& kernel, const Field& u0,
                          const SimConfig& config) {
  config.validate();
  const Grid& g = partition.grid();
  if (!(kernel.grid() == g) || !(u0.grid == g)) {
    throw Error(ErrorKind::mismatch, "partition, kernel and initial density must share one grid");
  }
  const double width = partition.min_component_width();
  const double limit = width * width / 16.0;
  if (config.brownian_substep > limit) {
    throw Error(ErrorKind::config, "Brownian substep " + std::to_string(config.brownian_substep) +
                                       " exceeds (min component width)^2/16 = " + std::to_string(limit));
  }
  const auto cdf = initial_cdf(u0);
  const JumpSampler sampler(kernel);
  const double h = g.h();
  const bool logging = config.record_events;

  auto walk = [&](std::size_t id, Rng& rng, Ensemble& e, std::vector<Event>& log) {
    std::exponential_distribution<double> clock(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::size_t cell = draw_initial_cell(cdf, rng);
    ParticleState st{uniform_in_cell(g, cell, rng), partition.in_b(cell) ? 2 : 1, 0.0};
    st.clock = clock(rng);
    e.initial[id] = st;
    double t = 0.0;

    // Reflected Brownian motion inside the current component up to t1.
    auto diffuse = [&](double t1) {
      if (st.label == 2) {
        const Component& c = partition.components()[static_cast<std::size_t>(partition.component_of(cell))];
        const double x0 = c.bounds.ix0 * h, x1 = c.bounds.ix1 * h;
        const double y0 = c.bounds.iy0 * h, y1 = c.bounds.iy1 * h;
        while (t < t1) {
          const double dt = std::min(config.brownian_substep, t1 - t);
          const double sd = std::sqrt(dt);
          Point next = st.position;
          next.x = reflect(next.x + sd * normal(rng), x0, x1);
          if (g.dim() == 2) next.y = reflect(next.y + sd * normal(rng), y0, y1);
          const std::size_t landed = clamped_cell(g, next, c.bounds);
          // Rasterized discs: moves that leave the component are rejected.
          if (c.rectangular || partition.component_of(landed) == partition.component_of(cell)) {
            st.position = next;
            cell = landed;
          }
          t += dt;
        }
      }
      t = t1;
    };

    for (std::size_t s = 0; s < e.times.size(); ++s) {
      const double target = e.times[s];
      while (st.clock < target) {
        diffuse(st.clock);
        const JumpTarget y = sampler(cell, rng);
        const int to_label = partition.in_b(y.cell) ? 2 : 1;
        if (st.label == 2 && to_label == 2) {
          record(log, logging, id, t, EventKind::suppressed, st.position, y.position, 2, 2);
        } else {
          record(log, logging, id, t, to_label == st.label ? EventKind::jump : EventKind::label_switch, st.position,
                 y.position, st.label, to_label);
          st.position = y.position;
          st.label = to_label;
          cell = y.cell;
        }
        st.clock += clock(rng);
      }
      diffuse(target);
      e.snapshots[s][id] = st;
    }
  };
  return run_ensemble(g.dim(), config,
                      "coupled " + std::string(to_string(partition.family())) + " n=" + std::to_string(partition.n()) +
                          " kernel=" + std::string(to_string(kernel.spec().family)),
                      walk);
}

Ensemble simulate_limit(const std::vector<double>& theta, const DiscreteKernel& kernel, const Field& u0,
                        const SimConfig& config) {
  config.validate();
  const Grid& g = kernel.grid();
  if (!(u0.grid == g)) throw Error(ErrorKind::mismatch, "kernel and initial density must share one grid");
  if (theta.size() != g.cell_count()) throw Error(ErrorKind::mismatch, "theta has the wrong number of cells");
  for (double th : theta) {
    if (!(th > 0.0 && th < 1.0)) throw Error(ErrorKind::config, "theta must lie strictly inside (0,1)");
  }
  const auto cdf = initial_cdf(u0);
  const JumpSampler sampler(kernel);
  const bool logging = config.record_events;

  auto walk = [&](std::size_t id, Rng& rng, Ensemble& e, std::vector<Event>& log) {
    std::exponential_distribution<double> clock(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t cell = draw_initial_cell(cdf, rng);
    ParticleState st{uniform_in_cell(g, cell, rng), 1, 0.0};
    st.label = unit(rng) < 1.0 - theta[cell] ? 1 : 2;
    st.clock = clock(rng);
    std::size_t at = cell;
    e.initial[id] = st;
    for (std::size_t s = 0; s < e.times.size(); ++s) {
      while (st.clock < e.times[s]) {
        const JumpTarget y = sampler(at, rng);
        const double coin = unit(rng);
        const double keep_white = 1.0 - theta[y.cell];
        if (st.label == 1) {
          const int to_label = coin < keep_white ? 1 : 2;
          record(log, logging, id, st.clock, to_label == 1 ? EventKind::jump : EventKind::label_switch, st.position,
                 y.position, 1, to_label);
          st.position = y.position;
          st.label = to_label;
          at = y.cell;
        } else if (coin < keep_white) {
          record(log, logging, id, st.clock, EventKind::label_switch, st.position, y.position, 2, 1);
          st.position = y.position;
          st.label = 1;
          at = y.cell;
        } else {
          record(log, logging, id, st.clock, EventKind::suppressed, st.position, y.position, 2, 2);
        }
        st.clock += clock(rng);
      }
      e.snapshots[s][id] = st;
    }
  };
  return run_ensemble(g.dim(), config, "limit kernel=" + std::string(to_string(kernel.spec().family)), walk);
}

EmpiricalDensity empirical_density(const Ensemble& ensemble, std::size_t snapshot, const Grid& grid) {
  if (snapshot >= ensemble.snapshots.size()) {
    throw Error(ErrorKind::precondition, "snapshot " + std::to_string(snapshot) + " does not exist");
  }
  if (grid.dim() != ensemble.dim) throw Error(ErrorKind::mismatch, "histogram grid dimension differs from ensemble");
  const auto& particles = ensemble.snapshots[snapshot];
  const double t = ensemble.times[snapshot];
  std::vector<std::size_t> c1(grid.cell_count(), 0), c2(grid.cell_count(), 0);
  for (const auto& p : particles) {
    const std::size_t cell = grid.locate(p.position);
    (p.label == 1 ? c1 : c2)[cell] += 1;
  }
  const double scale = 1.0 / (static_cast<double>(particles.size()) * grid.cell_volume());
  EmpiricalDensity d{Field(grid, 0.0, t), Field(grid, 0.0, t), Field(grid, 0.0, t)};
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    d.label1.values[i] = static_cast<double>(c1[i]) * scale;
    d.label2.values[i] = static_cast<double>(c2[i]) * scale;
    d.total.values[i] = d.label1.values[i] + d.label2.values[i];
  }
  return d;
}

namespace {

BinScore score(std::size_t bin, int label, double p_hat, double p, std::size_t n) {
  BinScore b{bin, label, p_hat, p, std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n)), 0.0};
  if (b.sigma > 0.0) b.z = (p_hat - p) / b.sigma;
  else b.z = p_hat == p ? 0.0 : std::numeric_limits<double>::infinity();
  return b;
}

}  // namespace

HistogramComparison compare_histogram(const Ensemble& ensemble, std::size_t snapshot, const Grid& bins,
                                      const Field& expected_total, const Field* label1, const Field* label2,
                                      double expected_label2_mass) {
  const EmpiricalDensity emp = empirical_density(ensemble, snapshot, bins);
  HistogramComparison out;
  out.samples = ensemble.snapshots[snapshot].size();
  const double vol = bins.cell_volume();
  auto add = [&](const Field& empirical, const Field& expected, int label) {
    const Field coarse = coarsen(expected, bins);
    for (std::size_t i = 0; i < bins.cell_count(); ++i) {
      out.bins.push_back(score(i, label, empirical.values[i] * vol, coarse.values[i] * vol, out.samples));
      out.max_abs_z = std::max(out.max_abs_z, std::abs(out.bins.back().z));
    }
  };
  add(emp.total, expected_total, 0);
  if (label1) add(emp.label1, *label1, 1);
  if (label2) add(emp.label2, *label2, 2);
  out.label2_mass = score(0, 2, total_mass(emp.label2), expected_label2_mass, out.samples);
  return out;
}

namespace {

// Cell average of f(., label) by 4-point Gauss-Legendre per axis.
double cell_average(const Grid& g, std::size_t cell, const PathFunction& f, int label) {
  static constexpr std::array<double, 4> node{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
  static constexpr std::array<double, 4> weight{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                0.3478548451374538};
  const Point c = g.center(cell);
  const double half = 0.5 * g.h();
  double acc = 0.0;
  // Dividing by the summed weights keeps the average of f = 1 exactly 1.
  double total = 0.0;
  if (g.dim() == 1) {
    for (std::size_t a = 0; a < 4; ++a) {
      acc += weight[a] * f({c.x + half * node[a], 0.0}, label);
      total += weight[a];
    }
    return acc / total;
  }
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      acc += weight[a] * weight[b] * f({c.x + half * node[a], c.y + half * node[b]}, label);
      total += weight[a] * weight[b];
    }
  }
  return acc / total;
}

}  // namespace

MartingaleResult martingale_residual(const Ensemble& ensemble, const std::vector<double>& theta,
                                     const DiscreteKernel& kernel, const PathFunction& f, double t) {
  if (!ensemble.has_events) {
    throw Error(ErrorKind::diagnostic, "martingale residual needs event logs; rerun with event recording enabled");
  }
  const Grid& g = kernel.grid();
  const std::size_t n = g.cell_count();
  if (theta.size() != n) throw Error(ErrorKind::mismatch, "theta has the wrong number of cells");
  std::vector<double> f1(n), f2(n);
  for (std::size_t j = 0; j < n; ++j) {
    f1[j] = cell_average(g, j, f, 1);
    f2[j] = cell_average(g, j, f, 2);
  }
  // Limit generator at (x, label); every bracket vanishes for constant f.
  auto generator = [&](Point x, int label) {
    const std::size_t i = g.locate(x);
    const double fx = f(x, label);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = kernel.weight(i, j);
      if (label == 1) {
        acc += w * ((1.0 - theta[j]) * (f1[j] - fx) + theta[j] * (f2[j] - fx));
      } else {
        acc += w * (1.0 - theta[j]) * (f1[j] - fx);
      }
    }
    return acc;
  };

  const std::size_t count = ensemble.initial.size();
  std::vector<double> samples(count);
  std::vector<std::size_t> first(count + 1, 0);
  for (const auto& ev : ensemble.events) ++first[ev.particle + 1];
  for (std::size_t p = 0; p < count; ++p) first[p + 1] += first[p];

  const auto np = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t ip = 0; ip < np; ++ip) {
    const auto p = static_cast<std::size_t>(ip);
    Point x = ensemble.initial[p].position;
    int label = ensemble.initial[p].label;
    const double start = f(x, label);
    double integral = 0.0;
    double s = 0.0;
    for (std::size_t q = first[p]; q < first[p + 1]; ++q) {
      const Event& ev = ensemble.events[q];
      if (ev.time > t) break;
      if (ev.kind == EventKind::suppressed) continue;
      integral += (ev.time - s) * generator(x, label);
      s = ev.time;
      x = ev.to;
      label = ev.label_to;
    }
    integral += (t - s) * generator(x, label);
    samples[p] = f(x, label) - start - integral;
  }

  MartingaleResult r;
  r.samples = count;
  double sum = 0.0;
  for (double v : samples) sum += v;
  r.mean = sum / static_cast<double>(count);
  double var = 0.0;
  for (double v : samples) var += (v - r.mean) * (v - r.mean);
  if (count > 1) var /= static_cast<double>(count - 1);
  r.std_error = std::sqrt(var / static_cast<double>(count));
  return r;
}

}  // namespace mixhom
