#include "mixhom/app.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "mixhom/coupled_solver.hpp"
#include "mixhom/homogenize.hpp"
#include "mixhom/limit_solver.hpp"
#include "mixhom/particle.hpp"

namespace mixhom {

using ojson = nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"partition",  "solve-coupled",  "solve-limit", "simulate-n",
                                              "simulate-limit", "sweep", "compare"};
  return names;
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::alignment: return 3;
    case ErrorKind::stability: return 4;
    case ErrorKind::normalization: return 5;
    case ErrorKind::io: return 6;
    case ErrorKind::mismatch: return 7;
    case ErrorKind::precondition: return 8;
    case ErrorKind::diagnostic: return 9;
  }
  return 1;
}

ojson partition_summary(const Partition& p) {
  const Grid& g = p.grid();
  return {{"family", std::string(to_string(p.family()))},
          {"n", p.n()},
          {"k", p.k()},
          {"r", p.r()},
          {"dim", g.dim()},
          {"m", g.m()},
          {"theta", p.theta().front()},
          {"max_diam", p.max_diam()},
          {"component_count", p.components().size()},
          {"a_cells", p.count(Region::A)},
          {"b_cells", p.count(Region::B)},
          {"b_measure", p.b_measure()},
          {"min_component_width", p.min_component_width()}};
}

namespace {

ojson kernel_summary(const DiscreteKernel& k) {
  return {{"family", std::string(to_string(k.spec().family))},
          {"width", k.spec().width},
          {"row_sum_defect", k.row_sum_defect()},
          {"symmetry_defect", k.symmetry_defect()},
          {"sup_density", k.sup_density()}};
}

ojson metadata(std::string_view command, const ExperimentConfig& config) {
  return {{"command", std::string(command)}, {"config", to_json(config)}};
}

void cmd_partition(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const Grid g = config.grid();
  const Partition p = config.build_partition(g);
  CsvTable labels;
  labels.header = {"cell_index", "x"};
  if (g.dim() == 2) labels.header.emplace_back("y");
  labels.header.emplace_back("label");
  labels.header.emplace_back("component");
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const Point c = g.center(i);
    std::vector<std::string> row{std::to_string(i), format_number(c.x)};
    if (g.dim() == 2) row.push_back(format_number(c.y));
    row.emplace_back(p.in_b(i) ? "B" : "A");
    row.push_back(std::to_string(p.component_of(i)));
    labels.rows.push_back(std::move(row));
  }
  ojson summary = partition_summary(p);
  out.write_csv("partition_cells.csv", labels);
  out.write_json("partition.json", summary);
  out.write_json("metadata.json", metadata("partition", config));
  log << "partition " << summary["family"].get<std::string>() << " n=" << p.n() << " max_diam=" << p.max_diam()
      << " components=" << p.components().size() << "\n";
}

void cmd_solve_coupled(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const Grid g = config.grid();
  const Partition p = config.build_partition(g);
  const DiscreteKernel k = discretize(config.kernel, g);
  const CoupledOperator op = assemble(p, k, g);
  const Field u0 = make_initial(config.initial, g);
  const auto traj = integrate(op, u0, config.coupled_options(g));

  CsvTable summary;
  summary.header = {"t", "mass", "l2_norm", "energy", "min", "mass_b"};
  for (const auto& f : traj) {
    double mb = 0.0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) mb += p.in_b(i) ? f.values[i] : 0.0;
    summary.rows.push_back({format_number(f.t), format_number(total_mass(f)), format_number(l2_norm(f)),
                            format_number(energy(op, f)), format_number(min_value(f)),
                            format_number(mb * g.cell_volume())});
  }
  out.write_csv("coupled.csv", trajectory_table(traj));
  out.write_csv("coupled_summary.csv", summary);
  ojson meta = metadata("solve-coupled", config);
  meta["partition"] = partition_summary(p);
  meta["kernel"] = kernel_summary(k);
  meta["dt"] = config.coupled_options(g).dt;
  out.write_json("metadata.json", meta);
  log << "solve-coupled: " << traj.size() << " snapshots, mass drift "
      << std::abs(total_mass(traj.back()) - total_mass(u0)) << "\n";
}

LimitOperator limit_operator(const ExperimentConfig& config, const Partition& p, const DiscreteKernel& k) {
  const StripMode strip{config.limit.strip, config.limit.strip_coefficient};
  if (config.limit.theta) return make_limit_operator(std::vector<double>(k.size(), *config.limit.theta), k, strip);
  return make_limit_operator(p, k, strip);
}

void cmd_solve_limit(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const Grid g = config.grid();
  const Partition p = config.build_partition(g);
  const DiscreteKernel k = discretize(config.kernel, g);
  const LimitOperator op = limit_operator(config, p, k);
  const Field u0 = make_initial(config.initial, g);
  const auto opts = config.limit_options(g);
  const auto traj = integrate_limit(op, split_initial(op, u0), opts);

  CsvTable summary;
  summary.header = {"t", "mass_a", "mass_b"};
  for (const auto& s : traj) {
    const auto [ma, mb] = mass_pair(s);
    summary.rows.push_back({format_number(s.t), format_number(ma), format_number(mb)});
  }
  out.write_csv("limit.csv", pair_table(traj));
  out.write_csv("limit_summary.csv", summary);
  ojson meta = metadata("solve-limit", config);
  meta["theta"] = op.theta().front();
  meta["kernel"] = kernel_summary(k);
  meta["dt"] = opts.dt;
  out.write_json("metadata.json", meta);
  log << "solve-limit: " << traj.size() << " snapshots\n";
}

void write_ensemble(std::string_view command, const ExperimentConfig& config, const Ensemble& e,
                    const SimConfig& sim, ArtifactWriter& out) {
  out.write_csv("ensemble.csv", ensemble_table(e));
  if (e.has_events) out.write_csv("events.csv", events_table(e));
  ojson meta = metadata(command, config);
  meta["description"] = e.description;
  meta["brownian_substep"] = sim.brownian_substep;
  out.write_json("metadata.json", meta);
}

void cmd_simulate_n(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const Grid g = config.grid();
  const Partition p = config.build_partition(g);
  const DiscreteKernel k = discretize(config.kernel, g);
  const Field u0 = make_initial(config.initial, g);
  const SimConfig sim = config.sim_config(&p);
  const Ensemble e = simulate_coupled(p, k, u0, sim);
  write_ensemble("simulate-n", config, e, sim, out);
  log << "simulate-n: " << sim.particle_count << " particles, " << e.events.size() << " logged events\n";
}

void cmd_simulate_limit(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const Grid g = config.grid();
  const Partition p = config.build_partition(g);
  const DiscreteKernel k = discretize(config.kernel, g);
  const Field u0 = make_initial(config.initial, g);
  const SimConfig sim = config.sim_config(&p);
  const std::vector<double> theta =
      config.limit.theta ? std::vector<double>(g.cell_count(), *config.limit.theta) : p.theta();
  const Ensemble e = simulate_limit(theta, k, u0, sim);
  write_ensemble("simulate-limit", config, e, sim, out);
  if (e.has_events) {
    CsvTable mart;
    mart.header = {"f", "t", "mean", "std_error"};
    const std::vector<std::pair<std::string, PathFunction>> fs{
        {"1", [](Point, int) { return 1.0; }},
        {"i", [](Point, int i) { return static_cast<double>(i); }},
        {"x", [](Point x, int) { return x.x; }},
        {"x2", [](Point x, int) { return x.x * x.x; }}};
    for (const auto& [name, f] : fs) {
      for (double t : e.times) {
        const auto r = martingale_residual(e, theta, k, f, t);
        mart.rows.push_back({name, format_number(t), format_number(r.mean), format_number(r.std_error)});
      }
    }
    out.write_csv("martingale.csv", mart);
  }
  log << "simulate-limit: " << sim.particle_count << " particles\n";
}

void cmd_sweep(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const SweepSpec spec = config.sweep_spec();
  const ConvergenceReport report = run_sweep(spec);
  out.write_csv("convergence.csv", report_table(report));

  ojson ratios = ojson::array();
  std::vector<std::pair<std::string, LimitVariant>> keys;
  for (const auto& r : report.rows) {
    const std::pair<std::string, LimitVariant> key{r.test_id, r.limit};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [id, limit] : keys) {
    const RatioCheck c = end_to_end_ratio(report, id, limit);
    ratios.push_back({{"test_id", id},
                      {"limit", std::string(to_string(limit))},
                      {"gap_first", c.gap_first},
                      {"gap_last", c.gap_last},
                      {"ratio", c.ratio},
                      {"at_floor", c.at_floor}});
    log << "sweep " << id << " [" << to_string(limit) << "] gap " << c.gap_first << " -> " << c.gap_last
        << " ratio " << c.ratio << (c.at_floor ? " (round-off floor)" : "") << "\n";
  }
  ojson meta = metadata("sweep", config);
  ojson res = ojson::array();
  for (const auto& [n, m] : report.resolutions) res.push_back({{"n", n}, {"m", m}});
  meta["resolutions"] = res;
  meta["snapshots"] = uniform_snapshots(spec.horizon, spec.snapshot_count);
  meta["gap_floor"] = gap_floor;
  meta["ratios"] = ratios;
  out.write_json("convergence_meta.json", meta);
}

// Snapshots of a trajectory or pair CSV keyed by time.
struct SolverSnapshots {
  std::map<double, Field> total;
  std::map<double, Field> a;
  std::map<double, Field> b;
  bool pair = false;
};

SolverSnapshots read_solver_csv(const std::filesystem::path& path, const Grid& g) {
  const CsvTable t = read_csv(path);
  SolverSnapshots s;
  s.pair = t.has_column("a") && t.has_column("b");
  if (!s.pair && !t.has_column("u")) throw Error(ErrorKind::io, path.string() + " has neither a u nor an a,b column");
  const std::size_t ct = t.column("t");
  const std::size_t cc = t.column("cell_index");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double time = t.number(r, ct);
    const auto cell = static_cast<std::size_t>(t.number(r, cc));
    if (cell >= g.cell_count()) throw Error(ErrorKind::mismatch, path.string() + ": cell index outside the grid");
    auto slot = [&](std::map<double, Field>& m) -> double& {
      auto it = m.try_emplace(time, Field(g, 0.0, time)).first;
      return it->second.values[cell];
    };
    if (s.pair) {
      const double a = t.number(r, t.column("a"));
      const double b = t.number(r, t.column("b"));
      slot(s.a) = a;
      slot(s.b) = b;
      slot(s.total) = a + b;
    } else {
      slot(s.total) = t.number(r, t.column("u"));
    }
  }
  return s;
}

Ensemble read_ensemble_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  Ensemble e;
  e.dim = t.has_column("y") ? 2 : 1;
  const std::size_t ct = t.column("t"), cx = t.column("x"), cl = t.column("label");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double time = t.number(r, ct);
    if (e.times.empty() || e.times.back() != time) {
      e.times.push_back(time);
      e.snapshots.emplace_back();
    }
    ParticleState st;
    st.position.x = t.number(r, cx);
    if (e.dim == 2) st.position.y = t.number(r, t.column("y"));
    st.label = static_cast<int>(t.number(r, cl));
    e.snapshots.back().push_back(st);
  }
  return e;
}

void cmd_compare(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  if (config.compare.density.empty() || config.compare.ensemble.empty()) {
    throw Error(ErrorKind::config, "compare needs compare.density and compare.ensemble paths");
  }
  const Grid g = config.grid();
  const Partition p = config.build_partition(g);
  const SolverSnapshots solver = read_solver_csv(config.compare.density, g);
  const Ensemble e = read_ensemble_csv(config.compare.ensemble);
  if (e.dim != g.dim()) throw Error(ErrorKind::mismatch, "ensemble and domain dimensions differ");
  const Grid bins = make_grid(g.dim(), config.compare.bins);

  CsvTable z;
  z.header = {"t", "bin", "label", "empirical", "expected", "sigma", "z"};
  ojson per_time = ojson::array();
  double worst = 0.0;
  std::size_t matched = 0;
  for (std::size_t s = 0; s < e.times.size(); ++s) {
    const double t = e.times[s];
    if (config.compare.t && std::abs(*config.compare.t - t) > 1e-9) continue;
    const auto it = solver.total.find(t);
    if (it == solver.total.end()) continue;
    ++matched;
    const Field* a = solver.pair ? &solver.a.at(t) : nullptr;
    const Field* b = solver.pair ? &solver.b.at(t) : nullptr;
    double mass_b = 0.0;
    if (solver.pair) {
      mass_b = total_mass(*b);
    } else {
      for (std::size_t i = 0; i < g.cell_count(); ++i) mass_b += p.in_b(i) ? it->second.values[i] : 0.0;
      mass_b *= g.cell_volume();
    }
    const HistogramComparison c = compare_histogram(e, s, bins, it->second, a, b, mass_b);
    for (const auto& bs : c.bins) {
      z.rows.push_back({format_number(t), std::to_string(bs.bin), std::to_string(bs.label),
                        format_number(bs.empirical), format_number(bs.expected), format_number(bs.sigma),
                        format_number(bs.z)});
    }
    const auto& lm = c.label2_mass;
    z.rows.push_back({format_number(t), "mass", "2", format_number(lm.empirical), format_number(lm.expected),
                      format_number(lm.sigma), format_number(lm.z)});
    per_time.push_back({{"t", t},
                        {"max_abs_z", c.max_abs_z},
                        {"label2_empirical", lm.empirical},
                        {"label2_expected", lm.expected},
                        {"label2_z", lm.z}});
    worst = std::max(worst, c.max_abs_z);
    log << "compare t=" << t << " max|z|=" << c.max_abs_z << " label-2 mass z=" << lm.z << "\n";
  }
  if (matched == 0) throw Error(ErrorKind::mismatch, "no snapshot time is shared by the two inputs");
  out.write_csv("z_scores.csv", z);
  ojson meta = metadata("compare", config);
  meta["samples"] = e.snapshots.front().size();
  meta["max_abs_z"] = worst;
  meta["per_time"] = per_time;
  out.write_json("compare.json", meta);
}

}  // namespace

std::vector<ManifestEntry> run_command(std::string_view command, const ExperimentConfig& config,
                                       const std::filesystem::path& out_dir, std::ostream& log) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw Error(ErrorKind::config, "unknown command '" + std::string(command) + "'");
  }
  config.validate();
  ArtifactWriter out(out_dir);
  if (command == "partition") cmd_partition(config, out, log);
  else if (command == "solve-coupled") cmd_solve_coupled(config, out, log);
  else if (command == "solve-limit") cmd_solve_limit(config, out, log);
  else if (command == "simulate-n") cmd_simulate_n(config, out, log);
  else if (command == "simulate-limit") cmd_simulate_limit(config, out, log);
  else if (command == "sweep") cmd_sweep(config, out, log);
  else cmd_compare(config, out, log);
  return out.finish();
}

}  // namespace mixhom
