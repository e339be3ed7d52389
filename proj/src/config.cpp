#include "mixhom/config.hpp"

#include <algorithm>
#include <fstream>

#include "mixhom/error.hpp"

namespace mixhom {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw Error(ErrorKind::config, "'" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::config, "unknown field '" + where + "." + key + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::config, "field '" + where + "." + key + "' has the wrong type");
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, std::optional<T>& out) {
  if (!obj.contains(key)) return;
  T v{};
  read(obj, key, where, v);
  out = v;
}

Point read_point(const json& obj, const char* key, const std::string& where, Point fallback) {
  if (!obj.contains(key)) return fallback;
  std::vector<double> v;
  read(obj, key, where, v);
  if (v.empty() || v.size() > 2) throw Error(ErrorKind::config, "field '" + where + "." + key + "' needs 1 or 2 numbers");
  return {v[0], v.size() > 1 ? v[1] : fallback.y};
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  check_keys(j, "config",
             {"domain", "partition", "kernel", "time", "initial", "particles", "sweep", "limit", "compare", "output"});
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    check_keys(d, "domain", {"dim", "m"});
    read(d, "dim", "domain", c.dim);
    read(d, "m", "domain", c.m);
  }
  if (j.contains("partition")) {
    const auto& p = j["partition"];
    check_keys(p, "partition", {"family", "n", "k", "r"});
    std::string family(to_string(c.partition.family));
    read(p, "family", "partition", family);
    c.partition.family = parse_partition_family(family);
    read(p, "n", "partition", c.partition.n);
    read(p, "k", "partition", c.partition.k);
    read(p, "r", "partition", c.partition.r);
  }
  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    check_keys(k, "kernel", {"family", "width", "tol", "max_iter"});
    std::string family(to_string(c.kernel.family));
    read(k, "family", "kernel", family);
    c.kernel.family = parse_kernel_family(family);
    read(k, "width", "kernel", c.kernel.width);
    read(k, "tol", "kernel", c.kernel.sinkhorn_tol);
    read(k, "max_iter", "kernel", c.kernel.sinkhorn_max_iter);
  }
  if (j.contains("time")) {
    const auto& t = j["time"];
    check_keys(t, "time", {"T", "dt", "cfl_factor", "snapshots", "snapshot_count"});
    read(t, "T", "time", c.time.horizon);
    read(t, "dt", "time", c.time.dt);
    read(t, "cfl_factor", "time", c.time.cfl_factor);
    read(t, "snapshots", "time", c.time.snapshots);
    read(t, "snapshot_count", "time", c.time.snapshot_count);
  }
  if (j.contains("initial")) {
    const auto& i = j["initial"];
    check_keys(i, "initial", {"name", "alpha", "modes", "lo", "hi"});
    std::string name(to_string(c.initial.kind));
    read(i, "name", "initial", name);
    c.initial.kind = parse_initial_kind(name);
    read(i, "alpha", "initial", c.initial.alpha);
    read(i, "modes", "initial", c.initial.modes);
    c.initial.lo = read_point(i, "lo", "initial", c.initial.lo);
    c.initial.hi = read_point(i, "hi", "initial", c.initial.hi);
  }
  if (j.contains("particles")) {
    const auto& p = j["particles"];
    check_keys(p, "particles", {"N", "seed", "delta", "events"});
    read(p, "N", "particles", c.particles.count);
    read(p, "seed", "particles", c.particles.seed);
    read(p, "delta", "particles", c.particles.delta);
    read(p, "events", "particles", c.particles.events);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, "sweep", {"n_list", "resolution_rule", "tests", "limit_dt"});
    read(s, "n_list", "sweep", c.sweep.n_list);
    if (s.contains("resolution_rule")) {
      const auto& r = s["resolution_rule"];
      check_keys(r, "sweep.resolution_rule", {"base"});
      read(r, "base", "sweep.resolution_rule", c.sweep.base);
    }
    read(s, "tests", "sweep", c.sweep.tests);
    read(s, "limit_dt", "sweep", c.sweep.limit_dt);
  }
  if (j.contains("limit")) {
    const auto& l = j["limit"];
    check_keys(l, "limit", {"theta", "strip", "strip_coefficient"});
    read(l, "theta", "limit", c.limit.theta);
    read(l, "strip", "limit", c.limit.strip);
    read(l, "strip_coefficient", "limit", c.limit.strip_coefficient);
  }
  if (j.contains("compare")) {
    const auto& k = j["compare"];
    check_keys(k, "compare", {"density", "ensemble", "bins", "t"});
    read(k, "density", "compare", c.compare.density);
    read(k, "ensemble", "compare", c.compare.ensemble);
    read(k, "bins", "compare", c.compare.bins);
    read(k, "t", "compare", c.compare.t);
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "output", {"directory"});
    read(o, "directory", "output", c.output_directory);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void ExperimentConfig::validate() const {
  (void)make_grid(dim, m);
  const int need = partition.family == PartitionFamily::alternating1d ? 1 : 2;
  if (need != dim) {
    throw Error(ErrorKind::config, std::string(to_string(partition.family)) + " needs domain.dim = " +
                                       std::to_string(need));
  }
  if (partition.n < 1) throw Error(ErrorKind::config, "partition.n must be positive");
  if (!(partition.k > 0.0 && partition.k < 1.0)) throw Error(ErrorKind::config, "partition.k must lie in (0,1)");
  if (!(partition.r > 0.0 && partition.r < 0.5)) throw Error(ErrorKind::config, "partition.r must lie in (0,1/2)");
  kernel.validate();
  if (!(time.horizon > 0.0)) throw Error(ErrorKind::config, "time.T must be positive");
  if (time.dt && !(*time.dt > 0.0)) throw Error(ErrorKind::config, "time.dt must be positive");
  if (!(time.cfl_factor > 0.0 && time.cfl_factor <= 0.5)) {
    throw Error(ErrorKind::config, "time.cfl_factor must lie in (0, 0.5]");
  }
  if (time.snapshots.empty() && time.snapshot_count < 2) {
    throw Error(ErrorKind::config, "time.snapshot_count must be at least 2");
  }
  if (!time.snapshots.empty() &&
      (!std::is_sorted(time.snapshots.begin(), time.snapshots.end()) || time.snapshots.front() < 0.0 ||
       time.snapshots.back() > time.horizon)) {
    throw Error(ErrorKind::config, "time.snapshots must be sorted inside [0, T]");
  }
  initial.validate(dim);
  if (particles.count == 0) throw Error(ErrorKind::config, "particles.N must be positive");
  if (particles.delta && !(*particles.delta > 0.0)) throw Error(ErrorKind::config, "particles.delta must be positive");
  if (sweep.n_list.empty()) throw Error(ErrorKind::config, "sweep.n_list must not be empty");
  if (sweep.base < 0) throw Error(ErrorKind::config, "sweep.resolution_rule.base must be nonnegative");
  if (!(sweep.limit_dt > 0.0 && sweep.limit_dt <= 0.25)) {
    throw Error(ErrorKind::config, "sweep.limit_dt must lie in (0, 0.25]");
  }
  if (limit.theta && !(*limit.theta > 0.0 && *limit.theta < 1.0)) {
    throw Error(ErrorKind::config, "limit.theta must lie in (0,1)");
  }
  if (limit.strip && dim != 2) throw Error(ErrorKind::config, "limit.strip needs a 2-d domain");
  if (!(limit.strip_coefficient > 0.0)) throw Error(ErrorKind::config, "limit.strip_coefficient must be positive");
  if (compare.bins < 1) throw Error(ErrorKind::config, "compare.bins must be positive");
}

Grid ExperimentConfig::grid() const { return make_grid(dim, m); }

Partition ExperimentConfig::build_partition(const Grid& g) const {
  switch (partition.family) {
    case PartitionFamily::alternating1d: return make_alternating_1d(partition.n, partition.k, g);
    case PartitionFamily::chessboard: return make_chessboard(partition.n, g);
    case PartitionFamily::balls: return make_balls(partition.n, partition.r, g);
    case PartitionFamily::strips: return make_strips(partition.n, g);
  }
  throw Error(ErrorKind::config, "unknown partition family");
}

std::vector<double> ExperimentConfig::snapshot_times() const {
  return time.snapshots.empty() ? uniform_snapshots(time.horizon, time.snapshot_count) : time.snapshots;
}

IntegrationOptions ExperimentConfig::coupled_options(const Grid& g) const {
  IntegrationOptions o;
  o.horizon = time.horizon;
  o.cfl_factor = time.cfl_factor;
  o.dt = time.dt.value_or(time.cfl_factor * g.h() * g.h());
  o.snapshots = snapshot_times();
  return o;
}

IntegrationOptions ExperimentConfig::limit_options(const Grid& g) const {
  IntegrationOptions o = coupled_options(g);
  if (!time.dt && !limit.strip) o.dt = sweep.limit_dt;
  return o;
}

SimConfig ExperimentConfig::sim_config(const Partition* p) const {
  SimConfig s;
  s.particle_count = particles.count;
  s.seed = particles.seed;
  s.horizon = time.horizon;
  s.snapshot_times = snapshot_times();
  s.record_events = particles.events;
  if (particles.delta) {
    s.brownian_substep = *particles.delta;
  } else {
    const double w = p ? p->min_component_width() : 1.0;
    s.brownian_substep = std::min(1e-3, w * w / 16.0);
  }
  return s;
}

SweepSpec ExperimentConfig::sweep_spec() const {
  SweepSpec s;
  s.family = partition.family;
  s.n_list = sweep.n_list;
  s.k = partition.k;
  s.r = partition.r;
  s.kernel = kernel;
  s.initial = initial;
  s.horizon = time.horizon;
  s.snapshot_count = time.snapshots.empty() ? time.snapshot_count : time.snapshots.size();
  s.cfl_factor = time.cfl_factor;
  s.limit_dt = sweep.limit_dt;
  s.base = sweep.base;
  s.strip_coefficient = limit.strip_coefficient;
  s.tests = sweep.tests;
  return s;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["domain"] = {{"dim", c.dim}, {"m", c.m}};
  j["partition"] = {{"family", std::string(to_string(c.partition.family))},
                    {"n", c.partition.n},
                    {"k", c.partition.k},
                    {"r", c.partition.r}};
  j["kernel"] = {{"family", std::string(to_string(c.kernel.family))},
                 {"width", c.kernel.width},
                 {"tol", c.kernel.sinkhorn_tol},
                 {"max_iter", c.kernel.sinkhorn_max_iter}};
  nlohmann::ordered_json t{{"T", c.time.horizon}, {"cfl_factor", c.time.cfl_factor}};
  if (c.time.dt) t["dt"] = *c.time.dt;
  if (c.time.snapshots.empty()) t["snapshot_count"] = c.time.snapshot_count;
  else t["snapshots"] = c.time.snapshots;
  j["time"] = t;
  j["initial"] = {{"name", std::string(to_string(c.initial.kind))},
                  {"alpha", c.initial.alpha},
                  {"modes", c.initial.modes},
                  {"lo", {c.initial.lo.x, c.initial.lo.y}},
                  {"hi", {c.initial.hi.x, c.initial.hi.y}}};
  nlohmann::ordered_json p{{"N", c.particles.count}, {"seed", c.particles.seed}, {"events", c.particles.events}};
  if (c.particles.delta) p["delta"] = *c.particles.delta;
  j["particles"] = p;
  j["sweep"] = {{"n_list", c.sweep.n_list},
                {"resolution_rule", {{"base", c.sweep.base}}},
                {"tests", c.sweep.tests},
                {"limit_dt", c.sweep.limit_dt}};
  nlohmann::ordered_json l{{"strip", c.limit.strip}, {"strip_coefficient", c.limit.strip_coefficient}};
  if (c.limit.theta) l["theta"] = *c.limit.theta;
  j["limit"] = l;
  nlohmann::ordered_json k{{"density", c.compare.density}, {"ensemble", c.compare.ensemble}, {"bins", c.compare.bins}};
  if (c.compare.t) k["t"] = *c.compare.t;
  j["compare"] = k;
  j["output"] = {{"directory", c.output_directory}};
  return j;
}

}  // namespace mixhom
