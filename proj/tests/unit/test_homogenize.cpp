#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mixhom/error.hpp"
#include "mixhom/homogenize.hpp"

using namespace mixhom;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::diagnostic;
}

}  // namespace

TEST_CASE("dictionary") {
  const auto d1 = test_dictionary(1);
  const auto d2 = test_dictionary(2);
  CHECK(d1.size() == 5);
  CHECK(d2.size() == 9);
  CHECK(d1.front().id == "1");
  CHECK(find_test_function(2, "xy")(Point{0.5, 0.25}) == 0.125);
  CHECK(find_test_function(1, "cos_pi_x")(Point{0.0, 0.0}) == 1.0);
  CHECK(kind_of([] { (void)find_test_function(1, "xy"); }) == ErrorKind::config);
  CHECK(kind_of([] { (void)find_test_function(1, "sin"); }) == ErrorKind::config);

  // Lipschitz bounds hold on a fine sample
  for (const auto& phi : d2) {
    double worst = 0.0;
    const double step = 1e-3;
    for (double x = 0.0; x + step <= 1.0; x += 0.01) {
      for (double y = 0.0; y + step <= 1.0; y += 0.01) {
        const double fx = (phi({x + step, y}, 0.0) - phi({x, y}, 0.0)) / step;
        const double fy = (phi({x, y + step}, 0.0) - phi({x, y}, 0.0)) / step;
        worst = std::max(worst, std::hypot(fx, fy));
      }
    }
    CHECK(worst <= phi.lipschitz + 1e-2);
  }

  const TestFunction v = vanishing_at(find_test_function(1, "x"), 2.0);
  CHECK(v.id == "x@T");
  CHECK(v({0.5, 0.0}, 2.0) == 0.0);
  CHECK(v({0.5, 0.0}, 1.0) == 0.25);
  CHECK(v.time_derivative({0.5, 0.0}, 1.0) == -0.25);
}

TEST_CASE("piecewise-constant projection") {
  const Grid g = make_grid(1, 4);
  const Partition p = make_alternating_1d(1, 0.5, g);
  const Field proj = project_piecewise_constant(find_test_function(1, "x"), p, g, 0.0);
  CHECK(proj.values == std::vector<double>{0.125, 0.375, 0.75, 0.75});

  const TestFunction c{"c", [](Point, double) { return 3.5; }, nullptr, 0.0, false};
  for (double v : project_piecewise_constant(c, p, g, 0.0).values) CHECK(v == 3.5);
  CHECK(projection_error(c, p, 0.0) == 0.0);

  const Grid g64 = make_grid(1, 64);
  const Partition p8 = make_alternating_1d(8, 0.5, g64);
  CHECK(projection_error(find_test_function(1, "cos_pi_x"), p8, 0.0) <= std::numbers::pi / 16);
}

TEST_CASE("projection error is bounded by Lipschitz constant times diameter") {
  for (int n = 1; n <= 8; ++n) {
    std::vector<Partition> parts{make_alternating_1d(n, 0.5, make_grid(1, 4 * n))};
    if (n >= 2) {
      parts.push_back(make_chessboard(n, make_grid(2, 2 * n)));
      parts.push_back(make_strips(n, make_grid(2, 2 * n)));
    }
    parts.push_back(make_balls(n, 0.3, make_grid(2, 8 * n)));
    for (const auto& p : parts) {
      for (const auto& phi : test_dictionary(p.grid().dim())) {
        CHECK(projection_error(phi, p, 0.0) <= phi.lipschitz * p.max_diam() + 1e-12);
      }
    }
  }
}

TEST_CASE("weak density gap decays with n") {
  for (const auto& phi : test_dictionary(1)) {
    double prev = -1.0;
    for (int n : {2, 4, 8, 16}) {
      const Grid g = make_grid(1, 64 * n);
      const double gap = weak_density_gap(make_alternating_1d(n, 0.5, g), g, phi);
      if (prev > gap_floor) CHECK(gap <= 0.6 * prev);
      prev = gap;
    }
  }
  for (const auto& phi : test_dictionary(2)) {
    double prev = -1.0;
    for (int n : {2, 4, 8, 16}) {
      const Grid g = make_grid(2, 8 * n);
      const double gap = weak_density_gap(make_chessboard(n, g), g, phi);
      if (prev > gap_floor) CHECK(gap <= 0.6 * prev);
      prev = gap;
    }
  }
}

TEST_CASE("weak gap of a consistent pair vanishes") {
  const Grid g = make_grid(1, 8);
  const Partition p = make_alternating_1d(2, 0.5, g);
  std::vector<Field> u;
  std::vector<DensityPair> ab;
  for (double t : {0.0, 0.5, 1.0}) {
    Field f(g, 0.0, t);
    Field a(g, 0.0, t), b(g, 0.0, t);
    for (std::size_t i = 0; i < 8; ++i) {
      f.values[i] = 1.0 + t * g.center(i).x;
      (p.in_b(i) ? b : a).values[i] = f.values[i];
    }
    u.push_back(f);
    ab.push_back({a, b, t});
  }
  const WeakGaps w = weak_gap(u, ab, find_test_function(1, "x2"), p);
  CHECK(w.gap_u == 0.0);
  CHECK(w.gap_a == 0.0);
  CHECK(w.gap_b == 0.0);

  ab.pop_back();
  CHECK(kind_of([&] { (void)weak_gap(u, ab, find_test_function(1, "x2"), p); }) == ErrorKind::mismatch);
}

TEST_CASE("weak-form residual") {
  const Grid g = make_grid(1, 32);
  const Partition p = make_alternating_1d(2, 0.5, g);
  const DiscreteKernel k = discretize({KernelFamily::gaussian, 0.2}, g);
  const CoupledOperator op = assemble(p, k, g);
  InitialSpec init;
  init.kind = InitialKind::cosine_bump;
  const TestFunction phi = vanishing_at(find_test_function(1, "cos_pi_x"), 1.0);

  IntegrationOptions opt;
  opt.dt = 0.2 * g.h() * g.h();
  opt.snapshots = uniform_snapshots(1.0, 11);
  const double coarse = weak_form_residual(integrate(op, make_initial(init, g), opt), op, phi);
  opt.snapshots = uniform_snapshots(1.0, 81);
  const double fine = weak_form_residual(integrate(op, make_initial(init, g), opt), op, phi);
  CHECK(std::abs(fine) < std::abs(coarse));
  CHECK(std::abs(fine) < 1e-3);

  // constant data: only the time quadrature of -int d_t phi against phi(0) remains, which is exact
  opt.snapshots = uniform_snapshots(1.0, 11);
  CHECK(std::abs(weak_form_residual(integrate(op, Field(g, 1.0), opt), op, phi)) <= 1e-12);

  CHECK(kind_of([&] { (void)weak_form_residual(integrate(op, Field(g, 1.0), opt), op, find_test_function(1, "x")); }) ==
        ErrorKind::precondition);
}

TEST_CASE("sweep") {
  SweepSpec spec;
  spec.n_list = {2, 4};
  spec.base = 16;
  spec.tests = {"1", "x"};
  spec.horizon = 0.2;
  spec.snapshot_count = 3;
  spec.initial.kind = InitialKind::cosine_bump;
  const ConvergenceReport r = run_sweep(spec);
  CHECK(r.resolutions == std::vector<std::pair<int, int>>{{2, 32}, {4, 64}});
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].n == 2);
  CHECK(r.rows[0].test_id == "1");
  CHECK(r.rows[1].test_id == "x");
  CHECK(r.rows[0].gaps.gap_u <= gap_floor);

  const ConvergenceReport again = run_sweep(spec);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(again.rows[i].gaps.gap_u == r.rows[i].gaps.gap_u);

  const RatioCheck c = end_to_end_ratio(r, "x");
  CHECK(c.gap_first == r.rows[1].gaps.gap_u);
  CHECK(c.gap_last == r.rows[3].gaps.gap_u);
  CHECK(kind_of([&] { (void)end_to_end_ratio(r, "x2"); }) == ErrorKind::precondition);
  CHECK(kind_of([&] { (void)end_to_end_ratio(r, "x", LimitVariant::strip); }) == ErrorKind::precondition);

  SweepSpec bad = spec;
  bad.base = 1;
  bad.n_list = {4};
  bad.k = 0.3;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::alignment);
  bad = spec;
  bad.tests = {"nope"};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::config);
}

TEST_CASE("strip sweeps report every limit variant") {
  SweepSpec spec;
  spec.family = PartitionFamily::strips;
  spec.n_list = {2};
  spec.base = 4;
  spec.tests = {"cos_pi_y"};
  spec.horizon = 0.05;
  spec.snapshot_count = 2;
  spec.initial.kind = InitialKind::cosine_bump;
  spec.initial.modes = {"y", "xy"};
  const ConvergenceReport r = run_sweep(spec);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].limit == LimitVariant::standard);
  CHECK(r.rows[1].limit == LimitVariant::strip);
  CHECK(r.rows[2].limit == LimitVariant::strip_literal);
}
