#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixhom/error.hpp"
#include "mixhom/geometry.hpp"
#include "mixhom/test_function.hpp"

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

std::string label_string(const Partition& p) {
  std::string s;
  for (auto r : p.labels()) s += r == Region::A ? 'A' : 'B';
  return s;
}

TestFunction constant_one() { return {"1", [](Point, double) { return 1.0; }, nullptr, 0.0, false}; }
TestFunction linear_x() { return {"x", [](Point p, double) { return p.x; }, nullptr, 1.0, false}; }

}  // namespace

TEST_CASE("midpoint grids") {
  const Grid g = make_grid(1, 4);
  CHECK(g.h() == 0.25);
  CHECK(g.cell_count() == 4);
  const double want[] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.center(i).x == want[i]);

  const Grid g2 = make_grid(2, 2);
  REQUIRE(g2.cell_count() == 4);
  CHECK(g2.center(0).x == 0.25);
  CHECK(g2.center(0).y == 0.25);
  CHECK(g2.center(1).x == 0.75);
  CHECK(g2.center(1).y == 0.25);
  CHECK(g2.center(2).x == 0.25);
  CHECK(g2.center(2).y == 0.75);
  CHECK(g2.center(3).x == 0.75);
  CHECK(g2.center(3).y == 0.75);

  CHECK(kind_of([] { (void)make_grid(1, 1); }) == ErrorKind::config);
  CHECK(kind_of([] { (void)make_grid(3, 4); }) == ErrorKind::config);
}

TEST_CASE("locate clamps boundary points") {
  const Grid g = make_grid(2, 4);
  CHECK(g.locate({0.0, 0.0}) == 0);
  CHECK(g.locate({1.0, 1.0}) == 15);
  CHECK(g.locate({0.3, 0.6}) == g.index(1, 2));
}

TEST_CASE("alternating intervals") {
  SUBCASE("single split") {
    const Grid g = make_grid(1, 4);
    const Partition p = make_alternating_1d(1, 0.5, g);
    CHECK(label_string(p) == "AABB");
    REQUIRE(p.components().size() == 1);
    CHECK(p.components()[0].cells == std::vector<std::size_t>{2, 3});
    CHECK(p.max_diam() == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("two subintervals") {
    const Grid g = make_grid(1, 8);
    const Partition p = make_alternating_1d(2, 0.5, g);
    CHECK(label_string(p) == "AABBAABB");
    CHECK(p.components().size() == 2);
    CHECK(p.max_diam() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.theta().front() == 0.5);
  }
  SUBCASE("misaligned") {
    const Grid g = make_grid(1, 6);
    CHECK(kind_of([&] { (void)make_alternating_1d(2, 0.5, g); }) == ErrorKind::alignment);
    const Grid g8 = make_grid(1, 8);
    CHECK(kind_of([&] { (void)make_alternating_1d(3, 0.5, g8); }) == ErrorKind::alignment);
  }
  SUBCASE("bad parameters") {
    const Grid g = make_grid(1, 8);
    CHECK(kind_of([&] { (void)make_alternating_1d(2, 1.5, g); }) == ErrorKind::config);
    CHECK(kind_of([&] { (void)make_alternating_1d(0, 0.5, g); }) == ErrorKind::config);
    const Grid g2 = make_grid(2, 8);
    CHECK(kind_of([&] { (void)make_alternating_1d(2, 0.5, g2); }) == ErrorKind::config);
  }
}

TEST_CASE("chessboard") {
  const Grid g = make_grid(2, 4);
  const Partition p = make_chessboard(2, g);
  CHECK(p.max_diam() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(p.components().size() == 2);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const int q = g.ix(i) / 2 + g.iy(i) / 2;
    CHECK(p.in_b(i) == (q % 2 == 1));
  }

  const Grid g8 = make_grid(2, 8);
  const Partition p4 = make_chessboard(4, g8);
  CHECK(p4.components().size() == 8);
  CHECK(p4.b_measure() == 0.5);
  CHECK(p4.count(Region::A) == p4.count(Region::B));

  CHECK(kind_of([&] { (void)make_chessboard(3, g); }) == ErrorKind::alignment);
}

TEST_CASE("balls") {
  SUBCASE("enumeration at m = 4") {
    const Grid g = make_grid(2, 4);
    const Partition p = make_balls(1, 0.25, g);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const Point c = g.center(i);
      const bool in = std::hypot(c.x - 0.5, c.y - 0.5) < 0.25;
      CHECK(p.in_b(i) == in);
      inside += in;
    }
    CHECK(inside == 4);
    CHECK(p.b_measure() == doctest::Approx(4.0 / 16.0).epsilon(1e-15));
    CHECK(p.theta().front() == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("fine raster approaches pi r^2") {
    const Grid g = make_grid(2, 512);
    const Partition p = make_balls(1, 0.25, g);
    CHECK(std::abs(p.b_measure() - std::numbers::pi / 16.0) < 2e-3);
  }
  SUBCASE("four squares") {
    const Grid g = make_grid(2, 8);
    const Partition p = make_balls(2, 0.25, g);
    CHECK(p.components().size() == 4);
    // Each disc of radius 1/8 rasterizes to a 2 x 2 block of cells of side 1/8.
    for (const auto& c : p.components()) CHECK(c.cells.size() == 4);
    CHECK(p.max_diam() == doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-15));
    CHECK(p.max_diam() <= 2 * 0.25 / 2 + 2 * g.h());
  }
}

TEST_CASE("strips") {
  const Grid g = make_grid(2, 4);
  const Partition p = make_strips(2, g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) CHECK(p.in_b(i) == (g.ix(i) >= 2));
  CHECK(p.max_diam() == doctest::Approx(std::sqrt(0.25 + 1.0)).epsilon(1e-15));

  const Grid g8 = make_grid(2, 8);
  const Partition p4 = make_strips(4, g8);
  CHECK(p4.components().size() == 2);
  CHECK(p4.max_diam() == doctest::Approx(std::sqrt(1.0 + 1.0 / 16)).epsilon(1e-15));
  CHECK(p4.max_diam() >= 1.0);
  CHECK(p4.min_component_width() == 0.25);

  CHECK(kind_of([&] { (void)make_strips(3, g); }) == ErrorKind::alignment);
}

TEST_CASE("cover, disjointness and theta for every family") {
  std::vector<Partition> parts;
  for (int n : {1, 2, 4, 8}) {
    parts.push_back(make_alternating_1d(n, 0.5, make_grid(1, 8 * n)));
    parts.push_back(make_alternating_1d(n, 0.25, make_grid(1, 8 * n)));
    if (n >= 2) parts.push_back(make_chessboard(n, make_grid(2, 4 * n)));
    parts.push_back(make_balls(n, 0.3, make_grid(2, 8 * n)));
    if (n >= 2) parts.push_back(make_strips(n, make_grid(2, 4 * n)));
  }
  for (const auto& p : parts) {
    const Grid& g = p.grid();
    CHECK(p.count(Region::A) + p.count(Region::B) == g.cell_count());
    std::vector<int> owner(g.cell_count(), -1);
    for (std::size_t c = 0; c < p.components().size(); ++c) {
      for (auto cell : p.components()[c].cells) {
        CHECK(owner[cell] == -1);
        owner[cell] = static_cast<int>(c);
      }
    }
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      CHECK((owner[i] >= 0) == p.in_b(i));
      CHECK(owner[i] == p.component_of(i));
    }
    for (double t : p.theta()) CHECK((t > 0.0 && t < 1.0));
  }
}

TEST_CASE("diameter law") {
  for (int n : {1, 2, 4, 8, 16}) {
    const Partition alt = make_alternating_1d(n, 0.5, make_grid(1, 4 * n));
    CHECK(alt.max_diam() == doctest::Approx(0.5 / n).epsilon(1e-14));
    const Partition chess = make_chessboard(n == 1 ? 2 : n, make_grid(2, 2 * (n == 1 ? 2 : n)));
    const int nn = n == 1 ? 2 : n;
    CHECK(chess.max_diam() == doctest::Approx(std::sqrt(2.0) / nn).epsilon(1e-14));
    const Grid gb = make_grid(2, 8 * n);
    const Partition balls = make_balls(n, 0.3, gb);
    CHECK(balls.max_diam() <= 2 * 0.3 / n + 2 * gb.h() + 1e-15);
  }
}

TEST_CASE("weak density gap") {
  const Grid g = make_grid(1, 64);
  for (int n : {1, 2, 4, 8}) {
    const Partition p = make_alternating_1d(n, 0.5, g);
    CHECK(weak_density_gap(p, g, constant_one()) < 1e-15);
  }
  const Partition p4 = make_alternating_1d(4, 0.5, g);
  CHECK(weak_density_gap(p4, g, linear_x()) == doctest::Approx(1.0 / 32).epsilon(1e-12));

  const Grid g2 = make_grid(2, 16);
  CHECK(weak_density_gap(make_chessboard(4, g2), g2, constant_one()) < 1e-15);

  CHECK(kind_of([&] { (void)weak_density_gap(p4, make_grid(1, 32), linear_x()); }) == ErrorKind::mismatch);
}
