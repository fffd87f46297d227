#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amoebas/amoeba.hpp"
#include "amoebas/errors.hpp"
#include "amoebas/gauss.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace amoebas;

namespace {

LaurentPolynomial line() { return LaurentPolynomial(2, {{{0, 0}, 1.0}, {{1, 0}, -1.0}, {{0, 1}, -1.0}}); }

// w - (1 - 2z - 3z^2), axes (z, w).
LaurentPolynomial cubic_graph() {
  return LaurentPolynomial(2, {{{0, 1}, 1.0}, {{0, 0}, -1.0}, {{1, 0}, 2.0}, {{2, 0}, 3.0}});
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

double projective_real(const ProjectiveDirection& g, const std::vector<double>& q) {
  ComplexVector target(q.begin(), q.end());
  return projective_distance(g.coords, target);
}

}  // namespace

TEST_CASE("log_gauss examples") {
  ComplexVector half{0.5, 0.5};
  auto g = log_gauss(line(), half);
  CHECK(close(g.coords[0], 1.0, 1e-15));
  CHECK(close(g.coords[1], 1.0, 1e-15));

  LaurentPolynomial fermi(1, {{{0}, 1.0}, {{1}, 1.0}});
  ComplexVector zw{1.0, 2.0};
  auto h = log_gauss(graph_polynomial(fermi), zw);
  // (-1 : 2) normalized by its largest entry.
  CHECK(close(h.coords[0], -0.5, 1e-15));
  CHECK(close(h.coords[1], 1.0, 1e-15));

  LaurentPolynomial one_var(1, {{{0}, 1.0}, {{1}, -1.0}});
  ComplexVector one{1.0};
  CHECK(close(log_gauss(one_var, one).coords[0], 1.0, 1e-15));
}

TEST_CASE("log_gauss errors") {
  ComplexVector off{0.3, 0.3};
  CHECK_THROWS_AS(log_gauss(line(), off), InputError);
  // (1 - z)^2 has a singular point at z = 1.
  LaurentPolynomial square(1, {{{0}, 1.0}, {{1}, -2.0}, {{2}, 1.0}});
  ComplexVector one{1.0};
  CHECK_THROWS_AS(log_gauss(square, one), SingularityError);
}

TEST_CASE("projective distance") {
  ComplexVector a{1.0, 2.0}, b{-2.0, -4.0}, c{1.0, 0.0};
  CHECK(projective_distance(a, b) < 1e-15);
  CHECK(std::abs(projective_distance(a, c) - 2.0 / std::sqrt(5.0)) < 1e-15);
  ComplexVector d{Complex(0, 1), Complex(0, 2)};
  CHECK(projective_distance(a, d) < 1e-15);
}

TEST_CASE("inverse_gauss examples") {
  ComplexVector seed{0.4, 0.6};
  std::vector<double> diag{1.0, 1.0};
  auto cp = inverse_gauss(line(), diag, seed);
  CHECK(close(cp.z[0], 0.5, 1e-12));
  CHECK(close(cp.z[1], 0.5, 1e-12));
  CHECK_FALSE(cp.degenerate);

  std::vector<double> skew{2.0, 1.0};
  auto cp2 = inverse_gauss(line(), skew, seed);
  CHECK(close(cp2.z[0], 2.0 / 3.0, 1e-12));
  CHECK(close(cp2.z[1], 1.0 / 3.0, 1e-12));

  LaurentPolynomial one_var(1, {{{0}, 1.0}, {{1}, -1.0}});
  ComplexVector s1{0.3};
  for (double q : {1.0, -2.5}) {
    std::vector<double> d{q};
    CHECK(close(inverse_gauss(one_var, d, s1).z[0], 1.0, 1e-12));
  }

  // gamma = (-z1 : -z2) never reaches (1 : 0) on the torus.
  std::vector<double> axis{1.0, 0.0};
  CHECK_THROWS_AS(inverse_gauss(line(), axis, seed), NumericalError);
  // 2 - z1 - 2 z2 + z2^2 does: D_2 Q = 2 z2 (z2 - 1) vanishes at z2 = 1, forcing z1 = 1.
  LaurentPolynomial bowl(2, {{{0, 0}, 2.0}, {{1, 0}, -1.0}, {{0, 1}, -2.0}, {{0, 2}, 1.0}});
  ComplexVector bseed{0.8, 1.3};
  auto cp3 = inverse_gauss(bowl, axis, bseed);
  CHECK(close(cp3.z[0], 1.0, 1e-9));
  CHECK(close(cp3.z[1], 1.0, 1e-9));
  CHECK(projective_real(log_gauss(bowl, cp3.z), axis) < 1e-10);
}

TEST_CASE("inverse_gauss rejects bad input and reports divergence") {
  ComplexVector seed{0.4, 0.6};
  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(inverse_gauss(line(), zero, seed), InputError);
  ComplexVector bad{0.0, 1.0};
  std::vector<double> diag{1.0, 1.0};
  CHECK_THROWS_AS(inverse_gauss(line(), diag, bad), DomainError);

  // 1 + z1 + z2 + z1 z2 = (1 + z1)(1 + z2): the direction (1,1) has no regular critical point.
  LaurentPolynomial product(2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{0, 1}, 1.0}, {{1, 1}, 1.0}});
  bool failed_or_degenerate = false;
  try {
    auto cp = inverse_gauss(product, diag, seed);
    failed_or_degenerate = cp.degenerate;
  } catch (const NumericalError& e) {
    failed_or_degenerate = true;
    CHECK_FALSE(e.trace().empty());
  }
  CHECK(failed_or_degenerate);
}

TEST_CASE("graph_inverse_gauss examples") {
  LaurentPolynomial fermi(1, {{{0}, 1.0}, {{1}, 1.0}});
  ComplexVector seed{0.3};
  std::vector<double> half{0.5}, third{1.0 / 3.0};
  CHECK(close(graph_inverse_gauss(fermi, half, seed).z[0], 1.0, 1e-12));
  CHECK(close(graph_inverse_gauss(fermi, third, seed).z[0], 0.5, 1e-12));

  LaurentPolynomial cube(1, {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}, {{3}, 1.0}});
  std::vector<double> mid{1.5};
  CHECK(close(graph_inverse_gauss(cube, mid, seed).z[0], 1.0, 1e-12));
  // Near the top of the Newton segment the solution runs off to infinity.
  std::vector<double> top{2.99};
  ComplexVector one{1.0};
  CHECK(std::abs(graph_inverse_gauss(cube, top, one).z[0]) > 50.0);
}

TEST_CASE("graph_inverse_gauss agrees with inverse_gauss on the graph") {
  LaurentPolynomial f(2, {{{0, 0}, 1.0}, {{1, 0}, 2.0}, {{0, 1}, 1.0}, {{1, 1}, 3.0}, {{2, 1}, 1.0}});
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> w(0.15, 0.85);
  ComplexVector seed{1.0, 1.0};
  for (int t = 0; t < 20; ++t) {
    // Keep u inside the Newton polygon conv{(0,0),(1,0),(0,1),(2,1)}.
    double a = w(rng), b = w(rng);
    std::vector<double> u{a * 0.5 + b * 0.5, 0.5 * b};
    auto direct = graph_inverse_gauss(f, u, seed);
    ComplexVector gseed{direct.z[0] * 1.01, direct.z[1] * 0.99, f.evaluate(direct.z) * 1.02};
    std::vector<double> dir{u[0], u[1], -1.0};
    auto via_graph = inverse_gauss(graph_polynomial(f), dir, gseed);
    CHECK(close(via_graph.z[0], direct.z[0], 1e-9 * std::abs(direct.z[0])));
    CHECK(close(via_graph.z[1], direct.z[1], 1e-9 * std::abs(direct.z[1])));
    // Positive f and interior u: the solution is real positive.
    for (auto c : direct.z) {
      CHECK(c.real() > 0.0);
      CHECK(std::abs(c.imag()) <= 1e-12 * c.real());
    }
  }
}

TEST_CASE("property: round trip and tangential criticality") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (const auto& q : {line(), cubic_graph()}) {
    auto seeds = default_seeds(q);
    int solved = 0;
    for (int t = 0; t < 100; ++t) {
      const double a = angle(rng);
      std::vector<double> dir{std::cos(a), std::sin(a)};
      for (const auto& s : seeds) {
        try {
          auto cp = inverse_gauss(q, dir, s);
          CHECK(projective_real(log_gauss(q, cp.z), dir) <= 1e-8);
          CHECK(tangential_residual(q, dir, cp.z) <= 1e-8);
          ++solved;
          break;
        } catch (const NumericalError&) {
        }
      }
    }
    CHECK(solved >= 95);
  }
}

TEST_CASE("direction sweep") {
  CHECK(direction_sweep(1, 10).size() == 1);
  auto two = direction_sweep(2, 8);
  REQUIRE(two.size() == 8);
  CHECK(two[0].q == std::vector<double>{1.0, 0.0});
  CHECK(std::abs(two[4].q[0]) < 1e-15);
  auto three = direction_sweep(3, 3);
  CHECK(three.size() == 18);
  for (const auto& d : three) CHECK(std::abs(d.q[0] * d.q[0] + d.q[1] * d.q[1] + d.q[2] * d.q[2] - 1.0) < 1e-14);
  CHECK_THROWS_AS(direction_sweep(4, 3), InputError);
}

TEST_CASE("contour examples") {
  LaurentPolynomial fermi(1, {{{0}, 1.0}, {{1}, 1.0}});
  std::vector<SweepDirection> dirs{{0.0, {-0.5, 1.0}}};
  auto pts = contour(graph_polynomial(fermi), dirs);
  bool found = false;
  for (const auto& p : pts) {
    if (std::abs(p.x[0]) < 1e-9 && std::abs(p.x[1] - std::log(2.0)) < 1e-9) found = true;
  }
  CHECK(found);

  LaurentPolynomial one_var(1, {{{0}, 1.0}, {{1}, -1.0}});
  auto single = contour(one_var, direction_sweep(1, 1));
  REQUIRE(single.size() == 1);
  CHECK(std::abs(single[0].x[0]) < 1e-12);
}

TEST_CASE("contour branches and determinism") {
  auto dirs = direction_sweep(2, 90);
  auto a = contour(cubic_graph(), dirs, {}, {.workers = 1});
  auto b = contour(cubic_graph(), dirs, {}, {.workers = 4});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].branch == b[i].branch);
  }
  // gamma is many-to-one: some direction has two or more preimages.
  std::map<std::size_t, int> per_direction;
  for (const auto& p : a) ++per_direction[p.direction_index];
  int most = 0;
  for (auto [k, v] : per_direction) most = std::max(most, v);
  CHECK(most >= 2);
  for (const auto& p : a) CHECK(projective_real(log_gauss(cubic_graph(), p.z), p.direction) <= 1e-8);
}

TEST_CASE("contour contains the boundary of the rendered amoeba") {
  auto pts = contour(line(), direction_sweep(2, 720));
  Grid grid{{-3.0, -3.0}, {1.5, 1.5}, {31, 31}};
  const double h = 4.5 / 30;
  std::vector<Verdict> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = membership(line(), grid.point(i), 64).verdict;
  int boundary = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto idx = grid.unflatten(i);
    if (v[i] != Verdict::Outside) continue;
    bool flips = false;
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      std::vector<int> nb{idx[0] + di, idx[1] + dj};
      if (nb[0] < 0 || nb[1] < 0 || nb[0] >= 31 || nb[1] >= 31) continue;
      if (v[grid.flatten(nb)] == Verdict::Inside) flips = true;
    }
    if (!flips) continue;
    ++boundary;
    auto x = grid.point(i);
    double best = 1e9;
    for (const auto& p : pts) best = std::min(best, std::hypot(p.x[0] - x[0], p.x[1] - x[1]));
    CHECK(best <= 1.5 * h);
  }
  CHECK(boundary > 20);
}
