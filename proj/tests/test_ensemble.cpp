#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amoebas/ensemble.hpp"
#include "amoebas/errors.hpp"
#include "amoebas/series.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace amoebas;

namespace {

Spectrum levels(std::vector<ExponentVector> pts) { return Spectrum(std::move(pts)); }
Spectrum three() { return levels({{0}, {1}, {2}}); }
Spectrum product2d() { return levels({{0, 0}, {1, 0}, {0, 1}, {1, 1}}); }
// {0, 2, 3, 4, ...} cut after 6.
Spectrum gapped() { return levels({{0}, {2}, {3}, {4}, {5}, {6}}); }

RationalPoint r(long p, long q = 1) { return RationalPoint{Rational(p, q)}; }

// {0} + ((2,2) + S) + ((4,4) + S), S generated by (2,1) and (1,2), with a + b <= depth.
Spectrum semigroup_spectrum(long depth) {
  std::vector<ExponentVector> pts{{0, 0}};
  for (long base : {2L, 4L})
    for (long a = 0; a <= depth; ++a)
      for (long b = 0; a + b <= depth; ++b) pts.push_back({base + 2 * a + b, base + a + 2 * b});
  return Spectrum(std::move(pts), {}, {{2, 1}, {1, 2}});
}

}  // namespace

TEST_CASE("partition functions") {
  CHECK(partition_function(Spectrum::fermi()) == LaurentPolynomial(1, {{{0}, 1.0}, {{1}, 1.0}}));
  CHECK(partition_function(three()) == LaurentPolynomial(1, {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}}));
  ComplexVector one{1.0};
  CHECK(partition_function(Spectrum::fermi()).evaluate(one) == Complex(2.0));
}

TEST_CASE("truncated semigroup spectrum matches the closed form") {
  // Z = 1 + (1 + z1^2 z2^2) z1^2 z2^2 / ((1 - z1^2 z2)(1 - z1 z2^2)), as P/Q.
  const long depth = 4;
  LaurentPolynomial q(2, {{{0, 0}, 1.0}, {{2, 1}, -1.0}, {{1, 2}, -1.0}, {{3, 3}, 1.0}});
  LaurentPolynomial p = q + LaurentPolynomial(2, {{{2, 2}, 1.0}, {{4, 4}, 1.0}});
  LaurentPolynomial z = partition_function(semigroup_spectrum(depth));
  // Every exponent of degree <= 4 + 3 depth is fully represented after truncation.
  for (long a = 0; a <= 4 + 3 * depth; ++a) {
    for (long b = 0; a + b <= 4 + 3 * depth; ++b) {
      const Rational c = laurent_oracle(p, q, {0, 0}, {a, b});
      CHECK(Rational(static_cast<long>(z.coefficient({a, b}).real())) == c);
    }
  }
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(levels({}), InputError);
  CHECK_THROWS_AS(levels({{0}, {0}}), InputError);
  CHECK_THROWS_AS(levels({{0}, {1, 2}}), InputError);
  CHECK_THROWS_AS(Spectrum({{0}, {1}}, RationalPoint{Rational(1), Rational(2)}), InputError);
  CHECK(Spectrum::fermi().generates_lattice());
  CHECK_FALSE(levels({{0}, {2}}).generates_lattice());
  CHECK(product2d().generates_lattice());
  CHECK(gapped().generates_lattice());
}

TEST_CASE("mean-energy solver examples") {
  auto half = solve_mean_energy(Spectrum::fermi(), r(1, 2));
  CHECK(half.z[0] == 1.0);
  CHECK(std::abs(half.entropy - std::log(2.0)) < 1e-12);
  CHECK(std::isinf(half.temperature[0]));

  auto third = solve_mean_energy(Spectrum::fermi(), r(1, 3));
  CHECK(std::abs(third.z[0] - 0.5) < 1e-12);
  CHECK(std::abs(third.entropy - (std::log(1.5) + std::log(2.0) / 3.0)) < 1e-12);
  CHECK(std::abs(third.entropy - 0.636514) < 1e-6);
  CHECK(std::abs(third.temperature[0] - 1.442695) < 1e-6);
  CHECK(third.gradient_norm <= 1e-10);

  auto mid = solve_mean_energy(three(), r(1));
  CHECK(std::abs(mid.z[0] - 1.0) < 1e-12);
  CHECK(std::abs(mid.entropy - std::log(3.0)) < 1e-12);

  // (z + 2z^2) / (1 + z + z^2) = 3/2  <=>  z^2 - z - 3 = 0.
  auto upper = solve_mean_energy(three(), r(3, 2));
  CHECK(std::abs(upper.z[0] - (1.0 + std::sqrt(13.0)) / 2.0) < 1e-10);

  // Planck: 1/2 + z/(1-z) = 3/4 gives z = 1/5; 60 levels leave 0.2^60 behind.
  auto planck = solve_mean_energy(Spectrum::planck(60), r(3, 4));
  CHECK(std::abs(planck.z[0] - 0.2) < 1e-12);

  auto square = solve_mean_energy(product2d(), RationalPoint{Rational(1, 3), Rational(1, 2)});
  CHECK(std::abs(square.z[0] - 0.5) < 1e-12);
  CHECK(std::abs(square.z[1] - 1.0) < 1e-12);
}

TEST_CASE("mean-energy solver errors") {
  CHECK_THROWS_AS(solve_mean_energy(Spectrum::fermi(), r(3, 2)), AdmissibilityError);
  CHECK_THROWS_AS(solve_mean_energy(Spectrum::fermi(), r(-1, 1000000000)), AdmissibilityError);
  CHECK_THROWS_AS(solve_mean_energy(Spectrum::fermi(), r(1)), BoundaryError);
  CHECK_THROWS_AS(solve_mean_energy(Spectrum::fermi(), r(0)), BoundaryError);
  CHECK_THROWS_AS(solve_mean_energy(product2d(), RationalPoint{Rational(1, 2), Rational(0)}), BoundaryError);
  // Collinear levels do not span the plane.
  CHECK_THROWS_AS(solve_mean_energy(levels({{0, 0}, {1, 1}, {2, 2}}), RationalPoint{Rational(1), Rational(1)}),
                  AdmissibilityError);
  CHECK_THROWS_AS(solve_mean_energy(Spectrum::fermi(), RationalPoint{}), InputError);
  // Close to the boundary but inside: a finite solution.
  auto near = solve_mean_energy(Spectrum::fermi(), r(999, 1000));
  CHECK(std::abs(near.z[0] - 999.0) < 1e-8);
}

TEST_CASE("occupation examples") {
  auto a = occupations(Spectrum::fermi(), solve_mean_energy(Spectrum::fermi(), r(1, 2)), 10);
  CHECK(std::abs(a[0] - 5.0) < 1e-12);
  CHECK(std::abs(a[1] - 5.0) < 1e-12);
  auto b = occupations(Spectrum::fermi(), solve_mean_energy(Spectrum::fermi(), r(1, 3)), 9);
  CHECK(std::abs(b[0] - 6.0) < 1e-9);
  CHECK(std::abs(b[1] - 3.0) < 1e-9);
  auto c = occupations(three(), solve_mean_energy(three(), r(1)), 3);
  for (double v : c) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("property: occupations satisfy both constraints") {
  std::mt19937 rng(5);
  const std::vector<Spectrum> spectra{three(), gapped(), product2d(), Spectrum::planck(30)};
  for (const auto& s : spectra) {
    const auto e = s.energies();
    for (int trial = 0; trial < 20; ++trial) {
      // Random convex combination with rational weights lands inside the hull.
      std::uniform_int_distribution<long> wgt(1, 9);
      RationalPoint u(s.dimension(), Rational(0));
      Rational total = 0;
      for (const auto& pt : e) {
        const Rational w = wgt(rng);
        total += w;
        for (std::size_t j = 0; j < u.size(); ++j) u[j] += w * pt[j];
      }
      for (auto& c : u) c /= total;
      auto sol = solve_mean_energy(s, u);
      const double particles = 17.0;
      auto a = occupations(s, sol, particles);
      double count = 0.0;
      std::vector<double> energy(s.dimension(), 0.0);
      for (std::size_t k = 0; k < a.size(); ++k) {
        count += a[k];
        for (std::size_t j = 0; j < s.dimension(); ++j) energy[j] += a[k] * to_double(e[k][j]);
      }
      CHECK(std::abs(count - particles) <= 1e-9 * particles);
      for (std::size_t j = 0; j < s.dimension(); ++j) {
        CHECK(std::abs(energy[j] - particles * to_double(u[j])) <= 1e-9 * particles);
      }
    }
  }
}

TEST_CASE("property: the solution does not depend on the seed") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> seed(-3.0, 3.0);
  const RationalPoint u{Rational(2, 7), Rational(3, 5)};
  auto base = solve_mean_energy(product2d(), u);
  for (int t = 0; t < 5; ++t) {
    SolveOptions opt;
    opt.seed = RealVector{seed(rng), seed(rng)};
    auto other = solve_mean_energy(product2d(), u, opt);
    CHECK(std::abs(other.z[0] - base.z[0]) <= 1e-8);
    CHECK(std::abs(other.z[1] - base.z[1]) <= 1e-8);
    CHECK(other.gradient_norm <= 1e-10);
  }
}

TEST_CASE("entropy gradient is minus log z") {
  CHECK(entropy_gradient_check(Spectrum::fermi(), r(1, 3)) <= 1e-6);
  CHECK(entropy_gradient_check(three(), r(3, 2)) <= 1e-6);
  CHECK(entropy_gradient_check(product2d(), RationalPoint{Rational(1, 4), Rational(2, 3)}) <= 1e-6);
  CHECK(std::abs(solve_mean_energy(Spectrum::fermi(), r(1, 3)).mu[0] - std::log(2.0)) < 1e-12);
  CHECK(solve_mean_energy(three(), r(1)).mu[0] == 0.0);
}

TEST_CASE("admissible mean energies") {
  CHECK(admissible(Spectrum::fermi(), r(999, 1000)));
  CHECK_FALSE(admissible(Spectrum::fermi(), r(1)));
  CHECK(admissible(Spectrum::planck(2), r(3, 4)));
  CHECK_FALSE(admissible(Spectrum::planck(2), r(1, 2)));
  CHECK(admissible(Spectrum::planck(2), r(1000)));

  // Twin spectra: S above and S' = {0} + ((-1,-1) - S) + ((1,1) - S).
  Spectrum lower = semigroup_spectrum(0);
  Spectrum upper(std::vector<ExponentVector>{{0, 0}, {-1, -1}, {1, 1}}, {}, {{-2, -1}, {-1, -2}});
  const RationalPoint half{Rational(1, 2), Rational(1, 2)};
  CHECK(admissible(lower, half));
  CHECK(admissible(upper, half));
  const RationalPoint two{Rational(2), Rational(2)};
  CHECK(admissible(lower, two));
  CHECK_FALSE(admissible(upper, two));
  // Corner (2/3, 1/3) of the common rhombus is on both boundaries.
  CHECK_FALSE(admissible(lower, RationalPoint{Rational(2, 3), Rational(1, 3)}));
}

TEST_CASE("exact statistics examples") {
  ExactStats s = exact_stats(three(), 3, {3});
  CHECK(s.total_states == 7);
  CHECK(s.averages == std::vector<Rational>{Rational(6, 7), Rational(9, 7), Rational(6, 7)});
  CHECK(enumerate_states(three(), 3, {3}).averages == s.averages);

  ExactStats f = exact_stats(Spectrum::fermi(), 4, {2});
  CHECK(f.total_states == 6);
  CHECK(f.averages == std::vector<Rational>{Rational(2), Rational(2)});
  CHECK(enumerate_states(Spectrum::fermi(), 4, {2}).total_states == 6);

  for (std::size_t k = 0; k < gapped().size(); ++k) {
    ExactStats one = exact_stats(gapped(), 1, gapped().points()[k]);
    for (std::size_t m = 0; m < one.averages.size(); ++m) CHECK(one.averages[m] == (m == k ? 1 : 0));
  }

  CHECK_THROWS_AS(exact_stats(Spectrum::fermi(), 4, {5}), EmptyEnsembleError);
  CHECK_THROWS_AS(enumerate_states(Spectrum::fermi(), 4, {5}), EmptyEnsembleError);
  CHECK_THROWS_AS(exact_stats(Spectrum::fermi(), 4, {-1}), EmptyEnsembleError);
  CHECK_THROWS_AS(exact_stats(gapped(), 1, {1}), EmptyEnsembleError);
  CHECK_THROWS_AS(enumerate_states(three(), 13, {13}), InputError);
  CHECK_THROWS_AS(exact_stats(three(), 0, {0}), InputError);
}

TEST_CASE("property: coefficient and enumeration routes agree exactly") {
  const std::vector<Spectrum> spectra{Spectrum::fermi(), three(), gapped(), product2d(),
                                      levels({{-1, 0}, {0, 0}, {2, 1}, {0, -1}})};
  for (const auto& s : spectra) {
    const std::size_t n = s.dimension();
    ExponentVector lo(n, std::numeric_limits<long>::max()), hi(n, std::numeric_limits<long>::min());
    for (const auto& p : s.points())
      for (std::size_t j = 0; j < n; ++j) {
        lo[j] = std::min(lo[j], p[j]);
        hi[j] = std::max(hi[j], p[j]);
      }
    for (long particles = 1; particles <= 7; ++particles) {
      // Every E in the box N [lo, hi].
      ExponentVector e(n);
      for (std::size_t j = 0; j < n; ++j) e[j] = particles * lo[j];
      while (true) {
        bool empty = false;
        ExactStats a;
        try {
          a = enumerate_states(s, particles, e);
        } catch (const EmptyEnsembleError&) {
          empty = true;
        }
        if (empty) {
          CHECK_THROWS_AS(exact_stats(s, particles, e), EmptyEnsembleError);
        } else {
          ExactStats b = exact_stats(s, particles, e);
          CHECK(a.total_states == b.total_states);
          CHECK(a.averages == b.averages);
          // Both constraints hold exactly.
          Rational count = 0;
          std::vector<Rational> energy(n, Rational(0));
          for (std::size_t k = 0; k < s.size(); ++k) {
            count += b.averages[k];
            for (std::size_t j = 0; j < n; ++j) energy[j] += b.averages[k] * s.points()[k][j];
          }
          CHECK(count == particles);
          for (std::size_t j = 0; j < n; ++j) CHECK(energy[j] == e[j]);
        }
        std::size_t j = 0;
        while (j < n && ++e[j] > particles * hi[j]) {
          e[j] = particles * lo[j];
          ++j;
        }
        if (j == n) break;
      }
    }
  }
}

TEST_CASE("exact averages approach the most probable occupations") {
  for (const auto& row : occupation_comparison(Spectrum::fermi(), r(1, 2), {2, 4, 8, 12, 20}, 3)) {
    CHECK(row.relative_error == 0.0);
  }
  for (const auto& row : occupation_comparison(product2d(), RationalPoint{Rational(1, 2), Rational(1, 2)}, {10})) {
    CHECK(row.exact == Rational(5, 2));
    CHECK(std::abs(row.asymptotic - 2.5) < 1e-12);
  }
  double worst20 = 0.0;
  for (const auto& row : occupation_comparison(three(), r(1), {20})) {
    CHECK(std::abs(row.asymptotic - 20.0 / 3.0) < 1e-10);
    worst20 = std::max(worst20, row.relative_error);
  }
  CHECK(worst20 <= 0.10);

  // Errors shrink with N.
  std::vector<long> ns{8, 12, 16, 20};
  auto rows = occupation_comparison(three(), r(1), ns, 2);
  std::vector<double> worst(ns.size(), 0.0);
  for (const auto& row : rows) {
    const auto i = static_cast<std::size_t>(std::find(ns.begin(), ns.end(), row.particles) - ns.begin());
    worst[i] = std::max(worst[i], row.relative_error);
  }
  for (std::size_t i = 1; i < worst.size(); ++i) CHECK(worst[i] <= worst[i - 1]);
  // Bounded by c / N with c fitted at the smallest N.
  for (std::size_t i = 0; i < worst.size(); ++i) {
    CHECK(worst[i] <= worst[0] * static_cast<double>(ns[0]) / static_cast<double>(ns[i]) * 1.0000001);
  }

  CHECK_THROWS_AS(occupation_comparison(levels({{0}, {2}}), r(1), {4}), InputError);
  CHECK_THROWS_AS(occupation_comparison(three(), r(1, 2), {3}), InputError);
}

TEST_CASE("entropy matches the growth of the state count") {
  const double s = solve_mean_energy(three(), r(1)).entropy;
  double previous = std::numeric_limits<double>::infinity();
  for (long particles : {10L, 20L, 40L, 80L}) {
    const double per_particle = log_abs(Rational(exact_stats(three(), particles, {particles}).total_states)) /
                                static_cast<double>(particles);
    const double gap = std::abs(s - per_particle);
    CHECK(gap < previous);
    // The k^{-1/2} prefactor leaves a gap of order log N / N.
    CHECK(gap < std::log(static_cast<double>(particles)) / static_cast<double>(particles));
    previous = gap;
  }
}

TEST_CASE("common tangent of the two real branches of 1 + z^2/(1 - z)") {
  // (1 - z + z^2) / (1 - z).
  RationalPartition z(UnivariatePolynomial({1.0, -1.0, 1.0}), UnivariatePolynomial({1.0, -1.0}));
  const double eps = 1e-9;
  CommonTangent t = common_tangent(z, -30.0, std::log1p(-eps), std::log1p(eps), 30.0, 0.05, 0.95);
  CHECK(std::abs(t.slope - 0.5) <= 1e-6);
  CHECK(t.z_first < 1.0);
  CHECK(t.z_second > 1.0);
  // Z(1/z) = -Z(z)/z pairs the branches: the tangent points are reciprocal.
  CHECK(std::abs(t.z_first * t.z_second - 1.0) < 1e-8);
  CHECK(std::abs(z.tangent(t.z_second).intercept - t.intercept) < 1e-9);
}

TEST_CASE("property: the branch symmetry of 1 + z^2/(1 - z)") {
  RationalPartition z(UnivariatePolynomial({1.0, -1.0, 1.0}), UnivariatePolynomial({1.0, -1.0}));
  for (double zz : {0.05, 0.3, 0.5, 0.9, 0.99}) {
    auto inner = z.tangent(zz);
    auto outer = z.tangent(1.0 / zz);
    CHECK(std::abs(inner.slope + outer.slope - 1.0) < 1e-9);
    CHECK(std::abs(inner.intercept - outer.intercept) < 1e-9);
  }
  // The inner branch solves back to its own tangent point.
  CHECK(std::abs(z.solve_branch(z.tangent(0.3).slope, -30.0, -1e-9) - 0.3) < 1e-12);
  CHECK_THROWS_AS(z.solve_branch(-1.0, -30.0, -1e-9), NumericalError);
}

TEST_CASE("property: random interior mean energies converge from far seeds") {
  // Once the predicted decrease drops below the rounding of the objective the
  // line search must still make progress; u = 191/1000 used to stall there.
  const Spectrum three(std::vector<ExponentVector>{{0}, {1}, {2}});
  CHECK(solve_mean_energy(three, {Rational(191, 1000)}).gradient_norm <= 1e-10);
  const Spectrum square(std::vector<ExponentVector>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> numer(1, 999);
  std::normal_distribution<double> seed(0.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const RationalPoint u{Rational(numer(rng), 1000), Rational(numer(rng), 1000)};
    const EnsembleSolution base = solve_mean_energy(square, u);
    CHECK(base.gradient_norm <= 1e-10);
    const EnsembleSolution far = solve_mean_energy(square, u, {.seed = RealVector{seed(rng), seed(rng)}});
    // Product spectrum: z_j = u_j / (1 - u_j) exactly. A gradient of 1e-10
    // leaves a relative error of about 1e-10 / (u_j (1 - u_j)) in z_j.
    for (std::size_t j = 0; j < 2; ++j) {
      const double uj = to_double(u[j]);
      CHECK(far.z[j] == doctest::Approx(uj / (1.0 - uj)).epsilon(1e-7));
    }
  }
}
