// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "amoebas/amoeba.hpp"
#include "amoebas/asymptotics.hpp"
#include "amoebas/ensemble.hpp"
#include "amoebas/errors.hpp"
#include "amoebas/gauss.hpp"
#include "amoebas/parallel.hpp"
#include "amoebas/polytope.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace amoebas;

namespace {

LaurentPolynomial four_term() {
  return LaurentPolynomial(2, {{{2, 1}, 1.0}, {{1, 1}, -4.0}, {{1, 2}, 1.0}, {{0, 0}, 1.0}});
}

LaurentPolynomial line() { return LaurentPolynomial(2, {{{0, 0}, 1.0}, {{1, 0}, -1.0}, {{0, 1}, -1.0}}); }

// w = 1 - 2z - 3z^2 as the curve w - f(z).
LaurentPolynomial cubic_graph() {
  return LaurentPolynomial(2, {{{0, 1}, 1.0}, {{0, 0}, -1.0}, {{1, 0}, 2.0}, {{2, 0}, 3.0}});
}

std::string format_order(const ExponentVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Criterion = std::function<void(Outcome&)>;

bool run(int id, const char* title, double budget_seconds, const Criterion& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && seconds > budget_seconds) {
    o.pass = false;
    o.detail << " [over budget " << budget_seconds << " s]";
  }
  std::printf("%s %d %s (%.2f s):%s\n", o.pass ? "PASS" : "FAIL", id, title, seconds, o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

void newton_polytope_and_vertex_components(Outcome& o) {
  const auto q = four_term();
  const Polyhedron hull = newton_polytope(q);
  std::set<RationalPoint> vertices(hull.vertices().begin(), hull.vertices().end());
  const std::set<RationalPoint> expected{to_rational_point({0, 0}), to_rational_point({2, 1}), to_rational_point({1, 2})};
  o.require(vertices == expected, "hull vertices");
  o.detail << " vertices=" << vertices.size();

  std::set<ExponentVector> verified;
  for (const auto& c : vertex_components(q)) {
    if (c.verified && c.observed && *c.observed == c.vertex) verified.insert(c.vertex);
  }
  o.require(verified == std::set<ExponentVector>{{0, 0}, {2, 1}, {1, 2}}, "vertex components verified");
  o.detail << " verified_vertices=" << verified.size();

  const Grid grid{{-6.0, -6.0}, {6.0, 6.0}, {60, 60}};
  const ComponentReport report = detect_components(q, grid, 64, 1e-6, default_workers());
  bool bounded_11 = false;
  for (const auto& c : report.components) bounded_11 |= c.bounded && c.order == ExponentVector{1, 1};
  o.require(bounded_11, "bounded component of order (1,1)");
  o.detail << " components=" << report.components.size() << " bounded(1,1)=" << (bounded_11 ? "yes" : "no");
}

void order_injective_and_constant(Outcome& o) {
  const auto q = four_term();
  const Grid grid{{-6.0, -6.0}, {6.0, 6.0}, {60, 60}};
  const ComponentReport report = detect_components(q, grid, 64, 1e-6, default_workers());
  std::map<ExponentVector, int> seen;
  for (const auto& c : report.components) ++seen[c.order];
  bool injective = true;
  for (const auto& [order, count] : seen) injective &= count == 1;
  o.require(injective, "two components share an order");

  // Recompute the order at every cell independently of the flood fill.
  std::size_t cells = 0, mismatched = 0;
  for (const auto& c : report.components) {
    for (std::size_t cell : c.cells) {
      ++cells;
      if (order(q, grid.point(cell), 64) != c.order) ++mismatched;
    }
  }
  o.require(mismatched == 0, "order not constant on a component");
  o.detail << " components=" << report.components.size() << " orders=";
  for (const auto& [order, count] : seen) o.detail << format_order(order);
  o.detail << " cells_checked=" << cells << " mismatched=" << mismatched;
}

void central_binomial_benchmark(Outcome& o) {
  const LaurentPolynomial one = LaurentPolynomial::constant(2, 1.0);
  std::vector<long> ks{10, 20, 30, 40, 50, 60, 70, 80};
  const Comparison c = compare(one, line(), {1, 1}, ks);
  const auto& saddle = c.estimate.saddle;
  o.require(std::abs(saddle[0] - 0.5) <= 1e-8 && std::abs(saddle[1] - 0.5) <= 1e-8, "saddle (1/2,1/2)");
  double at50 = NAN;
  bool oracle_ok = true;
  for (const auto& row : c.rows) {
    // Independent oracle: binomial(2k, k) in floating point against the exact series value.
    const double binom = boost::math::binomial_coefficient<double>(2 * row.k, row.k);
    oracle_ok &= std::abs(static_cast<double>(row.exact) / binom - 1.0) <= 1e-12;
    if (row.k == 50) at50 = std::abs(row.ratio - 1.0);
  }
  const double slope = error_slope(c.rows);
  o.require(oracle_ok, "exact coefficients equal binomial(2k,k)");
  o.require(at50 <= 0.013, "|ratio - 1| <= 0.013 at k = 50");
  o.require(std::abs(slope + 1.0) <= 0.15, "error slope -1 +- 0.15");
  o.detail << " |ratio-1|@50=" << at50 << " slope=" << slope;
}

void gauss_round_trip(Outcome& o) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (const auto& [name, q] : {std::pair{"line", line()}, std::pair{"cubic", cubic_graph()}}) {
    const auto seeds = default_seeds(q);
    int solved = 0;
    double worst_projective = 0.0, worst_tangential = 0.0;
    for (int t = 0; t < 100; ++t) {
      const double a = angle(rng);
      const std::vector<double> dir{std::cos(a), std::sin(a)};
      for (const auto& s : seeds) {
        try {
          const CriticalPoint cp = inverse_gauss(q, dir, s);
          ComplexVector target(dir.begin(), dir.end());
          worst_projective = std::max(worst_projective, projective_distance(log_gauss(q, cp.z).coords, target));
          worst_tangential = std::max(worst_tangential, tangential_residual(q, dir, cp.z));
          ++solved;
          break;
        } catch (const NumericalError&) {
        }
      }
    }
    o.require(solved == 100, std::string(name) + ": every direction solved");
    o.require(worst_projective <= 1e-8, std::string(name) + ": projective round trip");
    o.require(worst_tangential <= 1e-8, std::string(name) + ": tangential residual");
    o.detail << ' ' << name << ": solved=" << solved << " round_trip=" << worst_projective
             << " tangential=" << worst_tangential;
  }
}

void darwin_fowler_oracles(Outcome& o) {
  const std::vector<std::pair<std::string, Spectrum>> spectra{
      {"{0,1}", Spectrum::fermi()},
      {"{0,1,2}", Spectrum(std::vector<ExponentVector>{{0}, {1}, {2}})},
      {"{0,2,...,6}", Spectrum(std::vector<ExponentVector>{{0}, {2}, {3}, {4}, {5}, {6}})},
      {"square", Spectrum(std::vector<ExponentVector>{{0, 0}, {1, 0}, {0, 1}, {1, 1}})},
  };
  std::size_t instances = 0, mismatches = 0;
  for (const auto& [name, s] : spectra) {
    long top = 0;
    for (const auto& p : s.points())
      for (long c : p) top = std::max(top, c);
    for (long n = 1; n <= 10; ++n) {
      const long box = n * top;
      std::vector<ExponentVector> energies;
      if (s.dimension() == 1) {
        for (long e = 0; e <= box; ++e) energies.push_back({e});
      } else {
        for (long e1 = 0; e1 <= box; ++e1)
          for (long e2 = 0; e2 <= box; ++e2) energies.push_back({e1, e2});
      }
      for (const auto& e : energies) {
        std::optional<ExactStats> series, listed;
        try {
          series = exact_stats(s, n, e);
        } catch (const EmptyEnsembleError&) {
        }
        try {
          listed = enumerate_states(s, n, e);
        } catch (const EmptyEnsembleError&) {
        }
        if (!series && !listed) continue;
        ++instances;
        if (!series || !listed || series->total_states != listed->total_states ||
            series->averages != listed->averages) {
          ++mismatches;
        }
      }
    }
  }
  o.require(mismatches == 0, "series and enumeration agree");
  const ExactStats three = exact_stats(Spectrum(std::vector<ExponentVector>{{0}, {1}, {2}}), 3, {3});
  o.require(three.total_states == 7, "total 7");
  o.require(three.averages == std::vector<Rational>{Rational(6, 7), Rational(9, 7), Rational(6, 7)}, "averages");
  o.detail << " reachable_instances=" << instances << " mismatches=" << mismatches
           << " {0,1,2},N=3,E=3: total=" << three.total_states << " averages=" << to_string(three.averages[0]) << ','
           << to_string(three.averages[1]) << ',' << to_string(three.averages[2]);
}

void occupation_convergence(Outcome& o) {
  const Spectrum three(std::vector<ExponentVector>{{0}, {1}, {2}});
  const std::vector<long> ns{6, 9, 12, 15, 18};
  const auto rows = occupation_comparison(three, {Rational(1)}, ns, default_workers());
  std::map<long, double> worst;
  for (const auto& r : rows) worst[r.particles] = std::max(worst[r.particles], r.relative_error);
  bool decreasing = true;
  for (std::size_t i = 1; i < ns.size(); ++i) decreasing &= worst[ns[i]] < worst[ns[i - 1]];
  std::vector<double> xs, ys;
  for (long n : ns) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(worst[n]);
  }
  const double exponent = loglog_slope(xs, ys);
  o.require(worst[12] <= 0.12, "error at N = 12 <= 0.12");
  o.require(decreasing, "error decreases with N");
  o.require(exponent <= -0.8, "fit exponent <= -0.8");

  std::vector<long> even;
  for (long n = 2; n <= 20; n += 2) even.push_back(n);
  double fermi_worst = 0.0;
  for (const auto& r : occupation_comparison(Spectrum::fermi(), {Rational(1, 2)}, even, default_workers())) {
    fermi_worst = std::max(fermi_worst, r.relative_error);
  }
  o.require(fermi_worst == 0.0, "Fermi error exactly 0 at even N");
  o.detail << " err@12=" << worst[12] << " errors=";
  for (long n : ns) o.detail << worst[n] << (n == ns.back() ? "" : ",");
  o.detail << " exponent=" << exponent << " fermi_even_max=" << fermi_worst;
}

void admissibility_and_solver(Outcome& o) {
  const std::vector<std::pair<std::string, Spectrum>> spectra{
      {"{0,1,2}", Spectrum(std::vector<ExponentVector>{{0}, {1}, {2}})},
      {"square", Spectrum(std::vector<ExponentVector>{{0, 0}, {1, 0}, {0, 1}, {1, 1}})},
      {"triangle+centre", Spectrum(std::vector<ExponentVector>{{0, 0}, {2, 1}, {1, 2}, {1, 1}})},
  };
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> numer(0, 2000);
  const long denom = 1000;
  int solved = 0, unique = 0, attempted = 0;
  double worst_gradient = 0.0;
  for (const auto& [name, s] : spectra) {
    int accepted = 0;
    while (accepted < 50) {
      RationalPoint u;
      for (std::size_t j = 0; j < s.dimension(); ++j) u.push_back(Rational(numer(rng), denom));
      if (!admissible(s, u)) continue;
      ++accepted;
      ++attempted;
      const EnsembleSolution base = solve_mean_energy(s, u);
      worst_gradient = std::max(worst_gradient, base.gradient_norm);
      if (base.gradient_norm <= 1e-10) ++solved;
      std::normal_distribution<double> seed_dist(0.0, 3.0);
      bool same = true;
      for (int restart = 0; restart < 5; ++restart) {
        RealVector seed(s.dimension());
        for (auto& v : seed) v = seed_dist(rng);
        const EnsembleSolution again = solve_mean_energy(s, u, {.seed = seed});
        for (std::size_t j = 0; j < s.dimension(); ++j) same &= std::abs(again.z[j] - base.z[j]) <= 1e-8 * std::max(1.0, base.z[j]);
      }
      if (same) ++unique;
    }
  }
  o.require(solved == attempted, "gradient norm <= 1e-10");
  o.require(unique == attempted, "unique across 5 seeds");
  o.detail << " interior: solved=" << solved << '/' << attempted << " unique=" << unique
           << " max_grad=" << worst_gradient;

  // Outside the closed hull: rejected by the gate, before any iteration.
  int rejected = 0;
  const std::vector<std::pair<Spectrum, RationalPoint>> outside{
      {spectra[0].second, {Rational(-1, 1000)}},
      {spectra[0].second, {Rational(2001, 1000)}},
      {spectra[1].second, {Rational(1, 2), Rational(1001, 1000)}},
      {spectra[2].second, {Rational(1), Rational(0)}},
  };
  for (const auto& [s, u] : outside) {
    try {
      solve_mean_energy(s, u);
    } catch (const AdmissibilityError&) {
      ++rejected;
    }
  }
  o.require(rejected == static_cast<int>(outside.size()), "outside u rejected by the gate");

  // On the boundary the minimum runs off to infinity; the escape is reported.
  // At distance 1e-3 inside the minimizer is finite (|x| ~ log 1e3), so the
  // solver must converge there instead.
  int escapes = 0;
  const std::vector<std::pair<Spectrum, RationalPoint>> boundary{
      {spectra[0].second, {Rational(0)}},
      {spectra[0].second, {Rational(2)}},
      {spectra[1].second, {Rational(1, 2), Rational(1)}},
      {spectra[1].second, {Rational(0), Rational(0)}},
      {spectra[2].second, {Rational(3, 2), Rational(3, 2)}},
  };
  for (const auto& [s, u] : boundary) {
    try {
      solve_mean_energy(s, u);
    } catch (const BoundaryError&) {
      ++escapes;
    }
  }
  o.require(escapes == static_cast<int>(boundary.size()), "boundary escape detected");
  int near_ok = 0;
  const std::vector<std::pair<Spectrum, RationalPoint>> near{
      {spectra[0].second, {Rational(1, 1000)}},
      {spectra[0].second, {Rational(1999, 1000)}},
      {spectra[1].second, {Rational(1, 2), Rational(999, 1000)}},
  };
  for (const auto& [s, u] : near) {
    const EnsembleSolution sol = solve_mean_energy(s, u);
    if (sol.gradient_norm <= 1e-10) ++near_ok;
  }
  o.require(near_ok == static_cast<int>(near.size()), "near-boundary interior points converge");

  const double fermi_dev = entropy_gradient_check(Spectrum::fermi(), {Rational(1, 3)}, 1e-4);
  const double three_dev = entropy_gradient_check(spectra[0].second, {Rational(3, 2)}, 1e-4);
  o.require(std::max(fermi_dev, three_dev) <= 1e-6, "entropy gradient check");
  o.detail << " outside_rejected=" << rejected << '/' << outside.size() << " boundary_escapes=" << escapes << '/'
           << boundary.size() << " near_boundary_converged=" << near_ok << '/' << near.size()
           << " entropy_grad_dev=" << std::max(fermi_dev, three_dev);
}

void example_one_tangency(Outcome& o) {
  // Z = 1 + z^2/(1 - z) = (1 - z + z^2)/(1 - z).
  const RationalPartition z(UnivariatePolynomial({1.0, -1.0, 1.0}), UnivariatePolynomial({1.0, -1.0}));
  const double eps = 1e-9;
  const CommonTangent t = common_tangent(z, -30.0, std::log1p(-eps), std::log1p(eps), 30.0, 0.05, 0.95);
  o.require(std::abs(t.slope - 0.5) <= 1e-6, "u0 = 1/2 +- 1e-6");
  o.require(t.z_first < 1.0 && t.z_second > 1.0, "one tangent point per branch");
  o.detail << " u0=" << t.slope << " intercept=" << t.intercept << " z=(" << t.z_first << ", " << t.z_second << ")";
}

void fermi_planck_domains(Outcome& o) {
  const Rational d(1, 1000000000);
  const Spectrum fermi = Spectrum::fermi();
  const Spectrum planck = Spectrum::planck(40);
  struct Probe {
    const Spectrum* s;
    Rational u;
    bool expected;
  };
  const std::vector<Probe> probes{
      {&fermi, -d, false},          {&fermi, Rational(0), false}, {&fermi, d, true},
      {&fermi, 1 - d, true},        {&fermi, Rational(1), false}, {&fermi, 1 + d, false},
      {&planck, Rational(1, 2) - d, false}, {&planck, Rational(1, 2), false}, {&planck, Rational(1, 2) + d, true},
      {&planck, Rational(1000000000), true},
  };
  int right = 0;
  for (const auto& p : probes) right += admissible(*p.s, {p.u}) == p.expected;
  o.require(right == static_cast<int>(probes.size()), "every probe classified");
  o.detail << " probes=" << right << '/' << probes.size();
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "Newton polytope and vertex components", 10.0, newton_polytope_and_vertex_components);
  ok &= run(2, "order injective and constant on 60x60 grid", 60.0, order_injective_and_constant);
  ok &= run(3, "central binomial asymptotics", 30.0, central_binomial_benchmark);
  ok &= run(4, "logarithmic Gauss round trip", 0.0, gauss_round_trip);
  ok &= run(5, "exact ensemble oracles agree", 30.0, darwin_fowler_oracles);
  ok &= run(6, "occupation convergence", 0.0, occupation_convergence);
  ok &= run(7, "admissibility gate and convex solver", 0.0, admissibility_and_solver);
  ok &= run(8, "common tangent of the two branches", 10.0, example_one_tangency);
  ok &= run(9, "Fermi and Planck domains", 0.0, fermi_planck_domains);
  return ok ? 0 : 1;
}
