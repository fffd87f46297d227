#include "amoebas/amoeba.hpp"

#include "amoebas/errors.hpp"
#include "amoebas/parallel.hpp"
#include "amoebas/polytope.hpp"
#include "amoebas/univariate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace amoebas {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct FiberSample {
  bool degenerate = false;
  long count = 0;
  double delta = std::numeric_limits<double>::infinity();
  Complex closest_root{0.0};
};

ComplexVector other_coordinates(std::span<const double> x, std::size_t axis, std::span<const double> phases) {
  ComplexVector w;
  w.reserve(phases.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == axis) continue;
    w.push_back(std::exp(Complex(x[j], phases[k++])));
  }
  return w;
}

ComplexVector assemble(std::span<const Complex> others, std::size_t axis, Complex value) {
  ComplexVector z(others.begin(), others.end());
  z.insert(z.begin() + static_cast<std::ptrdiff_t>(axis), value);
  return z;
}

FiberSample sample_fiber(const LaurentPolynomial& q, std::size_t axis, std::span<const double> x,
                         std::span<const double> phases) {
  FiberSample s;
  Fiber f;
  try {
    f = fiber(q, axis, other_coordinates(x, axis, phases));
  } catch (const DegenerateFiberError&) {
    s.degenerate = true;
    return s;
  }
  s.count = static_cast<long>(f.poly.zero_root_multiplicity()) - f.cleared;
  for (const auto& r : f.torus_roots()) {
    const double lr = std::log(std::abs(r));
    if (lr < x[axis]) ++s.count;
    const double d = std::abs(lr - x[axis]);
    if (d < s.delta) {
      s.delta = d;
      s.closest_root = r;
    }
  }
  return s;
}

/// Phases of the k-th sample on a grid with m points per axis over `dims` axes.
std::vector<double> grid_phases(std::size_t k, std::size_t dims, int m) {
  std::vector<double> phases(dims);
  for (std::size_t d = dims; d-- > 0;) {
    phases[d] = two_pi * static_cast<double>(k % static_cast<std::size_t>(m)) / m;
    k /= static_cast<std::size_t>(m);
  }
  return phases;
}

std::size_t grid_count(std::size_t dims, int m) {
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::size_t>(m);
  return total;
}

double relative_residual(const LaurentPolynomial& q, std::span<const Complex> z) {
  const double scale = q.abs_scale(z);
  return scale == 0.0 ? 0.0 : std::abs(q.evaluate(z)) / scale;
}

double log_distance(std::span<const Complex> z, std::span<const double> x) {
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, std::abs(std::log(std::abs(z[j])) - x[j]));
  return d;
}

/// Puts z on the torus Log^{-1}(x) and runs Gauss-Newton on the phases
/// (least-norm steps for the 2 x n real system Q = 0), keeping only improvements.
ComplexVector refine_on_torus(const LaurentPolynomial& q, std::span<const double> x, ComplexVector z) {
  const std::size_t n = x.size();
  std::vector<LaurentPolynomial> euler;
  for (std::size_t j = 0; j < n; ++j) euler.push_back(q.euler(j));

  Eigen::VectorXd theta(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) theta[static_cast<Eigen::Index>(j)] = std::arg(z[j]);
  auto at = [&](const Eigen::VectorXd& t) {
    ComplexVector w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(Complex(x[j], t[static_cast<Eigen::Index>(j)]));
    return w;
  };

  ComplexVector w = at(theta);
  double res = relative_residual(q, w);
  for (int it = 0; it < 8 && res > 1e-15; ++it) {
    Complex value = q.evaluate(w);
    Eigen::MatrixXd jac(2, static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      // d/dtheta_j of Q(e^{x + i theta}) = i z_j dQ/dz_j
      Complex d = Complex(0.0, 1.0) * euler[j].evaluate(w);
      jac(0, static_cast<Eigen::Index>(j)) = d.real();
      jac(1, static_cast<Eigen::Index>(j)) = d.imag();
    }
    Eigen::Vector2d rhs(-value.real(), -value.imag());
    Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd next = theta + step;
    ComplexVector cand = at(next);
    double r = relative_residual(q, cand);
    if (!(r < res)) break;
    theta = next;
    w = std::move(cand);
    res = r;
  }
  return w;
}

/// Chooses between the raw fiber point and its torus projection.
std::optional<ComplexVector> make_witness(const LaurentPolynomial& q, std::span<const double> x, ComplexVector raw,
                                          double tol) {
  ComplexVector refined = refine_on_torus(q, x, raw);
  std::optional<ComplexVector> best;
  double best_res = std::numeric_limits<double>::infinity();
  for (auto* cand : {&refined, &raw}) {
    double r = relative_residual(q, *cand);
    if (r <= tol && log_distance(*cand, x) <= tol && r < best_res) {
      best = *cand;
      best_res = r;
    }
  }
  return best;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Outside:
      return "outside";
    case Verdict::Inside:
      return "inside";
    case Verdict::Uncertain:
      return "uncertain";
  }
  return "?";
}

std::size_t fiber_axis(const LaurentPolynomial& q) {
  std::size_t best = 0;
  long spread = -1;
  for (std::size_t j = 0; j < q.dimension(); ++j) {
    auto [lo, hi] = q.exponent_range(j);
    if (hi - lo > spread) {
      spread = hi - lo;
      best = j;
    }
  }
  return best;
}

Membership membership(const LaurentPolynomial& q, std::span<const double> x, int phase_samples, double tol) {
  const std::size_t n = q.dimension();
  if (x.size() != n) throw InputError("membership: point has wrong dimension");
  if (phase_samples < 8) throw InputError("membership: need at least 8 phase samples");
  if (!(tol > 0.0)) throw InputError("membership: tolerance must be positive");
  if (q.is_zero()) throw InputError("membership: zero polynomial");

  Membership out;
  out.axis = fiber_axis(q);
  const std::size_t dims = n - 1;
  const std::size_t total = grid_count(dims, phase_samples);

  std::vector<FiberSample> samples(total);
  std::size_t usable = 0, best = total;
  for (std::size_t k = 0; k < total; ++k) {
    samples[k] = sample_fiber(q, out.axis, x, grid_phases(k, dims, phase_samples));
    if (samples[k].degenerate) continue;
    ++usable;
    if (best == total || samples[k].delta < samples[best].delta) best = k;
  }
  if (usable == 0) throw DegenerateFiberError("membership: every sampled fiber is degenerate");
  out.distance = samples[best].delta;

  auto witness_at = [&](const std::vector<double>& phases, Complex root) {
    return assemble(other_coordinates(x, out.axis, phases), out.axis, root);
  };

  if (out.distance <= tol) {
    out.verdict = Verdict::Inside;
    out.witness = make_witness(q, x, witness_at(grid_phases(best, dims, phase_samples), samples[best].closest_root),
                               tol);
    if (!out.witness) out.verdict = Verdict::Uncertain;
    return out;
  }

  // Look for neighbouring samples (one phase step apart, cyclically) whose counts differ.
  for (std::size_t k = 0; k < total; ++k) {
    if (samples[k].degenerate) continue;
    std::vector<double> base = grid_phases(k, dims, phase_samples);
    std::size_t stride = 1;
    for (std::size_t d = dims; d-- > 0; stride *= static_cast<std::size_t>(phase_samples)) {
      const std::size_t digit = (k / stride) % static_cast<std::size_t>(phase_samples);
      const std::size_t nb = digit + 1 == static_cast<std::size_t>(phase_samples) ? k - digit * stride : k + stride;
      if (samples[nb].degenerate || samples[nb].count == samples[k].count) continue;

      // A root crossed the circle between the two phases: bisect the count.
      double lo = 0.0, hi = two_pi / phase_samples;
      const long count_lo = samples[k].count;
      auto phases_at = [&](double t) {
        auto p = base;
        p[d] += t;
        return p;
      };
      FiberSample s_lo = samples[k], s_hi = samples[nb];
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        FiberSample s = sample_fiber(q, out.axis, x, phases_at(mid));
        if (s.degenerate) break;
        if (s.count == count_lo) {
          lo = mid;
          s_lo = s;
        } else {
          hi = mid;
          s_hi = s;
        }
      }
      const bool use_lo = s_lo.delta <= s_hi.delta;
      const FiberSample& s = use_lo ? s_lo : s_hi;
      out.distance = s.delta;
      out.witness = make_witness(q, x, witness_at(phases_at(use_lo ? lo : hi), s.closest_root), tol);
      out.verdict = out.witness ? Verdict::Inside : Verdict::Uncertain;
      return out;
    }
  }

  out.verdict = Verdict::Outside;
  return out;
}

ExponentVector order(const LaurentPolynomial& q, std::span<const double> x, int phase_samples) {
  const std::size_t n = q.dimension();
  if (x.size() != n) throw InputError("order: point has wrong dimension");
  if (phase_samples < 8) throw InputError("order: need at least 8 phase samples");
  if (q.is_zero()) throw InputError("order: zero polynomial");

  ExponentVector nu(n);
  const std::size_t dims = n - 1;
  const std::size_t total = grid_count(dims, phase_samples);
  for (std::size_t axis = 0; axis < n; ++axis) {
    std::optional<long> count;
    for (std::size_t k = 0; k < total; ++k) {
      FiberSample s = sample_fiber(q, axis, x, grid_phases(k, dims, phase_samples));
      if (s.degenerate) continue;
      if (count && *count != s.count) {
        throw NearAmoebaError("order: point inside or too near the amoeba (winding along axis " +
                              std::to_string(axis) + " takes values " + std::to_string(*count) + " and " +
                              std::to_string(s.count) + ")");
      }
      count = s.count;
    }
    if (!count) throw DegenerateFiberError("order: every sampled fiber is degenerate");
    nu[axis] = *count;
  }
  return nu;
}

double default_probe_depth(const LaurentPolynomial& q) { return 5.0 + newton_polytope(q).vertex_diameter(); }

std::vector<VertexComponent> vertex_components(const LaurentPolynomial& q, std::optional<double> depth,
                                               int phase_samples) {
  if (q.is_zero()) throw InputError("vertex_components: zero polynomial");
  const Polyhedron poly = newton_polytope(q);
  const double d = depth.value_or(5.0 + poly.vertex_diameter());
  if (!(d > 0.0)) throw InputError("vertex_components: depth must be positive");

  std::vector<VertexComponent> out;
  for (const auto& v : poly.vertices()) {
    VertexComponent c;
    for (const auto& coord : v) c.vertex.push_back(static_cast<long>(boost::multiprecision::numerator(coord)));

    std::vector<double> s = to_double(poly.dual_cone_at(v).interior_direction());
    double norm = 0.0;
    for (double t : s) norm += t * t;
    norm = std::sqrt(norm);
    c.representative.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) c.representative[j] = norm > 0.0 ? d * s[j] / norm : 0.0;

    try {
      c.observed = order(q, c.representative, phase_samples);
      c.verified = *c.observed == c.vertex;
    } catch (const NearAmoebaError&) {
      c.verified = false;
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t Grid::size() const {
  std::size_t total = 1;
  for (int s : steps) total *= static_cast<std::size_t>(s);
  return total;
}

void Grid::validate() const {
  if (lo.empty() || lo.size() != hi.size() || lo.size() != steps.size()) {
    throw InputError("grid: inconsistent dimensions");
  }
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (steps[j] < 2) throw InputError("grid: need at least 2 steps per axis");
    if (!(lo[j] < hi[j])) throw InputError("grid: empty range");
  }
}

std::vector<int> Grid::unflatten(std::size_t flat) const {
  std::vector<int> idx(steps.size());
  for (std::size_t j = steps.size(); j-- > 0;) {
    idx[j] = static_cast<int>(flat % static_cast<std::size_t>(steps[j]));
    flat /= static_cast<std::size_t>(steps[j]);
  }
  return idx;
}

std::size_t Grid::flatten(std::span<const int> index) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < steps.size(); ++j) flat = flat * static_cast<std::size_t>(steps[j]) + static_cast<std::size_t>(index[j]);
  return flat;
}

std::vector<double> Grid::point(std::size_t flat) const {
  auto idx = unflatten(flat);
  std::vector<double> x(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    x[j] = lo[j] + (hi[j] - lo[j]) * idx[j] / (steps[j] - 1);
  }
  return x;
}

ComponentReport detect_components(const LaurentPolynomial& q, const Grid& grid, int phase_samples, double tol,
                                  unsigned workers) {
  grid.validate();
  if (grid.dimension() != q.dimension()) throw InputError("detect_components: grid has wrong dimension");

  struct Cell {
    Verdict verdict;
    double distance;
    ExponentVector order;
  };
  const std::size_t total = grid.size();
  auto cells = parallel_map(total, workers, [&](std::size_t i) {
    auto x = grid.point(i);
    Membership m = membership(q, x, phase_samples, tol);
    Cell c{m.verdict, m.distance, {}};
    if (m.verdict == Verdict::Outside) {
      try {
        c.order = order(q, x, phase_samples);
      } catch (const NearAmoebaError&) {
        c.verdict = Verdict::Uncertain;
      }
    }
    return c;
  });

  ComponentReport report;
  report.grid = grid;
  report.labels.assign(total, -1);
  for (const auto& c : cells) {
    if (c.verdict == Verdict::Inside) ++report.inside_cells;
    if (c.verdict == Verdict::Uncertain) ++report.uncertain_cells;
  }

  const std::size_t n = grid.dimension();
  std::size_t neighbour_count = 1;
  for (std::size_t j = 0; j < n; ++j) neighbour_count *= 3;

  auto for_each_neighbour = [&](std::size_t flat, auto&& f) {
    const auto idx = grid.unflatten(flat);
    std::vector<int> nb(n);
    for (std::size_t code = 0; code < neighbour_count; ++code) {
      std::size_t c = code;
      bool self = true, inside = true;
      for (std::size_t j = 0; j < n; ++j) {
        const int off = static_cast<int>(c % 3) - 1;
        c /= 3;
        if (off != 0) self = false;
        nb[j] = idx[j] + off;
        if (nb[j] < 0 || nb[j] >= grid.steps[j]) inside = false;
      }
      if (!self && inside) f(grid.flatten(nb));
    }
  };

  for (std::size_t start = 0; start < total; ++start) {
    if (cells[start].verdict != Verdict::Outside || report.labels[start] >= 0) continue;
    const long label = static_cast<long>(report.components.size());
    ComplementComponent comp;
    comp.order = cells[start].order;
    comp.bounded = true;
    std::deque<std::size_t> queue{start};
    report.labels[start] = label;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      comp.cells.push_back(cur);
      const auto idx = grid.unflatten(cur);
      for (std::size_t j = 0; j < n; ++j) {
        if (idx[j] == 0 || idx[j] == grid.steps[j] - 1) comp.bounded = false;
      }
      for_each_neighbour(cur, [&](std::size_t nb) {
        if (cells[nb].verdict != Verdict::Outside || report.labels[nb] >= 0) return;
        if (cells[nb].order != comp.order) return;
        report.labels[nb] = label;
        queue.push_back(nb);
      });
    }
    std::sort(comp.cells.begin(), comp.cells.end());
    std::size_t rep = comp.cells.front();
    for (std::size_t c : comp.cells) {
      if (cells[c].distance > cells[rep].distance) rep = c;
    }
    comp.representative = grid.point(rep);
    report.components.push_back(std::move(comp));
  }

  for (std::size_t i = 0; i < total; ++i) {
    if (cells[i].verdict != Verdict::Outside) continue;
    for_each_neighbour(i, [&](std::size_t nb) {
      if (nb > i && cells[nb].verdict == Verdict::Outside && cells[nb].order != cells[i].order) ++report.order_jumps;
    });
  }
  return report;
}

PointCloud render2d(const LaurentPolynomial& q, double x1_lo, double x1_hi, int x1_steps, int phase_steps,
                    unsigned workers) {
  if (q.dimension() != 2) throw InputError("render2d: polynomial must have 2 variables");
  if (x1_steps < 2 || phase_steps < 2) throw InputError("render2d: need at least 2 steps");
  if (!(x1_lo < x1_hi)) throw InputError("render2d: empty x1 range");

  struct Row {
    std::vector<std::array<double, 2>> points;
    std::size_t degenerate = 0;
  };
  const std::size_t total = static_cast<std::size_t>(x1_steps) * static_cast<std::size_t>(phase_steps);
  auto rows = parallel_map(total, workers, [&](std::size_t k) {
    const std::size_t i = k / static_cast<std::size_t>(phase_steps);
    const std::size_t t = k % static_cast<std::size_t>(phase_steps);
    const double x1 = x1_lo + (x1_hi - x1_lo) * static_cast<double>(i) / (x1_steps - 1);
    const double theta = two_pi * static_cast<double>(t) / phase_steps;
    Row row;
    const Complex z1 = std::exp(Complex(x1, theta));
    try {
      Fiber f = fiber(q, 1, std::span<const Complex>(&z1, 1));
      for (const auto& r : f.torus_roots()) row.points.push_back({x1, std::log(std::abs(r))});
    } catch (const DegenerateFiberError&) {
      row.degenerate = 1;
    }
    return row;
  });

  PointCloud cloud;
  for (auto& row : rows) {
    cloud.points.insert(cloud.points.end(), row.points.begin(), row.points.end());
    cloud.degenerate_fibers += row.degenerate;
  }
  return cloud;
}

}  // namespace amoebas
