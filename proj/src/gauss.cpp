#include "amoebas/gauss.hpp"

#include "amoebas/amoeba.hpp"
#include "amoebas/errors.hpp"
#include "amoebas/parallel.hpp"
#include "amoebas/univariate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>

namespace amoebas {

namespace {

using Index = Eigen::Index;

/// Newton residual r(z) with its Jacobian dr/dxi in log coordinates, the
/// row weights used for the line-search merit, and the relative residual
/// that decides convergence.
struct System {
  std::function<void(const ComplexVector& z, Eigen::VectorXcd& r, Eigen::VectorXd& weight, double& relative)> value;
  std::function<Eigen::MatrixXcd(const ComplexVector& z)> jacobian;
};

double weighted_max(const Eigen::VectorXcd& r, const Eigen::VectorXd& weight) {
  double m = 0.0;
  for (Index i = 0; i < r.size(); ++i) m = std::max(m, std::abs(r[i]) * weight[i]);
  return m;
}

/// max |F_i| / scale_i, with 0/0 read as 0.
double scaled_norm(const Eigen::VectorXcd& f, const Eigen::VectorXd& scale) {
  double r = 0.0;
  for (Index i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0) continue;
    r = std::max(r, scale[i] > 0.0 ? a / scale[i] : std::numeric_limits<double>::infinity());
  }
  return r;
}

Eigen::VectorXd inverse_scales(const Eigen::VectorXd& scale) {
  Eigen::VectorXd w(scale.size());
  for (Index i = 0; i < scale.size(); ++i) w[i] = scale[i] > 0.0 ? 1.0 / scale[i] : 1.0;
  return w;
}

ComplexVector from_log(const Eigen::VectorXcd& xi) {
  ComplexVector z(static_cast<std::size_t>(xi.size()));
  for (Index j = 0; j < xi.size(); ++j) z[static_cast<std::size_t>(j)] = std::exp(xi[j]);
  return z;
}

CriticalPoint damped_newton(const System& sys, std::span<const Complex> seed, const GaussOptions& options,
                            const char* name) {
  const Index n = static_cast<Index>(seed.size());
  Eigen::VectorXcd xi(n);
  for (Index j = 0; j < n; ++j) {
    const Complex s = seed[static_cast<std::size_t>(j)];
    if (s == Complex(0.0)) throw DomainError(std::string(name) + ": seed has a zero coordinate");
    xi[j] = std::log(s);
  }

  Eigen::VectorXcd r(n);
  Eigen::VectorXd weight(n);
  double res = 0.0;
  ComplexVector z = from_log(xi);
  sys.value(z, r, weight, res);
  std::vector<double> trace{res};

  int it = 0;
  for (; it < options.max_iterations && res > options.tol; ++it) {
    Eigen::MatrixXcd jac = sys.jacobian(z);
    Eigen::VectorXcd step = jac.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) break;

    // Merit uses the weights of the current iterate: the relative residual
    // alone can keep decreasing all the way to infinity.
    const double merit = weighted_max(r, weight);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      Eigen::VectorXcd cand = xi + t * step;
      if (cand.real().cwiseAbs().maxCoeff() > 700.0) continue;
      ComplexVector zc = from_log(cand);
      Eigen::VectorXcd rc(n);
      Eigen::VectorXd wc(n);
      double relc = 0.0;
      sys.value(zc, rc, wc, relc);
      const double mc = weighted_max(rc, weight);
      if (std::isfinite(mc) && std::isfinite(relc) && mc < merit) {
        xi = cand;
        z = std::move(zc);
        r = rc;
        weight = wc;
        res = relc;
        accepted = true;
        break;
      }
    }
    trace.push_back(res);
    if (!accepted) break;
  }

  if (!(res <= options.tol)) {
    throw NumericalError(std::string(name) + ": Newton did not converge (residual " + std::to_string(res) + ")",
                         res, trace);
  }

  // Degeneracy test on the row-weighted Jacobian.
  Eigen::MatrixXcd jac = sys.jacobian(z);
  for (Index i = 0; i < n; ++i) jac.row(i) *= weight[i];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
  const auto& sv = svd.singularValues();
  const bool degenerate = n > 0 && (sv[0] == 0.0 || sv[n - 1] <= 1e-8 * sv[0]);
  return CriticalPoint{std::move(z), res, it, degenerate};
}

std::size_t pivot_axis(std::span<const double> q) {
  std::size_t p = 0;
  for (std::size_t j = 1; j < q.size(); ++j) {
    if (std::abs(q[j]) > std::abs(q[p])) p = j;
  }
  return p;
}

void require_direction(std::span<const double> q, std::size_t n, const char* name) {
  if (q.size() != n) throw InputError(std::string(name) + ": direction has wrong dimension");
  if (std::all_of(q.begin(), q.end(), [](double v) { return v == 0.0; })) {
    throw InputError(std::string(name) + ": direction must be nonzero");
  }
}

/// Euler operators D_j and their products D_k D_j.
struct EulerTable {
  std::vector<LaurentPolynomial> first;
  std::vector<std::vector<LaurentPolynomial>> second;

  explicit EulerTable(const LaurentPolynomial& p) {
    const std::size_t n = p.dimension();
    for (std::size_t j = 0; j < n; ++j) first.push_back(p.euler(j));
    second.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) second[j].push_back(first[j].euler(k));
    }
  }
};

}  // namespace

ProjectiveDirection make_direction(std::span<const Complex> v) {
  std::size_t p = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (std::abs(v[j]) > std::abs(v[p])) p = j;
  }
  if (v.empty() || std::abs(v[p]) == 0.0) throw InputError("projective direction must be nonzero");
  ProjectiveDirection d;
  d.coords.reserve(v.size());
  for (const auto& c : v) d.coords.push_back(c / v[p]);
  d.coords[p] = 1.0;
  return d;
}

ProjectiveDirection make_direction(std::span<const double> v) {
  ComplexVector c(v.begin(), v.end());
  return make_direction(c);
}

double projective_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InputError("projective_distance: dimension mismatch");
  double na = 0.0, nb = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    na += std::norm(a[j]);
    nb += std::norm(b[j]);
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na == 0.0 || nb == 0.0) throw InputError("projective_distance: zero vector");
  Complex inner = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) inner += std::conj(b[j] / nb) * (a[j] / na);
  double r = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) r += std::norm(a[j] / na - inner * (b[j] / nb));
  return std::sqrt(r);
}

ProjectiveDirection log_gauss(const LaurentPolynomial& q, std::span<const Complex> z, double tol) {
  const std::size_t n = q.dimension();
  if (z.size() != n) throw InputError("log_gauss: point has wrong dimension");
  const double scale = q.abs_scale(z);
  if (std::abs(q.evaluate(z)) > tol * scale) throw InputError("log_gauss: point is not on the hypersurface");

  ComplexVector g(n);
  double largest = 0.0, gscale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const LaurentPolynomial d = q.euler(j);
    g[j] = d.evaluate(z);
    largest = std::max(largest, std::abs(g[j]));
    gscale = std::max(gscale, d.abs_scale(z));
  }
  if (largest <= tol * gscale || largest == 0.0) {
    throw SingularityError("log_gauss: singular point of the hypersurface", largest);
  }
  return make_direction(g);
}

CriticalPoint inverse_gauss(const LaurentPolynomial& q, std::span<const double> direction,
                            std::span<const Complex> seed, const GaussOptions& options) {
  const std::size_t n = q.dimension();
  require_direction(direction, n, "inverse_gauss");
  if (seed.size() != n) throw InputError("inverse_gauss: seed has wrong dimension");
  if (q.is_zero()) throw InputError("inverse_gauss: zero polynomial");

  const std::size_t p = pivot_axis(direction);
  const std::vector<double> dir(direction.begin(), direction.end());
  auto table = std::make_shared<EulerTable>(q);

  // Row 0 is Q; the remaining rows are indexed by the axes j != p.
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != p) rows.push_back(j);
  }

  System sys;
  sys.value = [&q, table, dir, p, rows](const ComplexVector& z, Eigen::VectorXcd& f, Eigen::VectorXd& weight,
                                        double& relative) {
    Eigen::VectorXd scale(f.size());
    f[0] = q.evaluate(z);
    scale[0] = q.abs_scale(z);
    const Complex dp = table->first[p].evaluate(z);
    const double sp = table->first[p].abs_scale(z);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t j = rows[r];
      f[static_cast<Index>(r + 1)] = dir[p] * table->first[j].evaluate(z) - dir[j] * dp;
      scale[static_cast<Index>(r + 1)] = std::abs(dir[p]) * table->first[j].abs_scale(z) + std::abs(dir[j]) * sp;
    }
    weight = inverse_scales(scale);
    relative = scaled_norm(f, scale);
  };
  sys.jacobian = [table, dir, p, rows, n](const ComplexVector& z) {
    Eigen::MatrixXcd jac(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      jac(0, static_cast<Index>(k)) = table->first[k].evaluate(z);
      const Complex dpk = table->second[p][k].evaluate(z);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t j = rows[r];
        jac(static_cast<Index>(r + 1), static_cast<Index>(k)) = dir[p] * table->second[j][k].evaluate(z) - dir[j] * dpk;
      }
    }
    return jac;
  };
  return damped_newton(sys, seed, options, "inverse_gauss");
}

CriticalPoint graph_inverse_gauss(const LaurentPolynomial& f, std::span<const double> u,
                                  std::span<const Complex> seed, const GaussOptions& options) {
  const std::size_t n = f.dimension();
  if (u.size() != n) throw InputError("graph_inverse_gauss: u has wrong dimension");
  if (seed.size() != n) throw InputError("graph_inverse_gauss: seed has wrong dimension");
  if (f.evaluate(seed) == Complex(0.0)) throw InputError("graph_inverse_gauss: f vanishes at the seed");

  const std::vector<double> mean(u.begin(), u.end());
  auto table = std::make_shared<EulerTable>(f);

  System sys;
  // Newton runs on G_j = D_j f / f - u_j, whose norm has no spurious valley
  // where f is dominated by its constant term; convergence is judged on
  // D_j f - u_j f relative to its term moduli.
  sys.value = [&f, table, mean, n](const ComplexVector& z, Eigen::VectorXcd& g, Eigen::VectorXd& weight,
                                   double& relative) {
    const Complex fv = f.evaluate(z);
    const double fs = f.abs_scale(z);
    Eigen::VectorXcd raw(static_cast<Index>(n));
    Eigen::VectorXd scale(static_cast<Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      raw[static_cast<Index>(j)] = table->first[j].evaluate(z) - mean[j] * fv;
      scale[static_cast<Index>(j)] = table->first[j].abs_scale(z) + std::abs(mean[j]) * fs;
    }
    g = raw / fv;
    weight = Eigen::VectorXd::Ones(static_cast<Index>(n));
    relative = fv == Complex(0.0) ? std::numeric_limits<double>::infinity() : scaled_norm(raw, scale);
  };
  sys.jacobian = [&f, table, mean, n](const ComplexVector& z) {
    const Complex fv = f.evaluate(z);
    Eigen::MatrixXcd jac(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const Complex gj = table->first[j].evaluate(z) / fv - mean[j];
      for (std::size_t k = 0; k < n; ++k) {
        const Complex dk = table->first[k].evaluate(z);
        const Complex raw_jk = table->second[j][k].evaluate(z) - mean[j] * dk;
        jac(static_cast<Index>(j), static_cast<Index>(k)) = (raw_jk - gj * dk) / fv;
      }
    }
    return jac;
  };
  return damped_newton(sys, seed, options, "graph_inverse_gauss");
}

double tangential_residual(const LaurentPolynomial& q, std::span<const double> direction,
                           std::span<const Complex> z) {
  const std::size_t n = q.dimension();
  require_direction(direction, n, "tangential_residual");
  if (n == 1) return 0.0;
  Eigen::MatrixXcd grad(1, static_cast<Index>(n));
  for (std::size_t k = 0; k < n; ++k) grad(0, static_cast<Index>(k)) = q.euler(k).evaluate(z);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(grad, Eigen::ComputeFullV);
  const Eigen::MatrixXcd& v = svd.matrixV();

  double qn = 0.0;
  for (double c : direction) qn += c * c;
  qn = std::sqrt(qn);
  double worst = 0.0;
  for (Index col = 1; col < static_cast<Index>(n); ++col) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += direction[k] * v(static_cast<Index>(k), col);
    worst = std::max(worst, std::abs(s) / qn);
  }
  return worst;
}

std::vector<SweepDirection> direction_sweep(std::size_t n, int steps) {
  if (steps < 1) throw InputError("direction_sweep: need at least one step");
  std::vector<SweepDirection> out;
  const double pi = std::numbers::pi;
  if (n == 1) {
    out.push_back({0.0, {1.0}});
  } else if (n == 2) {
    for (int k = 0; k < steps; ++k) {
      const double a = pi * k / steps;
      out.push_back({a, {std::cos(a), std::sin(a)}});
    }
  } else if (n == 3) {
    for (int a = 0; a < steps; ++a) {
      const double polar = 0.5 * pi * (a + 0.5) / steps;
      for (int b = 0; b < 2 * steps; ++b) {
        const double az = pi * b / steps;
        out.push_back({polar, {std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar)}});
      }
    }
  } else {
    throw InputError("direction_sweep: supported for n <= 3");
  }
  return out;
}

std::vector<ComplexVector> default_seeds(const LaurentPolynomial& q, int grid) {
  const std::size_t n = q.dimension();
  const std::size_t axis = fiber_axis(q);
  const std::size_t dims = n - 1;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::size_t>(grid);

  std::vector<ComplexVector> seeds;
  for (std::size_t k = 0; k < total; ++k) {
    for (int scatter = 0; scatter < 2; ++scatter) {
      ComplexVector others(dims);
      std::size_t rest = k;
      for (std::size_t d = dims; d-- > 0;) {
        const int s = static_cast<int>(rest % static_cast<std::size_t>(grid));
        rest /= static_cast<std::size_t>(grid);
        const double modulus = grid > 1 ? -2.0 + 4.0 * s / (grid - 1) : 0.0;
        const double phase = scatter == 0 ? 0.0 : 0.37 + 2.1 * s + 0.9 * static_cast<double>(d);
        others[d] = std::exp(Complex(modulus, phase));
      }
      try {
        Fiber f = fiber(q, axis, others);
        for (const auto& r : f.torus_roots()) {
          ComplexVector z = others;
          z.insert(z.begin() + static_cast<std::ptrdiff_t>(axis), r);
          seeds.push_back(std::move(z));
        }
      } catch (const NumericalError&) {
        // degenerate or unsolvable fiber: no seeds from it
      }
      if (dims == 0) break;
    }
  }
  return seeds;
}

namespace {

bool same_point(std::span<const Complex> a, std::span<const Complex> b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double scale = std::max(std::abs(a[j]), std::abs(b[j]));
    if (std::abs(a[j] - b[j]) > 1e-7 * scale) return false;
  }
  return true;
}

std::optional<ComplexVector> verified_solve(const LaurentPolynomial& q, const SweepDirection& d,
                                            std::span<const Complex> seed, const ContourOptions& options) {
  try {
    CriticalPoint cp = inverse_gauss(q, d.q, seed, options.newton);
    ProjectiveDirection g = log_gauss(q, cp.z);
    ComplexVector target(d.q.begin(), d.q.end());
    if (projective_distance(g.coords, target) > options.tol) return std::nullopt;
    return cp.z;
  } catch (const NumericalError&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<ContourPoint> contour(const LaurentPolynomial& q, const std::vector<SweepDirection>& directions,
                                  const std::vector<ComplexVector>& extra_seeds, const ContourOptions& options) {
  const std::size_t n = q.dimension();
  for (const auto& d : directions) require_direction(d.q, n, "contour");
  std::vector<ComplexVector> seeds = extra_seeds;
  for (auto& s : default_seeds(q, options.seed_grid)) seeds.push_back(std::move(s));

  // Fresh solutions per direction are independent of each other.
  auto fresh = parallel_map(directions.size(), options.workers, [&](std::size_t i) {
    std::vector<ComplexVector> found;
    for (const auto& s : seeds) {
      if (s.size() != n) continue;
      auto z = verified_solve(q, directions[i], s, options);
      if (!z) continue;
      if (std::none_of(found.begin(), found.end(), [&](const auto& f) { return same_point(f, *z); })) {
        found.push_back(std::move(*z));
      }
    }
    return found;
  });

  struct Branch {
    long id;
    ComplexVector last;
  };
  std::vector<Branch> active;
  long next_id = 0;
  std::vector<ContourPoint> out;

  for (std::size_t i = 0; i < directions.size(); ++i) {
    std::vector<std::pair<long, ComplexVector>> here;
    std::vector<Branch> still;
    for (auto& b : active) {
      auto z = verified_solve(q, directions[i], b.last, options);
      if (!z) continue;
      if (std::any_of(here.begin(), here.end(), [&](const auto& h) { return same_point(h.second, *z); })) continue;
      here.emplace_back(b.id, *z);
      still.push_back({b.id, std::move(*z)});
    }
    for (auto& z : fresh[i]) {
      if (std::any_of(here.begin(), here.end(), [&](const auto& h) { return same_point(h.second, z); })) continue;
      here.emplace_back(next_id, z);
      still.push_back({next_id, z});
      ++next_id;
    }
    active = std::move(still);

    for (auto& [id, z] : here) {
      ContourPoint cp;
      cp.x.resize(n);
      for (std::size_t j = 0; j < n; ++j) cp.x[j] = std::log(std::abs(z[j]));
      cp.z = z;
      cp.direction = directions[i].q;
      cp.angle = directions[i].angle;
      cp.direction_index = i;
      cp.branch = id;
      out.push_back(std::move(cp));
    }
  }
  return out;
}

}  // namespace amoebas
