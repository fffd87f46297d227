#include "amoebas/polytope.hpp"

#include "amoebas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace amoebas {

namespace {

using Matrix = std::vector<RationalPoint>;

Rational dot(const RationalPoint& a, const RationalPoint& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_zero(const RationalPoint& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

// Scales to coprime integers, keeping direction.
RationalPoint primitive(const RationalPoint& v) {
  BigInt lcm = 1;
  for (const auto& x : v) lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(x));
  std::vector<BigInt> ints;
  ints.reserve(v.size());
  BigInt g = 0;
  for (const auto& x : v) {
    BigInt k = boost::multiprecision::numerator(x) * (lcm / boost::multiprecision::denominator(x));
    g = boost::multiprecision::gcd(g, k);
    ints.push_back(k);
  }
  RationalPoint out(v.size());
  if (g == 0) return out;
  if (g < 0) g = -g;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(ints[i] / g);
  return out;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(Matrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[row], m[p]);
    Rational inv = 1 / m[row][c];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][c] == 0) continue;
      Rational f = m[r][c];
      for (std::size_t k = 0; k < cols; ++k) m[r][k] -= f * m[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

std::size_t rank_of(Matrix m, std::size_t cols) { return rref(m, cols).size(); }

// Basis (primitive integer vectors) of { y : <row, y> = 0 for all rows }.
Matrix null_space(Matrix m, std::size_t cols) {
  auto pivots = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  Matrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalPoint y(cols, Rational(0));
    y[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) y[pivots[r]] = -m[r][free];
    basis.push_back(primitive(y));
  }
  return basis;
}

Rational determinant(Matrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

// Vector orthogonal to the dim-1 given vectors (cofactor expansion).
RationalPoint generalized_cross(const Matrix& vecs, std::size_t dim) {
  RationalPoint out(dim, Rational(0));
  if (dim == 1) {
    out[0] = 1;
    return out;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    Matrix minor;
    minor.reserve(vecs.size());
    for (const auto& v : vecs) {
      RationalPoint row;
      row.reserve(dim - 1);
      for (std::size_t k = 0; k < dim; ++k) {
        if (k != i) row.push_back(v[k]);
      }
      minor.push_back(std::move(row));
    }
    Rational d = determinant(std::move(minor));
    out[i] = (i % 2 == 0) ? d : Rational(-d);
  }
  return out;
}

struct ConeFacets {
  Matrix normals;        // outward: <a, g> <= 0 for all generators
  Matrix perp;           // basis of the orthogonal complement of span(generators)
  std::size_t rank = 0;  // dimension of span(generators)
};

// Facets of cone(gens) inside its linear span, by brute force over
// (rank-1)-subsets of generators completed with a basis of span^perp.
ConeFacets cone_facets(const Matrix& gens, std::size_t dim) {
  ConeFacets out;
  out.rank = rank_of(gens, dim);
  out.perp = null_space(gens, dim);
  if (out.rank == 0) return out;

  const std::size_t k = out.rank - 1;
  const std::size_t m = gens.size();
  std::set<RationalPoint> seen;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;

  auto visit = [&]() {
    Matrix vecs;
    vecs.reserve(dim - 1);
    for (auto i : idx) vecs.push_back(gens[i]);
    for (const auto& p : out.perp) vecs.push_back(p);
    RationalPoint a = generalized_cross(vecs, dim);
    if (is_zero(a)) return;
    bool any_pos = false, any_neg = false;
    for (const auto& g : gens) {
      Rational s = dot(a, g);
      if (s > 0) any_pos = true;
      if (s < 0) any_neg = true;
      if (any_pos && any_neg) return;
    }
    if (any_pos) {
      for (auto& x : a) x = -x;
    }
    a = primitive(a);
    if (seen.insert(a).second) out.normals.push_back(a);
  };

  if (k == 0) {
    visit();
    return out;
  }
  if (k > m) return out;
  while (true) {
    visit();
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

RationalPoint scaled_homogeneous(const RationalPoint& p, const Rational& last) {
  RationalPoint g = p;
  g.push_back(last);
  return g;
}

}  // namespace

RationalPoint to_rational_point(const ExponentVector& v) {
  RationalPoint out;
  out.reserve(v.size());
  for (long x : v) out.emplace_back(x);
  return out;
}

// ---------------------------------------------------------------------------

Cone::Cone(std::size_t n, std::vector<RationalPoint> inequalities, std::vector<RationalPoint> generators,
           std::vector<RationalPoint> lineality)
    : n_(n),
      inequalities_(std::move(inequalities)),
      generators_(std::move(generators)),
      lineality_(std::move(lineality)) {}

bool Cone::contains(const RationalPoint& s) const {
  if (s.size() != n_) throw InputError("cone membership: wrong dimension");
  return std::all_of(inequalities_.begin(), inequalities_.end(),
                     [&](const RationalPoint& d) { return dot(s, d) <= 0; });
}

bool Cone::contains_interior(const RationalPoint& s) const {
  if (s.size() != n_) throw InputError("cone membership: wrong dimension");
  return std::all_of(inequalities_.begin(), inequalities_.end(),
                     [&](const RationalPoint& d) { return dot(s, d) < 0; });
}

RationalPoint Cone::interior_direction() const {
  RationalPoint sum(n_, Rational(0));
  for (const auto& g : generators_) {
    Rational l1 = 0;
    for (const auto& x : g) l1 += abs(x);
    if (l1 == 0) continue;
    for (std::size_t i = 0; i < n_; ++i) sum[i] += g[i] / l1;
  }
  return sum;
}

// ---------------------------------------------------------------------------

Polyhedron Polyhedron::hull(const std::vector<RationalPoint>& points, const std::vector<RationalPoint>& recession) {
  if (points.empty()) throw InputError("hull of an empty point set");
  Polyhedron P;
  P.n_ = points.front().size();
  if (P.n_ == 0) throw InputError("hull needs dimension >= 1");
  for (const auto& p : points) {
    if (p.size() != P.n_) throw InputError("hull: points of mixed dimension");
  }

  std::set<RationalPoint> distinct(points.begin(), points.end());
  std::set<RationalPoint> rays;
  for (const auto& r : recession) {
    if (r.size() != P.n_) throw InputError("hull: recession ray of wrong dimension");
    if (!is_zero(r)) rays.insert(primitive(r));
  }
  P.recession_.assign(rays.begin(), rays.end());

  const std::size_t dim = P.n_ + 1;
  Matrix gens;
  for (const auto& p : distinct) gens.push_back(scaled_homogeneous(p, 1));
  for (const auto& r : P.recession_) gens.push_back(scaled_homogeneous(r, 0));

  ConeFacets cf = cone_facets(gens, dim);
  P.affine_dim_ = static_cast<long>(cf.rank) - 1;

  for (const auto& e : cf.perp) {
    Facet eq;
    eq.normal.assign(e.begin(), e.end() - 1);
    eq.offset = -e.back();
    P.equations_.push_back(std::move(eq));
  }

  for (const auto& p : distinct) {
    RationalPoint g = scaled_homogeneous(p, 1);
    Matrix tight = cf.perp;
    for (const auto& a : cf.normals) {
      if (dot(a, g) == 0) tight.push_back(a);
    }
    if (rank_of(tight, dim) == dim - 1) P.vertices_.push_back(p);
  }

  if (P.is_full_dimensional()) {
    for (const auto& a : cf.normals) {
      RationalPoint normal(a.begin(), a.end() - 1);
      if (is_zero(normal)) continue;  // the face at infinity t >= 0
      P.facets_.push_back(Facet{std::move(normal), -a.back()});
    }
  }

  if (!P.recession_.empty()) {
    ConeFacets rc = cone_facets(P.recession_, P.n_);
    // Pointed iff the polar cone is full-dimensional within span(rays).
    Matrix normals_and_perp = rc.normals;
    normals_and_perp.insert(normals_and_perp.end(), rc.perp.begin(), rc.perp.end());
    P.line_free_ = rank_of(normals_and_perp, P.n_) == P.n_;
  }
  return P;
}

Polyhedron Polyhedron::hull(const std::vector<ExponentVector>& points, const std::vector<ExponentVector>& recession) {
  std::vector<RationalPoint> p, r;
  for (const auto& x : points) p.push_back(to_rational_point(x));
  for (const auto& x : recession) r.push_back(to_rational_point(x));
  return hull(p, r);
}

bool Polyhedron::is_vertex(const RationalPoint& p) const {
  return std::find(vertices_.begin(), vertices_.end(), p) != vertices_.end();
}

bool Polyhedron::contains(const RationalPoint& u) const {
  if (u.size() != n_) throw InputError("membership: wrong dimension");
  for (const auto& e : equations_) {
    if (dot(e.normal, u) != e.offset) return false;
  }
  if (is_full_dimensional()) {
    return std::all_of(facets_.begin(), facets_.end(),
                       [&](const Facet& f) { return dot(f.normal, u) <= f.offset; });
  }
  // Lower-dimensional: u lies in P iff adding it leaves the vertex set unchanged.
  std::vector<RationalPoint> pts = vertices_;
  pts.push_back(u);
  return hull(pts, recession_).vertices_ == vertices_;
}

bool Polyhedron::contains_interior(const RationalPoint& u) const {
  if (u.size() != n_) throw InputError("membership: wrong dimension");
  if (!is_full_dimensional()) return false;
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Facet& f) { return dot(f.normal, u) < f.offset; });
}

Cone Polyhedron::dual_cone_at(const RationalPoint& vertex) const {
  if (!is_vertex(vertex)) throw InputError("dual cone requested at a point that is not a vertex");
  Matrix directions;
  for (const auto& v : vertices_) {
    if (v == vertex) continue;
    RationalPoint d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = v[i] - vertex[i];
    directions.push_back(std::move(d));
  }
  for (const auto& r : recession_) directions.push_back(r);

  if (directions.empty()) {
    Matrix basis;
    for (std::size_t i = 0; i < n_; ++i) {
      RationalPoint e(n_, Rational(0));
      e[i] = 1;
      basis.push_back(std::move(e));
    }
    return Cone(n_, {}, {}, std::move(basis));
  }
  ConeFacets tangent = cone_facets(directions, n_);
  return Cone(n_, std::move(directions), std::move(tangent.normals), std::move(tangent.perp));
}

double Polyhedron::vertex_diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        double d = to_double(vertices_[i][k] - vertices_[j][k]);
        s += d * d;
      }
      best = std::max(best, std::sqrt(s));
    }
  }
  return best;
}

Polyhedron newton_polytope(const LaurentPolynomial& p) {
  if (p.is_zero()) throw InputError("Newton polytope of the zero polynomial");
  return Polyhedron::hull(p.support());
}

bool generates_lattice(const std::vector<ExponentVector>& points) {
  if (points.empty()) return false;
  const std::size_t n = points.front().size();
  std::vector<std::vector<BigInt>> rows;
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (points[k].size() != n) throw InputError("generates_lattice: points of mixed dimension");
    std::vector<BigInt> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = BigInt(points[k][i] - points[0][i]);
    rows.push_back(std::move(d));
  }

  // Hermite-style reduction with unimodular row operations (Euclid on each column).
  std::size_t pivot_row = 0;
  BigInt index = 1;
  for (std::size_t c = 0; c < n; ++c) {
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = pivot_row; r < rows.size(); ++r) {
        if (rows[r][c] != 0 && (best == rows.size() || abs(rows[r][c]) < abs(rows[best][c]))) best = r;
      }
      if (best == rows.size()) return false;  // column c has no pivot: rank < n
      std::swap(rows[pivot_row], rows[best]);
      bool reduced = true;
      for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
        if (rows[r][c] == 0) continue;
        BigInt q = rows[r][c] / rows[pivot_row][c];
        for (std::size_t k = c; k < n; ++k) rows[r][k] -= q * rows[pivot_row][k];
        if (rows[r][c] != 0) reduced = false;
      }
      if (reduced) break;
    }
    index *= abs(rows[pivot_row][c]);
    ++pivot_row;
  }
  return index == 1;
}

}  // namespace amoebas
