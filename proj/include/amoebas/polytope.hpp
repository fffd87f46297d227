#pragma once

#include "amoebas/laurent.hpp"
#include "amoebas/rational.hpp"

#include <vector>

namespace amoebas {

using RationalPoint = std::vector<Rational>;

RationalPoint to_rational_point(const ExponentVector& v);

/// Polyhedral cone { s : <s, d> <= 0 for every row d of `inequalities` }.
///
/// `generators` are the extreme rays of its pointed part; `lineality` spans
/// the largest linear subspace it contains (non-empty when the defining rows
/// do not span R^n).
class Cone {
 public:
  Cone(std::size_t n, std::vector<RationalPoint> inequalities, std::vector<RationalPoint> generators,
       std::vector<RationalPoint> lineality);

  std::size_t dimension() const noexcept { return n_; }
  const std::vector<RationalPoint>& inequalities() const noexcept { return inequalities_; }
  const std::vector<RationalPoint>& generators() const noexcept { return generators_; }
  const std::vector<RationalPoint>& lineality() const noexcept { return lineality_; }

  bool contains(const RationalPoint& s) const;
  /// All defining inequalities strict.
  bool contains_interior(const RationalPoint& s) const;
  /// Sum of the L1-normalized generators; strictly interior when the cone is full-dimensional.
  RationalPoint interior_direction() const;

 private:
  std::size_t n_;
  std::vector<RationalPoint> inequalities_;
  std::vector<RationalPoint> generators_;
  std::vector<RationalPoint> lineality_;
};

/// Supporting half-space <normal, x> <= offset.
struct Facet {
  RationalPoint normal;
  Rational offset;
};

/// conv(vertices) + cone(recession), with exact rational data.
///
/// Construction enumerates the facets of the homogenized cone
/// cone{(v,1), (r,0)} in R^{n+1} by brute force over candidate hyperplanes;
/// this is exact for any n but meant for n <= 3 and a few dozen points.
class Polyhedron {
 public:
  static Polyhedron hull(const std::vector<RationalPoint>& points,
                         const std::vector<RationalPoint>& recession = {});
  static Polyhedron hull(const std::vector<ExponentVector>& points,
                         const std::vector<ExponentVector>& recession = {});

  std::size_t dimension() const noexcept { return n_; }
  /// Extreme points, lexicographically sorted.
  const std::vector<RationalPoint>& vertices() const noexcept { return vertices_; }
  /// Primitive integer recession rays (as given, deduplicated).
  const std::vector<RationalPoint>& recession() const noexcept { return recession_; }
  /// Finite facets only; empty when the polyhedron is not full-dimensional.
  const std::vector<Facet>& facets() const noexcept { return facets_; }
  /// Affine equations <a, x> = b cutting out the affine hull.
  const std::vector<Facet>& equations() const noexcept { return equations_; }
  long affine_dimension() const noexcept { return affine_dim_; }
  bool is_full_dimensional() const noexcept { return affine_dim_ == static_cast<long>(n_); }
  bool is_vertex(const RationalPoint& p) const;
  /// True when the recession cone contains no line.
  bool is_line_free() const noexcept { return line_free_; }

  /// Closed membership.
  bool contains(const RationalPoint& u) const;
  /// Strict interior in R^n (always false for lower-dimensional polyhedra).
  bool contains_interior(const RationalPoint& u) const;

  /// C_nu = { s : <s, nu> = max over the polyhedron of <s, .> }.
  Cone dual_cone_at(const RationalPoint& vertex) const;

  /// max Euclidean distance between vertices.
  double vertex_diameter() const;

 private:
  Polyhedron() = default;

  std::size_t n_ = 0;
  std::vector<RationalPoint> vertices_;
  std::vector<RationalPoint> recession_;
  std::vector<Facet> facets_;
  std::vector<Facet> equations_;
  long affine_dim_ = -1;
  bool line_free_ = true;
};

inline Polyhedron hull(const std::vector<RationalPoint>& points) { return Polyhedron::hull(points); }
inline Cone dual_cone_at(const Polyhedron& p, const RationalPoint& nu) { return p.dual_cone_at(nu); }
inline bool contains_interior(const Polyhedron& p, const RationalPoint& u) { return p.contains_interior(u); }

/// Newton polytope of a Laurent polynomial's support.
Polyhedron newton_polytope(const LaurentPolynomial& p);

/// True iff the differences s - s_0 generate Z^n as a group (Hermite
/// reduction of the difference matrix; every pivot must be a unit).
bool generates_lattice(const std::vector<ExponentVector>& points);

}  // namespace amoebas
