#pragma once

#include "amoebas/laurent.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace amoebas {

enum class Verdict { Outside, Inside, Uncertain };

const char* to_string(Verdict v);

struct Membership {
  Verdict verdict = Verdict::Uncertain;
  /// Point of V with |Q| <= tol * sum |a_alpha z^alpha| and |Log(witness) - x| <= tol (Inside only).
  std::optional<ComplexVector> witness;
  /// min over sampled fibers and roots of |log|root| - x_axis|.
  double distance = 0.0;
  std::size_t axis = 0;
};

/// Axis with the largest exponent spread; ties go to the lowest index.
std::size_t fiber_axis(const LaurentPolynomial& q);

/// Samples the phases of the coordinates other than fiber_axis(q) on a
/// uniform grid with `phase_samples` points per axis and solves each fiber.
///
/// Inside when a root lands within tol of the circle |z_axis| = e^{x_axis},
/// or when the root count inside that circle changes between neighbouring
/// samples (a root crossed it; the crossing phase is bisected to produce the
/// witness). Outside when every count agrees and no root came within tol.
/// Uncertain when a crossing was detected but no witness met the tolerances.
Membership membership(const LaurentPolynomial& q, std::span<const double> x, int phase_samples = 64,
                      double tol = 1e-6);

/// Order vector of the complement component containing x: per axis, the
/// winding number of the fiber around |z_j| = e^{x_j}, which must agree on
/// every sampled fiber. Throws NearAmoebaError otherwise.
ExponentVector order(const LaurentPolynomial& q, std::span<const double> x, int phase_samples = 64);

struct VertexComponent {
  ExponentVector vertex;
  std::vector<double> representative;
  bool verified = false;
  /// Order measured at the representative, absent when the probe hit the amoeba.
  std::optional<ExponentVector> observed;
};

/// 5 + the diameter of the vertex set of the Newton polytope.
double default_probe_depth(const LaurentPolynomial& q);

/// Probes x = depth * (unit interior direction of the dual cone) at every vertex
/// of the Newton polytope and checks that the order there is the vertex itself.
/// A failed check is reported, not thrown; a larger depth usually fixes it.
std::vector<VertexComponent> vertex_components(const LaurentPolynomial& q, std::optional<double> depth = {},
                                               int phase_samples = 64);

/// Rectangular sampling grid in R^n; steps >= 2 per axis, endpoints included.
struct Grid {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> steps;

  std::size_t dimension() const noexcept { return lo.size(); }
  std::size_t size() const;
  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const int> index) const;
  std::vector<double> point(std::size_t flat) const;
  void validate() const;
};

struct ComplementComponent {
  ExponentVector order;
  std::vector<double> representative;
  /// Flat grid indices, ascending.
  std::vector<std::size_t> cells;
  /// No cell on the grid border.
  bool bounded = false;
};

struct ComponentReport {
  Grid grid;
  std::vector<ComplementComponent> components;
  /// Per cell: index into components, or -1 when the cell is not Outside.
  std::vector<long> labels;
  std::size_t inside_cells = 0;
  std::size_t uncertain_cells = 0;
  /// Adjacent Outside cells with different orders: the amoeba passes between
  /// them without touching a grid point.
  std::size_t order_jumps = 0;
};

/// Classifies every grid point, then flood-fills Outside points through the
/// 3^n - 1 neighbours. Two neighbours are joined only when their order vectors
/// agree; a disagreement means the amoeba runs between them. The representative
/// of a component is its cell farthest from the amoeba (largest membership distance).
ComponentReport detect_components(const LaurentPolynomial& q, const Grid& grid, int phase_samples = 64,
                                  double tol = 1e-6, unsigned workers = 1);

struct PointCloud {
  std::vector<std::array<double, 2>> points;
  std::size_t degenerate_fibers = 0;
};

/// For n = 2: for each x1 on the grid and phase theta1, solves the z2-fiber at
/// z1 = e^{x1 + i theta1} and emits (x1, log|root|) for every nonzero root,
/// ordered by (x1 index, theta index, root index).
PointCloud render2d(const LaurentPolynomial& q, double x1_lo, double x1_hi, int x1_steps, int phase_steps,
                    unsigned workers = 1);

}  // namespace amoebas
