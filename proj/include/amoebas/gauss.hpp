#pragma once

#include "amoebas/laurent.hpp"

#include <span>
#include <vector>

namespace amoebas {

/// Point of CP^{n-1} in homogeneous coordinates, scaled so that the entry of
/// largest modulus is exactly 1.
struct ProjectiveDirection {
  ComplexVector coords;
};

/// Throws InputError for the zero vector.
ProjectiveDirection make_direction(std::span<const Complex> v);
ProjectiveDirection make_direction(std::span<const double> v);

/// Distance between the lines spanned by a and b: |a' - <b',a'> b'| with a', b' unit vectors.
double projective_distance(std::span<const Complex> a, std::span<const Complex> b);

/// gamma(z) = (z_1 dQ/dz_1 : ... : z_n dQ/dz_n). Requires a point of V
/// (|Q(z)| <= tol * sum |a_alpha z^alpha|, else InputError); throws
/// SingularityError when every z_j dQ/dz_j vanishes to that tolerance.
ProjectiveDirection log_gauss(const LaurentPolynomial& q, std::span<const Complex> z, double tol = 1e-8);

struct GaussOptions {
  /// Relative residual target (each equation scaled by the sum of its term moduli).
  double tol = 1e-12;
  int max_iterations = 60;
};

struct CriticalPoint {
  ComplexVector z;
  double residual = 0.0;
  int iterations = 0;
  /// Newton Jacobian numerically singular at the solution: gamma is not
  /// locally invertible there.
  bool degenerate = false;
};

/// Solves Q = 0 together with q_p z_j dQ/dz_j - q_j z_p dQ/dz_p = 0 (j != p,
/// p the entry of q with largest modulus) by damped Newton in logarithmic
/// coordinates. Steps are halved until the residual decreases. Throws
/// NumericalError carrying the residual trace when it does not converge.
CriticalPoint inverse_gauss(const LaurentPolynomial& q, std::span<const double> direction,
                            std::span<const Complex> seed, const GaussOptions& options = {});

/// Solves z_j f'_j(z) / f(z) = u_j for every j, the same damped Newton.
/// This is inverse_gauss on the graph w - f(z) in direction (u : -1), restricted to z.
CriticalPoint graph_inverse_gauss(const LaurentPolynomial& f, std::span<const double> u,
                                  std::span<const Complex> seed, const GaussOptions& options = {});

/// Largest |<q, t>| / |q| over an orthonormal basis t of the tangent space of
/// V at z in logarithmic coordinates; vanishes at critical points of z^q on V.
double tangential_residual(const LaurentPolynomial& q, std::span<const double> direction,
                           std::span<const Complex> z);

struct SweepDirection {
  /// Angle of q in the (q_1, q_2) plane for n = 2; polar angle for n = 3; 0 for n = 1.
  double angle = 0.0;
  RealVector q;
};

/// Directions covering RP^{n-1}: n = 1 gives the single direction (1); n = 2
/// gives angles pi k / steps, k < steps; n = 3 gives a polar x azimuth grid
/// over the upper hemisphere with `steps` polar rings.
std::vector<SweepDirection> direction_sweep(std::size_t n, int steps);

/// Deterministic starting points on V: roots of fibers along fiber_axis(q)
/// over a small grid of moduli, at phase 0 and at a scattered phase.
std::vector<ComplexVector> default_seeds(const LaurentPolynomial& q, int grid = 6);

struct ContourPoint {
  RealVector x;
  ComplexVector z;
  RealVector direction;
  double angle = 0.0;
  std::size_t direction_index = 0;
  long branch = 0;
};

struct ContourOptions {
  GaussOptions newton;
  /// Required projective agreement between gamma(z) and the direction.
  double tol = 1e-8;
  int seed_grid = 6;
  unsigned workers = 1;
};

/// All critical points found for each direction, in sweep order. Solutions
/// are continued from the previous direction (keeping their branch id) and
/// completed by solutions from fresh seeds, which open new branches.
std::vector<ContourPoint> contour(const LaurentPolynomial& q, const std::vector<SweepDirection>& directions,
                                  const std::vector<ComplexVector>& extra_seeds = {},
                                  const ContourOptions& options = {});

}  // namespace amoebas
