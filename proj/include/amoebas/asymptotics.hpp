#pragma once

#include "amoebas/gauss.hpp"
#include "amoebas/laurent.hpp"
#include "amoebas/rational.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amoebas {

struct PhaseHessian {
  /// (n-1) x (n-1) Hessian of phi = <q, log z> restricted to V, in the
  /// logarithmic coordinates of every axis except `eliminated_axis`.
  Eigen::MatrixXcd matrix;
  Complex determinant{1.0};
  std::size_t eliminated_axis = 0;
};

/// Axis eliminated through Q = 0: the last one unless z_n dQ/dz_n is
/// negligible (relative 1e-8) or q_n = 0, in which case the axis with
/// q_j != 0 and the largest |z_j dQ/dz_j|.
std::size_t elimination_axis(const LaurentPolynomial& q, std::span<const double> direction,
                             std::span<const Complex> z);

/// Second-order central differences of phi with step h and h/2, combined by
/// one Richardson extrapolation; the eliminated coordinate is recovered by
/// Newton on Q = 0 from its value at z. For n = 1 the matrix is empty and the
/// determinant is 1. Throws NumericalError when the implicit solve fails.
PhaseHessian phase_hessian(const LaurentPolynomial& q, std::span<const double> direction,
                           std::span<const Complex> z, double step = 1e-4);

/// Determinant of the differential of gamma restricted to V at z, in an
/// affine chart of CP^{n-1} and an orthonormal tangent basis (log coordinates).
/// Vanishes exactly where gamma fails to be locally invertible.
Complex gauss_jacobian_determinant(const LaurentPolynomial& q, std::span<const Complex> z);

struct AsymptoticEstimate {
  ExponentVector q;
  ComplexVector saddle;
  PhaseHessian hessian;
  /// C(q) = (2 pi)^{(1-n)/2} * (-sign q_e) P / (z_e dQ/dz_e) * det(-H)^{-1/2}, e the eliminated axis.
  Complex constant{0.0};
  /// P vanishes at the saddle; the leading law is identically zero.
  bool constant_vanishes = false;
  /// Spot check: no other sampled point of the saddle's torus lies on V.
  bool simple_boundary = true;
  std::vector<std::string> warnings;

  /// log of k^{(1-n)/2} z^{-q k} C(q) (complex; phase in the imaginary part).
  Complex log_law(long k) const;
};

struct EstimateOptions {
  std::optional<ComplexVector> seed;
  GaussOptions newton;
  int phase_samples = 64;
};

/// Leading asymptotics of the diagonal coefficients c_{q k} of P/Q. The
/// saddle is the solution of the inverse Gauss system for q; among the
/// solutions reached from the seeds, a real positive one is preferred.
/// Throws SingularityError for a non-Morse saddle (det Hess = 0).
AsymptoticEstimate estimate(const LaurentPolynomial& p, const LaurentPolynomial& q, const ExponentVector& direction,
                            const EstimateOptions& options = {});

struct ComparisonRow {
  long k = 0;
  Rational exact;
  /// log of the estimate; the estimate itself may overflow a double.
  Complex log_estimate{0.0};
  /// exact / estimate; NaN when the estimate vanishes.
  Complex ratio{0.0};
};

struct Comparison {
  AsymptoticEstimate estimate;
  ExponentVector vertex;
  /// The square root of det(-H) was negated to match the oracle's phase.
  bool branch_flipped = false;
  std::vector<ComparisonRow> rows;
};

struct CompareOptions {
  EstimateOptions estimate;
  /// Vertex of Newt(Q) whose expansion is compared; default: the first vertex
  /// whose tangent cone contains q in its interior.
  std::optional<ExponentVector> vertex;
  long max_order = 4096;
  unsigned workers = 1;
};

/// Vertex of Newt(Q) whose tangent cone has the direction in its interior
/// (the first in lexicographic order). InputError if there is none.
ExponentVector expansion_vertex(const LaurentPolynomial& q, const ExponentVector& direction);

/// Exact c_{q k} of the expansion of P/Q attached to `vertex`: series
/// division when the vertex is the origin and all supports are nonnegative,
/// the geometric-series oracle otherwise (parallel over k).
std::vector<Rational> diagonal_coefficients(const LaurentPolynomial& p, const LaurentPolynomial& q,
                                           const ExponentVector& direction, const std::vector<long>& k_list,
                                           const ExponentVector& vertex, long max_order = 4096,
                                           unsigned workers = 1);

/// Exact oracle coefficient versus the leading law for each k. Uses series
/// division when the vertex is the origin and supports are nonnegative, the
/// geometric-series oracle otherwise.
Comparison compare(const LaurentPolynomial& p, const LaurentPolynomial& q, const ExponentVector& direction,
                   const std::vector<long>& k_list, const CompareOptions& options = {});

/// Decimal rendering of exp(re log) with the sign/phase of exp(i im log) for
/// real values, e.g. "1.26e+47"; complex values as "re+imi".
std::string format_exp(Complex log_value, int digits = 12);

/// Least-squares slope of log|ratio - 1| against log k.
double error_slope(const std::vector<ComparisonRow>& rows);

}  // namespace amoebas
