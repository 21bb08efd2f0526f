#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bargmann/grid.hpp"
#include "bargmann/model_bundle.hpp"

namespace bargmann {

using MatrixField = std::function<RMat(const RVec&)>;

// C^m seminorms ---------------------------------------------------------------
//
// Max over ball nodes with |z| <= r of every mixed difference quotient of order
// <= m (tensor products of 1D centered stencils on the grid samples). Throws
// StencilOutOfDomain unless r + m h <= grid radius.

double cm_norm(const GridSection& field, int m, double r);
/// Entrywise seminorm of a matrix-valued field sampled on the grid nodes.
double cm_norm(const MatrixField& field, const BallDomain& grid, int m, double r);

/// sup over ball nodes with |z| <= r of |dbar s| (Euclidean norm of the n
/// components). Finite-difference mode uses the grid samples.
double dbar_defect(const GridSection& s, double r, DerivativeMode mode,
                   const ConnectionField* connection = nullptr);

/// Analytic when the section carries a closed-form gradient.
DerivativeMode preferred_mode(const GridSection& s);

/// Real 2 x 2n matrix (rows Re, Im) of the covariant differential at z.
RMat real_differential(const GridSection& s, const RVec& z, DerivativeMode mode,
                       const ConnectionField* connection = nullptr);

double smallest_singular_value(const RMat& m);

struct TransversalityResult {
  double eta = std::numeric_limits<double>::infinity();
  bool empty = true;  ///< no node with |sigma| <= epsilon
  double epsilon = 0.0;
  std::size_t near_zero_nodes = 0;
};

/// Ball nodes whose derivative stencil fits are scanned.
TransversalityResult transversality_margin(const GridSection& s, double epsilon, DerivativeMode mode,
                                           const ConnectionField* connection = nullptr);
TransversalityResult transversality_margin(const GridSection& s, double epsilon);
/// 0.1 max |sigma| over ball nodes.
double default_epsilon(const GridSection& s);

struct ZeroLocus {
  int n = 1;
  double spacing = 0.0;
  std::vector<RVec> points;
  std::vector<RMat> tangents;  ///< 2n x (2n - 2) orthonormal columns; empty when degenerate
  std::vector<double> residuals;
  std::vector<bool> degenerate;
  std::size_t seeds = 0;
  std::size_t converged = 0;
  std::size_t nonconvergent = 0;  ///< dropped seeds
  std::size_t trimmed = 0;        ///< seed cells within 2h of the boundary

  double converged_fraction() const {
    return seeds == 0 ? 1.0 : static_cast<double>(converged) / static_cast<double>(seeds);
  }
};

struct ZeroLocusOptions {
  double tolerance = 1e-10;  ///< residual relative to max |sigma| over ball nodes
  int max_iterations = 50;
  const ConnectionField* connection = nullptr;
};

/// Seeds are grid cells on which Re and Im both change sign; each is refined
/// by damped Gauss-Newton on |sigma|^2 with backtracking.
ZeroLocus zero_locus(const GridSection& s, const ZeroLocusOptions& options = {});

struct MarginResult {
  double value = 0.0;
  bool trivial = false;  ///< n = 1: nothing to compute, reported as passing
  std::size_t excluded = 0;
};

/// Smallest singular value of omega restricted to each tangent space.
MarginResult symplectic_margin(const ZeroLocus& locus, const MatrixField& omega);
MarginResult symplectic_margin(const ZeroLocus& locus);

/// sup |K| of the zero set over locus points and pairs of tangent basis vectors,
/// using the flat chart metric and the Gauss equation. The Hessian comes from
/// the closed form when present, else from differences of the evaluator.
MarginResult curvature_estimate(const ZeroLocus& locus, const GridSection& s);

/// One record per (experiment, k); every number is tagged with the grid it
/// was computed on.
struct DiagnosticsRecord {
  std::string experiment;
  int k = 0;
  int points_per_axis = 0;
  double radius = 0.0;
  double spacing = 0.0;
  std::map<std::string, double> values;
  std::map<std::string, double> tolerances;
  std::vector<std::string> flags;
};

struct DiagnosticsReport {
  std::vector<DiagnosticsRecord> records;
  bool all_finite() const;
};

}  // namespace bargmann
