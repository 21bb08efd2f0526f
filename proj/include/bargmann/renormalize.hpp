#pragma once

#include <functional>
#include <vector>

#include "bargmann/backends.hpp"
#include "bargmann/grid.hpp"
#include "bargmann/model_bundle.hpp"

namespace bargmann {

/// Chart z -> exp_p(L z) for the metric g_k = k g, with L = E(p) U / sqrt(k),
/// E the backend's unitary frame at p and U a unitary matrix on C^n.
struct Chart {
  BackendPtr backend;
  RVec center;
  int k = 1;
  CMat frame;
  RMat linear;  ///< L as a real 2n x 2n matrix

  int complex_dim() const { return backend->complex_dim(); }
  RVec point(const RVec& z) const;
  /// Velocity of t -> point(t z) at time t.
  RVec velocity(const RVec& z, double t) const;
  RMat differential(const RVec& z) const;
};

/// Throws InvalidArgument for k < 1 or a non-unitary frame, AtlasCoverage for a
/// center outside the backend chart. An empty frame means the identity.
Chart build_chart(BackendPtr backend, const RVec& center, int k, const CMat& frame = CMat());

/// Fiber coordinates of the radially parallel frame: values[node] transports
/// the unit frame of L^k from the center to chart(z_node) along t -> chart(t z).
struct RadialGauge {
  Chart chart;
  BallDomain domain;
  std::vector<cplx> values;
  int steps = 1;  ///< RK4 steps per ray (same for every z); step <= h and <= 0.05 rad of phase
  double max_modulus_drift = 0.0;

  /// Transport to an arbitrary chart point, with the same step count.
  cplx at(const RVec& z) const;
};

/// Throws InvalidArgument when the grid radius exceeds 1 and AtlasCoverage when
/// a ray leaves the backend chart. Flat backends use the exact exponential.
RadialGauge radial_gauge(const Chart& chart, const BallDomain& grid);

/// sigma(z) = s(chart(z)) / tau(z). Flat backends keep analytic gradient and
/// Hessian; curved ones expose the value only.
GridSection renormalize_section(const SectionFamily& family, const Chart& chart,
                                const RadialGauge& gauge, const BallDomain& grid);

/// build_chart + radial_gauge + renormalize_section.
GridSection renormalize(const SectionFamily& family, const RVec& center, const BallDomain& grid,
                        const CMat& frame = CMat());

struct StructureDeviation {
  double c0 = 0.0;
  double c1 = 0.0;
};

/// Pulled-back g_k, omega_k and J in chart coordinates with their deviations
/// from the standard flat structure on nodes of the subball of radius r.
/// C^1 uses centered differences of step h and includes the C^0 part.
struct StructurePullback {
  std::function<RMat(const RVec&)> metric;
  std::function<RMat(const RVec&)> omega;
  std::function<RMat(const RVec&)> complex_structure;
  StructureDeviation metric_deviation;
  StructureDeviation omega_deviation;
  StructureDeviation j_deviation;
  double subball_radius = 0.0;
};

StructurePullback pullback_structure(const Chart& chart, const BallDomain& grid, double subball_radius);

struct ConnectionPullback {
  ConnectionField field;
  double deviation = 0.0;      ///< sup over ball nodes of |a - a_model|
  double radial_defect = 0.0;  ///< sup over ball nodes of |a(z).z|
};

/// Gauged pullback a(z) = D chart(z)^T k a(chart(z)) + grad arg tau(z).
ConnectionPullback pullback_connection(const Chart& chart, const RadialGauge& gauge,
                                       const BallDomain& grid);

struct LimitCandidate {
  GridSection candidate;
  std::vector<int> ladder;
  std::vector<double> distances;  ///< C^m distance between rungs i and i+1
  int order = 1;
  double subball_radius = 0.0;
  bool cauchy = true;  ///< distances strictly decreasing
};

/// Throws InvalidArgument for fewer than 3 rungs, m outside [0, 3] or a
/// subball not inside the grid, and DimensionMismatch when grids differ.
LimitCandidate limit_extract(const std::vector<GridSection>& sections, const std::vector<int>& ladder,
                             int order, double subball_radius);

}  // namespace bargmann
