#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bargmann/grid.hpp"
#include "bargmann/model_bundle.hpp"
#include "bargmann/types.hpp"

namespace bargmann {

struct GeodesicState {
  RVec position;
  RVec velocity;
};

/// A Kahler manifold with a prequantum line bundle L, presented in one local
/// coordinate chart (the universal cover for tori, an affine chart for CP^1).
///
/// The connection of L is given in a declared unitary gauge as real
/// coefficients a(p), A = i a(p).v, and must have curvature -2 pi i omega.
/// L^k carries k a(p).
class PrequantizedKahler {
 public:
  virtual ~PrequantizedKahler() = default;

  virtual std::string name() const = 0;
  virtual int complex_dim() const = 0;

  virtual RMat metric(const RVec& p) const = 0;
  virtual RMat symplectic_form(const RVec& p) const = 0;
  virtual RMat complex_structure(const RVec& p) const = 0;

  virtual RVec connection_coefficients(const RVec& p) const = 0;
  /// (j, i) entry is d a_j / d u_i.
  virtual RMat connection_jacobian(const RVec& p) const = 0;

  /// Christoffel symbols; element k is the matrix Gamma^k_{ij}.
  virtual std::vector<RMat> christoffel(const RVec& p) const = 0;

  /// Closed-form geodesic of g: position and velocity at time t of the
  /// geodesic through p with initial velocity v.
  virtual GeodesicState geodesic(const RVec& p, const RVec& v, double t) const = 0;

  /// Differential of v -> exp_p(v). Default: fourth-order differences.
  virtual RMat exp_differential(const RVec& p, const RVec& v) const;

  /// Real 2n x 2n frame that is g-orthonormal and commutes with J at p.
  virtual RMat unitary_frame(const RVec& p) const = 0;

  virtual bool in_atlas(const RVec& p) const = 0;

  /// Affine geodesics and connection coefficients linear in p.
  virtual bool is_flat() const { return false; }

  virtual double total_area() const = 0;

  /// Connection of L^k in the declared gauge.
  ConnectionField connection(int k) const;
};

using BackendPtr = std::shared_ptr<const PrequantizedKahler>;

/// C^n / (Z^n + i Z^n) with the flat metric, omega = sum dx ^ dy and the gauge
/// A_k = -i pi k sum (x dy - y dx) on the universal cover.
class FlatTorus final : public PrequantizedKahler {
 public:
  explicit FlatTorus(int n);

  std::string name() const override { return "torus"; }
  int complex_dim() const override { return n_; }
  RMat metric(const RVec& p) const override;
  RMat symplectic_form(const RVec& p) const override;
  RMat complex_structure(const RVec& p) const override;
  RVec connection_coefficients(const RVec& p) const override;
  RMat connection_jacobian(const RVec& p) const override;
  std::vector<RMat> christoffel(const RVec& p) const override;
  GeodesicState geodesic(const RVec& p, const RVec& v, double t) const override;
  RMat exp_differential(const RVec& p, const RVec& v) const override;
  RMat unitary_frame(const RVec& p) const override;
  bool in_atlas(const RVec& p) const override;
  bool is_flat() const override { return true; }
  double total_area() const override { return 1.0; }

  /// Multiplier g_lambda(z) with s(z + lambda) = g_lambda(z) s(z) for sections
  /// of L^k; lambda is an integer vector in the interleaved layout.
  cplx multiplier(int k, const std::vector<int>& lambda, const RVec& z) const;

  /// Representative of p in the fundamental domain [0,1)^{2n}.
  RVec wrap(const RVec& p) const;

 private:
  int n_;
};

/// CP^1 with the Fubini-Study metric scaled to total area 1, in the affine
/// chart w (the opposite chart is u = 1/w). omega = dx ^ dy / (pi (1+|w|^2)^2),
/// gauge for O(1): A = -i (x dy - y dx) / (1 + |w|^2) in the unit frame.
class FubiniStudyLine final : public PrequantizedKahler {
 public:
  /// Points of the w-chart with |w| <= chart_limit are covered (the opposite
  /// pole is kept at distance >= 1/chart_limit in the u-chart).
  explicit FubiniStudyLine(double chart_limit = 5.0);

  std::string name() const override { return "cp1"; }
  int complex_dim() const override { return 1; }
  RMat metric(const RVec& p) const override;
  RMat symplectic_form(const RVec& p) const override;
  RMat complex_structure(const RVec& p) const override;
  RVec connection_coefficients(const RVec& p) const override;
  RMat connection_jacobian(const RVec& p) const override;
  std::vector<RMat> christoffel(const RVec& p) const override;
  GeodesicState geodesic(const RVec& p, const RVec& v, double t) const override;
  RMat unitary_frame(const RVec& p) const override;
  bool in_atlas(const RVec& p) const override;
  double total_area() const override { return 1.0; }

  /// Radius of the round sphere of area 1.
  static double sphere_radius();
  /// Conformal factor c(w) with g = c(w) |dw|^2.
  static double conformal_factor(const RVec& p);

  /// Coordinates in the opposite chart u = 1/w.
  static RVec to_opposite_chart(const RVec& w);
  /// Transition for O(k) sections between unit frames: s_u = s_w (conj(w)/|w|)^k.
  static cplx transition(int k, const RVec& w);

 private:
  double chart_limit_;
};

BackendPtr torus_backend(int n);
BackendPtr cp1_backend();

/// Geodesic of g by fixed-step RK4 on the Christoffel ODE.
/// Throws IntegrationFailure on non-finite state or steps < 1.
GeodesicState integrate_geodesic(const PrequantizedKahler& backend, const RVec& p, const RVec& v,
                                 double t, int steps);

// Parallel transport -------------------------------------------------------

/// Piecewise-smooth curve; each piece maps t in [0,1] to (position, velocity).
struct Path {
  struct Piece {
    std::function<GeodesicState(double)> state;
    double length_hint = 1.0;
  };
  std::vector<Piece> pieces;

  static Path segment(const RVec& a, const RVec& b);
  static Path polyline(const std::vector<RVec>& points);
  static Path constant(const RVec& p);
  /// Counter-clockwise square of side eps in the (x_a, y_a) plane with the
  /// given lower-left corner.
  static Path square_loop(const RVec& corner, double eps, int alpha = 0);
  Path reversed() const;
};

struct TransportResult {
  cplx value;            ///< unit-modulus fiber coordinate after renormalization
  double modulus_drift;  ///< | |raw| - 1 | before renormalization
};

/// Solves dc/dt = -A_k(gamma'(t)) c, c(0) = 1, with fixed-step RK4 using
/// steps of parameter length <= max_step per piece (scaled by length_hint).
/// Throws AtlasCoverage if the path leaves the backend chart.
TransportResult parallel_transport(const PrequantizedKahler& backend, int k, const Path& path,
                                   double max_step = 1e-2);

// Section families ---------------------------------------------------------

/// A section s_k of L^k in the backend's declared gauge.
struct SectionFamily {
  BackendPtr backend;
  int k = 1;
  std::string label;
  std::shared_ptr<const ClosedFormSection> section;

  cplx operator()(const RVec& p) const { return section->value(p); }
};

/// Section of O(k) on CP^1: P(w) / (1 + |w|^2)^{k/2}, coefficients in
/// increasing degree. Throws InvalidArgument when deg P > k.
SectionFamily cp1_section(int k, const std::vector<cplx>& coeffs, BackendPtr backend);

/// Coefficients of P_k(w) = p(w sqrt(k / pi)); the rescaled pullbacks at the
/// chart origin then converge to p(z) exp(-pi |z|^2 / 2).
std::vector<cplx> cp1_coefficients_for_limit(int k, const std::vector<cplx>& limit_poly);

/// The same section in the opposite chart u = 1/w, i.e. Q(u)/(1+|u|^2)^{k/2}
/// with Q(u) = u^k P(1/u).
cplx cp1_section_opposite_chart(int k, const std::vector<cplx>& coeffs, const RVec& u);

}  // namespace bargmann
