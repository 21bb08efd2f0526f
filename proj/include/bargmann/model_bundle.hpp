#pragma once

#include <functional>
#include <optional>

#include "bargmann/grid.hpp"
#include "bargmann/polynomial.hpp"
#include "bargmann/types.hpp"

namespace bargmann {

enum class DerivativeMode { analytic, finite_difference };

/// Unitary connection on the trivial line bundle, A(z)(v) = i a(z).v.
///
/// Storing the real coefficient vector a(z) keeps A purely imaginary and
/// linear in v by construction. `jacobian(z)(j, i)` is d a_j / d u_i and is
/// optional; without it only finite-difference curvature is available.
struct ConnectionField {
  int n = 1;
  std::function<RVec(const RVec&)> coefficients;
  std::function<RMat(const RVec&)> jacobian;
  std::optional<BallDomain> domain;

  cplx operator()(const RVec& z, const RVec& v) const;
};

/// -i pi sum_a (x_a v_{y_a} - y_a v_{x_a}). Throws DimensionMismatch.
cplx model_connection(const RVec& z, const RVec& v);
RVec model_connection_coefficients(const RVec& z);
ConnectionField model_connection_field(int n, std::optional<BallDomain> domain = std::nullopt);

/// exp(-pi |z|^2 / 2), the basic model-holomorphic section.
double gaussian_weight(const RVec& u);

// Derivatives ---------------------------------------------------------------
//
// Analytic mode uses the closed-form gradient. Finite-difference mode uses
// centered second-order differences: on the closed-form evaluator with the
// domain spacing h when one exists, otherwise on the grid samples (z must then
// be a grid node). Stencils must stay inside the stored cube.

CVec ordinary_gradient(const GridSection& s, const RVec& z, DerivativeMode mode);
CVec ordinary_gradient(const ClosedFormSection& s, const RVec& z, DerivativeMode mode, double step);
/// Centered differences of grid samples at a node; requires a one-node margin.
CVec ordinary_gradient_at_node(const GridSection& s, std::size_t node);

/// Components nabla_{e_i} s for all 2n coordinate directions.
/// A defaults to the model connection.
CVec covariant_gradient(const GridSection& s, const RVec& z, DerivativeMode mode,
                        const ConnectionField* connection = nullptr);
CVec covariant_gradient(const ClosedFormSection& s, const RVec& z, DerivativeMode mode, double step,
                        const ConnectionField& connection);

cplx covariant_derivative(const GridSection& s, const RVec& z, const RVec& v, DerivativeMode mode,
                          const ConnectionField* connection = nullptr);

/// Components 1/2 (nabla_{x_a} + i nabla_{y_a}) s, a = 1..n.
CVec dbar_operator(const GridSection& s, const RVec& z, DerivativeMode mode,
                   const ConnectionField* connection = nullptr);
CVec dbar_from_covariant(const CVec& covariant_gradient);

/// Connectionless 1/2 (d/dx_a + i d/dy_a) s.
CVec ordinary_dbar(const GridSection& s, const RVec& z, DerivativeMode mode);

/// s * exp(+pi |z|^2 / 2). Closed forms keep analytic derivatives.
GridSection unweight(const GridSection& s);

/// p(z, conj z) * exp(-pi |z|^2 / 2) as a closed form with analytic
/// gradient and Hessian.
std::shared_ptr<const ClosedFormSection> gaussian_polynomial_form(const PolyTable& poly);

/// Model-holomorphic section p(z) exp(-pi |z|^2 / 2). An empty table yields
/// the zero section with the note "empty coefficient table". Throws
/// InvalidArgument when the table has conjugate powers.
GridSection bargmann_section(const PolyTable& poly, const BallDomain& domain);

/// Same construction without the holomorphy requirement.
GridSection polynomial_section(const PolyTable& poly, const BallDomain& domain);

/// Curvature 2-form dA as an antisymmetric complex table F(i, j) = F(e_i, e_j).
/// Finite-difference mode requires z at least 2 step from the domain cube
/// boundary when the field carries a domain.
CMat curvature_of(const ConnectionField& connection, const RVec& z, DerivativeMode mode, double step);

/// sup over ball nodes of |A(z)(z)|. Requires a domain on the field.
double radial_flatness_defect(const ConnectionField& connection);

}  // namespace bargmann
