#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace bargmann {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Points of C^n are stored as real 2n-vectors with interleaved coordinates
// (x_1, y_1, ..., x_n, y_n); z_a = x_a + i y_a. J maps d/dx_a to d/dy_a.

inline cplx complex_coordinate(const RVec& u, int alpha) {
  return {u[2 * alpha], u[2 * alpha + 1]};
}

inline RVec real_point(const CVec& z) {
  RVec u(2 * z.size());
  for (Eigen::Index a = 0; a < z.size(); ++a) {
    u[2 * a] = z[a].real();
    u[2 * a + 1] = z[a].imag();
  }
  return u;
}

inline CVec complex_point(const RVec& u) {
  CVec z(u.size() / 2);
  for (Eigen::Index a = 0; a < z.size(); ++a) z[a] = {u[2 * a], u[2 * a + 1]};
  return z;
}

/// Matrix of J on R^{2n}: J e_{x_a} = e_{y_a}, J e_{y_a} = -e_{x_a}.
RMat standard_complex_structure(int n);

/// Matrix of sum_a dx_a ^ dy_a, i.e. omega(u, v) = u^T W v.
RMat standard_symplectic(int n);

/// Real 2n x 2n matrix of a complex-linear map C^n -> C^n.
RMat realify(const CMat& m);

}  // namespace bargmann
