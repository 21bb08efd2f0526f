#pragma once

#include <vector>

#include "bargmann/backends.hpp"

namespace bargmann {

/// sum_j weights[j] theta_{k,j} with
///   theta_{k,j}(x, y) = sum_{m in j/k + Z} exp(-pi k (m + y)^2 + i pi k x (y + 2m)),
/// a holomorphic section of L^k over the square torus in the FlatTorus gauge.
struct ThetaCombination {
  int k = 1;
  std::vector<cplx> weights;
};

ThetaCombination theta_basis(int k, int j);

/// Value and real partials up to second order at (x, y).
struct ThetaJet {
  cplx value;
  cplx dx, dy;
  cplx dxx, dxy, dyy;
};

/// Terms are visited outward from the peak of the Gaussian envelope and the
/// walk stops once the envelope times max |weight| drops below 1e-14 of the
/// running absolute sum.
ThetaJet evaluate_theta(const ThetaCombination& theta, double x, double y);

/// Combination with weights k^{-1/2} sum_l w(sqrt(k) (j/k + l)),
/// w(t) = exp(-pi t^2) Q(t). Its rescaled pullbacks at the origin converge to
/// f(z) exp(-pi |z|^2 / 2) with f(z) = e^{pi z^2 / 2} int Q(t) e^{-2 pi t^2 + 2 pi i t z} dt.
ThetaCombination theta_profile(int k, const std::vector<cplx>& profile);

/// Profile polynomial Q whose limit f equals the given polynomial.
std::vector<cplx> profile_for_limit(const std::vector<cplx>& limit_poly);

/// The limit polynomial f of a profile (inverse of profile_for_limit).
std::vector<cplx> limit_of_profile(const std::vector<cplx>& profile);

/// theta_{k,j} on the n = 1 torus; throws InvalidArgument for j outside [0, k).
SectionFamily theta_section(int k, int j, BackendPtr backend);
SectionFamily theta_combination_section(const ThetaCombination& theta, BackendPtr backend);

/// coeff * A(z_1) B(z_2) on the n = 2 torus.
struct ProductTerm {
  cplx coeff;
  ThetaCombination first;
  ThetaCombination second;
};

/// Sum of products of n = 1 combinations of a common level k.
SectionFamily torus_product_section(const std::vector<ProductTerm>& terms, BackendPtr backend);

/// n = 2 section whose rescaled pullbacks at the origin converge to
/// p(z_1) q(z_2) summed over the given factor pairs, with Gaussian weight.
struct LimitProduct {
  cplx coeff;
  std::vector<cplx> first;
  std::vector<cplx> second;
};
SectionFamily torus_product_for_limit(int k, const std::vector<LimitProduct>& limit,
                                      BackendPtr backend);

}  // namespace bargmann
