#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the diagnostics module.

#include <functional>
#include <memory>
#include <vector>

#include "bargmann/backends.hpp"
#include "bargmann/diagnostics.hpp"
#include "bargmann/grid.hpp"

namespace support {

using bargmann::cplx;
using bargmann::RVec;

/// Winding number of f along the counter-clockwise boundary of the square
/// [x0, x0 + side] x [y0, y0 + side], from summed principal phase increments.
double winding_number(const std::function<cplx(double, double)>& f, double x0, double y0, double side,
                      int samples_per_edge);

/// Zeros of theta_{k,j} inside the unit square counted by winding.
int theta_zero_count(int k, int j);

/// Two-sided Hausdorff distance between the locus points and
/// {z_1 = 0} intersected with the ball of radius r (n = 2), the latter sampled
/// on a polar grid with the given spacing.
struct Hausdorff {
  double locus_to_set = 0.0;
  double set_to_locus = 0.0;
  double value() const { return locus_to_set > set_to_locus ? locus_to_set : set_to_locus; }
};
Hausdorff hausdorff_to_z2_plane(const std::vector<RVec>& points, double r, double spacing);

/// (u0^2 + u1^2 + u2^2 - R^2) + i u3 on C^2, with exact gradient and Hessian
/// (hessian omitted when with_hessian is false). Zero set: a round 2-sphere.
std::shared_ptr<const bargmann::ClosedFormSection> sphere_section(double radius, bool with_hessian);

/// max over pairs of |a - b| on the values of two sections on a shared grid.
double sup_difference(const bargmann::GridSection& a, const bargmann::GridSection& b);

}  // namespace support
