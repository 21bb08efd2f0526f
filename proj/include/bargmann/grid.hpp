#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bargmann/types.hpp"

namespace bargmann {

/// Regular lattice on the ball of the given radius in C^n.
///
/// Nodes are stored on the bounding cube [-radius, radius]^{2n} with
/// points_per_axis nodes per real axis, so h = 2 radius / (points_per_axis - 1).
/// The domain proper is the set of nodes with |z| <= radius; the cube nodes
/// outside it only serve as finite-difference padding.
class BallDomain {
 public:
  BallDomain(int n, int points_per_axis, double radius = 1.0);

  int complex_dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  int points_per_axis() const { return points_; }
  double radius() const { return radius_; }
  double spacing() const { return h_; }

  std::size_t node_count() const { return count_; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  int axis_index(std::size_t node, int axis) const {
    return static_cast<int>((node / strides_[axis]) % points_);
  }
  double axis_coordinate(int i) const { return -radius_ + h_ * i; }

  RVec node_point(std::size_t node) const;
  double node_norm_squared(std::size_t node) const;

  /// Nodes with |z| <= r (r defaults to the domain radius), in increasing order.
  std::vector<std::size_t> ball_nodes(std::optional<double> r = std::nullopt) const;

  /// True when every node within `reach` lattice steps along each axis of
  /// `node` exists in the stored cube.
  bool stencil_fits(std::size_t node, int reach) const;

  /// Node whose point coincides with u (within 1e-9 h), if any.
  std::optional<std::size_t> node_at(const RVec& u) const;

  /// True when u lies at least `margin` inside the stored cube on every axis.
  bool inside_cube(const RVec& u, double margin) const;

  bool operator==(const BallDomain& other) const;

 private:
  int n_;
  int points_;
  double radius_;
  double h_;
  std::size_t count_;
  std::vector<std::size_t> strides_;
};

/// Section given by closed-form evaluators in real coordinates.
/// gradient returns the 2n ordinary partials d/du_i (complex valued);
/// hessian the 2n x 2n matrix of second partials. Either may be empty.
struct ClosedFormSection {
  int n = 1;
  std::function<cplx(const RVec&)> value;
  std::function<CVec(const RVec&)> gradient;
  std::function<CMat(const RVec&)> hessian;

  bool has_gradient() const { return static_cast<bool>(gradient); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
};

enum class Representation { closed_form, sampled };

/// Complex samples of a section of the trivial bundle over a BallDomain.
class GridSection {
 public:
  /// Samples `form` at every stored node. Throws NonFiniteValue.
  static GridSection sample(const BallDomain& domain,
                            std::shared_ptr<const ClosedFormSection> form);
  /// Wraps raw samples (one per stored node). Throws NonFiniteValue.
  static GridSection from_values(const BallDomain& domain, std::vector<cplx> values);

  const BallDomain& domain() const { return domain_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx at(std::size_t node) const { return values_[node]; }
  Representation representation() const {
    return form_ ? Representation::closed_form : Representation::sampled;
  }
  const ClosedFormSection* closed_form() const { return form_.get(); }
  std::shared_ptr<const ClosedFormSection> closed_form_ptr() const { return form_; }

  /// Value at an arbitrary point: the closed form when present, otherwise
  /// tensor-product cubic interpolation of the samples.
  cplx evaluate(const RVec& u) const;

  /// Sampled-only copy (drops the evaluator).
  GridSection sampled() const { return from_values(domain_, values_); }

  /// Free-form flags attached by constructors (e.g. "empty coefficient table").
  std::vector<std::string> notes;

 private:
  GridSection(BallDomain domain, std::vector<cplx> values,
              std::shared_ptr<const ClosedFormSection> form);

  BallDomain domain_;
  std::vector<cplx> values_;
  std::shared_ptr<const ClosedFormSection> form_;
};

/// Pointwise a - b on a shared domain (sampled result).
GridSection difference(const GridSection& a, const GridSection& b);

}  // namespace bargmann
