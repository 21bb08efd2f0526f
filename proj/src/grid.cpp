#include "bargmann/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "bargmann/error.hpp"
#include "bargmann/parallel.hpp"

namespace bargmann {

RMat standard_complex_structure(int n) {
  RMat j = RMat::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    j(2 * a + 1, 2 * a) = 1.0;
    j(2 * a, 2 * a + 1) = -1.0;
  }
  return j;
}

RMat standard_symplectic(int n) {
  RMat w = RMat::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    w(2 * a, 2 * a + 1) = 1.0;
    w(2 * a + 1, 2 * a) = -1.0;
  }
  return w;
}

RMat realify(const CMat& m) {
  RMat r(2 * m.rows(), 2 * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = m(i, j).real();
      const double b = m(i, j).imag();
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = b;
      r(2 * i + 1, 2 * j + 1) = a;
    }
  }
  return r;
}

BallDomain::BallDomain(int n, int points_per_axis, double radius)
    : n_(n), points_(points_per_axis), radius_(radius) {
  if (n < 1) throw InvalidArgument("BallDomain: complex dimension must be positive");
  if (points_per_axis < 3) throw InvalidArgument("BallDomain: need at least 3 points per axis");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("BallDomain: radius must be positive");
  }
  h_ = 2.0 * radius / (points_per_axis - 1);
  strides_.assign(2 * n, 1);
  count_ = 1;
  for (int axis = 2 * n - 1; axis >= 0; --axis) {
    strides_[axis] = count_;
    count_ *= static_cast<std::size_t>(points_per_axis);
  }
}

RVec BallDomain::node_point(std::size_t node) const {
  RVec u(real_dim());
  for (int axis = 0; axis < real_dim(); ++axis) u[axis] = axis_coordinate(axis_index(node, axis));
  return u;
}

double BallDomain::node_norm_squared(std::size_t node) const {
  double s = 0.0;
  for (int axis = 0; axis < real_dim(); ++axis) {
    const double c = axis_coordinate(axis_index(node, axis));
    s += c * c;
  }
  return s;
}

std::vector<std::size_t> BallDomain::ball_nodes(std::optional<double> r) const {
  const double rr = r.value_or(radius_);
  const double limit = rr * rr * (1.0 + 1e-12) + 1e-300;
  std::vector<std::size_t> out;
  for (std::size_t node = 0; node < count_; ++node) {
    if (node_norm_squared(node) <= limit) out.push_back(node);
  }
  return out;
}

bool BallDomain::stencil_fits(std::size_t node, int reach) const {
  for (int axis = 0; axis < real_dim(); ++axis) {
    const int i = axis_index(node, axis);
    if (i - reach < 0 || i + reach >= points_) return false;
  }
  return true;
}

std::optional<std::size_t> BallDomain::node_at(const RVec& u) const {
  if (u.size() != real_dim()) return std::nullopt;
  std::size_t node = 0;
  for (int axis = 0; axis < real_dim(); ++axis) {
    const double t = (u[axis] + radius_) / h_;
    const double i = std::round(t);
    if (std::abs(t - i) > 1e-9 || i < 0 || i >= points_) return std::nullopt;
    node += static_cast<std::size_t>(i) * strides_[axis];
  }
  return node;
}

bool BallDomain::inside_cube(const RVec& u, double margin) const {
  if (u.size() != real_dim()) return false;
  for (int axis = 0; axis < real_dim(); ++axis) {
    if (std::abs(u[axis]) > radius_ - margin + 1e-12 * radius_) return false;
  }
  return true;
}

bool BallDomain::operator==(const BallDomain& other) const {
  return n_ == other.n_ && points_ == other.points_ && radius_ == other.radius_;
}

GridSection::GridSection(BallDomain domain, std::vector<cplx> values,
                         std::shared_ptr<const ClosedFormSection> form)
    : domain_(std::move(domain)), values_(std::move(values)), form_(std::move(form)) {}

GridSection GridSection::sample(const BallDomain& domain,
                                std::shared_ptr<const ClosedFormSection> form) {
  if (!form || !form->value) throw InvalidArgument("GridSection::sample: missing evaluator");
  if (form->n != domain.complex_dim()) {
    throw DimensionMismatch("GridSection::sample: section and domain dimensions differ");
  }
  std::vector<cplx> values(domain.node_count());
  parallel_for(values.size(), [&](std::size_t node) {
    values[node] = form->value(domain.node_point(node));
  });
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NonFiniteValue("GridSection::sample: evaluator returned a non-finite value");
    }
  }
  return GridSection(domain, std::move(values), std::move(form));
}

GridSection GridSection::from_values(const BallDomain& domain, std::vector<cplx> values) {
  if (values.size() != domain.node_count()) {
    throw DimensionMismatch("GridSection::from_values: wrong number of samples");
  }
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NonFiniteValue("GridSection::from_values: non-finite sample");
    }
  }
  return GridSection(domain, std::move(values), nullptr);
}

cplx GridSection::evaluate(const RVec& u) const {
  if (form_) return form_->value(u);
  const int dim = domain_.real_dim();
  if (u.size() != dim) throw DimensionMismatch("GridSection::evaluate: point dimension");
  if (!domain_.inside_cube(u, 0.0)) {
    throw StencilOutOfDomain("GridSection::evaluate: point outside the sampled cube");
  }
  const int pts = domain_.points_per_axis();
  const double h = domain_.spacing();
  std::vector<int> base(dim);
  std::vector<std::array<double, 4>> weights(dim);
  for (int axis = 0; axis < dim; ++axis) {
    const double t = (u[axis] + domain_.radius()) / h;
    int i0 = static_cast<int>(std::floor(t)) - 1;
    i0 = std::clamp(i0, 0, pts - 4);
    base[axis] = i0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int b = 0; b < 4; ++b) {
        if (b != a) w *= (t - (i0 + b)) / static_cast<double>(a - b);
      }
      weights[axis][a] = w;
    }
  }
  cplx sum = 0.0;
  std::size_t combos = 1;
  for (int axis = 0; axis < dim; ++axis) combos *= 4;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rest = c;
    std::size_t node = 0;
    double w = 1.0;
    for (int axis = 0; axis < dim; ++axis) {
      const int off = static_cast<int>(rest % 4);
      rest /= 4;
      node += static_cast<std::size_t>(base[axis] + off) * domain_.stride(axis);
      w *= weights[axis][off];
    }
    sum += w * values_[node];
  }
  return sum;
}

GridSection difference(const GridSection& a, const GridSection& b) {
  if (!(a.domain() == b.domain())) throw DimensionMismatch("difference: grids differ");
  std::vector<cplx> d(a.values().size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.at(i) - b.at(i);
  return GridSection::from_values(a.domain(), std::move(d));
}

}  // namespace bargmann
