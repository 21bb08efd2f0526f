#include "bargmann/model_bundle.hpp"

#include <algorithm>
#include <cmath>

#include "bargmann/error.hpp"
#include "bargmann/parallel.hpp"

namespace bargmann {

namespace {

void require_finite(cplx v, const char* where) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFiniteValue(where);
}

cplx value_at(const GridSection& s, const RVec& z) {
  if (const auto* f = s.closed_form()) return f->value(z);
  auto node = s.domain().node_at(z);
  if (!node) throw InvalidArgument("sampled section queried away from a grid node");
  return s.at(*node);
}

}  // namespace

cplx ConnectionField::operator()(const RVec& z, const RVec& v) const {
  if (z.size() != 2 * n || v.size() != 2 * n) {
    throw DimensionMismatch("ConnectionField: point/vector dimension mismatch");
  }
  return I * coefficients(z).dot(v);
}

RVec model_connection_coefficients(const RVec& z) {
  RVec a(z.size());
  for (Eigen::Index alpha = 0; alpha < z.size() / 2; ++alpha) {
    a[2 * alpha] = pi * z[2 * alpha + 1];
    a[2 * alpha + 1] = -pi * z[2 * alpha];
  }
  return a;
}

cplx model_connection(const RVec& z, const RVec& v) {
  if (z.size() != v.size() || z.size() % 2 != 0 || z.size() == 0) {
    throw DimensionMismatch("model_connection: z and v must both lie in R^{2n}");
  }
  return I * model_connection_coefficients(z).dot(v);
}

ConnectionField model_connection_field(int n, std::optional<BallDomain> domain) {
  ConnectionField field;
  field.n = n;
  field.coefficients = [](const RVec& z) { return model_connection_coefficients(z); };
  field.jacobian = [n](const RVec&) {
    RMat jac = RMat::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
      jac(2 * a, 2 * a + 1) = pi;
      jac(2 * a + 1, 2 * a) = -pi;
    }
    return jac;
  };
  field.domain = std::move(domain);
  return field;
}

double gaussian_weight(const RVec& u) { return std::exp(-0.5 * pi * u.squaredNorm()); }

CVec ordinary_gradient(const ClosedFormSection& s, const RVec& z, DerivativeMode mode, double step) {
  if (z.size() != 2 * s.n) throw DimensionMismatch("ordinary_gradient: point dimension");
  if (mode == DerivativeMode::analytic) {
    if (!s.has_gradient()) throw InvalidArgument("analytic derivative requested without gradient");
    return s.gradient(z);
  }
  CVec g(2 * s.n);
  RVec p = z;
  for (int i = 0; i < 2 * s.n; ++i) {
    p[i] = z[i] + step;
    const cplx fp = s.value(p);
    p[i] = z[i] - step;
    const cplx fm = s.value(p);
    p[i] = z[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

CVec ordinary_gradient_at_node(const GridSection& s, std::size_t node) {
  const BallDomain& d = s.domain();
  if (!d.stencil_fits(node, 1)) throw StencilOutOfDomain("finite-difference stencil exits the grid");
  CVec g(d.real_dim());
  for (int i = 0; i < d.real_dim(); ++i) {
    g[i] = (s.at(node + d.stride(i)) - s.at(node - d.stride(i))) / (2.0 * d.spacing());
  }
  return g;
}

CVec ordinary_gradient(const GridSection& s, const RVec& z, DerivativeMode mode) {
  const BallDomain& d = s.domain();
  if (z.size() != d.real_dim()) throw DimensionMismatch("ordinary_gradient: point dimension");
  CVec g;
  if (mode == DerivativeMode::analytic) {
    const auto* f = s.closed_form();
    if (!f || !f->has_gradient()) {
      throw InvalidArgument("analytic derivative requested for a section without a gradient");
    }
    g = f->gradient(z);
  } else if (const auto* f = s.closed_form()) {
    if (!d.inside_cube(z, d.spacing())) {
      throw StencilOutOfDomain("finite-difference stencil exits the grid");
    }
    g = ordinary_gradient(*f, z, mode, d.spacing());
  } else {
    auto node = d.node_at(z);
    if (!node) throw InvalidArgument("sampled section differentiated away from a grid node");
    g = ordinary_gradient_at_node(s, *node);
  }
  for (Eigen::Index i = 0; i < g.size(); ++i) require_finite(g[i], "ordinary_gradient: non-finite");
  return g;
}

CVec covariant_gradient(const GridSection& s, const RVec& z, DerivativeMode mode,
                        const ConnectionField* connection) {
  const int n = s.domain().complex_dim();
  const RVec a = connection ? connection->coefficients(z) : model_connection_coefficients(z);
  if (a.size() != 2 * n) throw DimensionMismatch("covariant_gradient: connection dimension");
  CVec g = ordinary_gradient(s, z, mode);
  const cplx v = value_at(s, z);
  require_finite(v, "covariant_gradient: non-finite value");
  for (int i = 0; i < 2 * n; ++i) g[i] += I * a[i] * v;
  return g;
}

CVec covariant_gradient(const ClosedFormSection& s, const RVec& z, DerivativeMode mode, double step,
                        const ConnectionField& connection) {
  CVec g = ordinary_gradient(s, z, mode, step);
  const RVec a = connection.coefficients(z);
  const cplx v = s.value(z);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += I * a[i] * v;
  return g;
}

cplx covariant_derivative(const GridSection& s, const RVec& z, const RVec& v, DerivativeMode mode,
                          const ConnectionField* connection) {
  if (v.size() != z.size()) throw DimensionMismatch("covariant_derivative: tangent dimension");
  const CVec g = covariant_gradient(s, z, mode, connection);
  cplx out = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) out += v[i] * g[i];
  return out;
}

CVec dbar_from_covariant(const CVec& grad) {
  CVec d(grad.size() / 2);
  for (Eigen::Index a = 0; a < d.size(); ++a) d[a] = 0.5 * (grad[2 * a] + I * grad[2 * a + 1]);
  return d;
}

CVec dbar_operator(const GridSection& s, const RVec& z, DerivativeMode mode,
                   const ConnectionField* connection) {
  return dbar_from_covariant(covariant_gradient(s, z, mode, connection));
}

CVec ordinary_dbar(const GridSection& s, const RVec& z, DerivativeMode mode) {
  return dbar_from_covariant(ordinary_gradient(s, z, mode));
}

GridSection unweight(const GridSection& s) {
  const BallDomain& d = s.domain();
  if (const auto* f = s.closed_form()) {
    auto base = s.closed_form_ptr();
    auto out = std::make_shared<ClosedFormSection>();
    out->n = f->n;
    out->value = [base](const RVec& u) {
      return base->value(u) * std::exp(0.5 * pi * u.squaredNorm());
    };
    if (f->has_gradient()) {
      out->gradient = [base](const RVec& u) {
        const double w = std::exp(0.5 * pi * u.squaredNorm());
        const cplx v = base->value(u);
        CVec g = base->gradient(u);
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = (g[i] + pi * u[i] * v) * w;
        return g;
      };
    }
    if (f->has_gradient() && f->has_hessian()) {
      out->hessian = [base](const RVec& u) {
        const double w = std::exp(0.5 * pi * u.squaredNorm());
        const cplx v = base->value(u);
        const CVec g = base->gradient(u);
        CMat h = base->hessian(u);
        const Eigen::Index m = u.size();
        for (Eigen::Index i = 0; i < m; ++i) {
          for (Eigen::Index j = 0; j < m; ++j) {
            h(i, j) += pi * (u[j] * g[i] + u[i] * g[j]) +
                       v * (pi * pi * u[i] * u[j] + (i == j ? pi : 0.0));
            h(i, j) *= w;
          }
        }
        return h;
      };
    }
    GridSection result = GridSection::sample(d, out);
    result.notes = s.notes;
    return result;
  }
  std::vector<cplx> values(s.values().size());
  for (std::size_t node = 0; node < values.size(); ++node) {
    values[node] = s.at(node) * std::exp(0.5 * pi * d.node_norm_squared(node));
  }
  GridSection result = GridSection::from_values(d, std::move(values));
  result.notes = s.notes;
  return result;
}

std::shared_ptr<const ClosedFormSection> gaussian_polynomial_form(const PolyTable& poly) {
  auto p = std::make_shared<PolyTable>(poly);
  auto form = std::make_shared<ClosedFormSection>();
  form->n = poly.complex_dim();
  form->value = [p](const RVec& u) { return p->value(u) * gaussian_weight(u); };
  form->gradient = [p](const RVec& u) {
    const double w = gaussian_weight(u);
    const cplx v = p->value(u);
    CVec g = p->gradient(u);
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = (g[i] - pi * u[i] * v) * w;
    return g;
  };
  form->hessian = [p](const RVec& u) {
    const double w = gaussian_weight(u);
    const cplx v = p->value(u);
    const CVec g = p->gradient(u);
    CMat h = p->hessian(u);
    const Eigen::Index m = u.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        h(i, j) += -pi * (u[j] * g[i] + u[i] * g[j]) +
                   v * (pi * pi * u[i] * u[j] - (i == j ? pi : 0.0));
        h(i, j) *= w;
      }
    }
    return h;
  };
  return form;
}

GridSection polynomial_section(const PolyTable& poly, const BallDomain& domain) {
  if (poly.complex_dim() != domain.complex_dim()) {
    throw DimensionMismatch("polynomial_section: table and domain dimensions differ");
  }
  GridSection s = GridSection::sample(domain, gaussian_polynomial_form(poly));
  if (poly.empty()) s.notes.emplace_back("empty coefficient table");
  return s;
}

GridSection bargmann_section(const PolyTable& poly, const BallDomain& domain) {
  if (!poly.holomorphic()) {
    throw InvalidArgument("bargmann_section: coefficient table has conjugate powers");
  }
  return polynomial_section(poly, domain);
}

CMat curvature_of(const ConnectionField& connection, const RVec& z, DerivativeMode mode, double step) {
  const int m = 2 * connection.n;
  if (z.size() != m) throw DimensionMismatch("curvature_of: point dimension");
  RMat jac(m, m);
  if (mode == DerivativeMode::analytic) {
    if (!connection.jacobian) throw InvalidArgument("curvature_of: no analytic jacobian");
    jac = connection.jacobian(z);
  } else {
    if (connection.domain && !connection.domain->inside_cube(z, 2.0 * step)) {
      throw StencilOutOfDomain("curvature_of: stencil exits the domain");
    }
    RVec p = z;
    for (int i = 0; i < m; ++i) {
      p[i] = z[i] + step;
      const RVec ap = connection.coefficients(p);
      p[i] = z[i] - step;
      const RVec am = connection.coefficients(p);
      p[i] = z[i];
      jac.col(i) = (ap - am) / (2.0 * step);
    }
  }
  CMat f(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) f(i, j) = I * (jac(j, i) - jac(i, j));
  }
  return f;
}

double radial_flatness_defect(const ConnectionField& connection) {
  if (!connection.domain) throw InvalidArgument("radial_flatness_defect: connection has no domain");
  const BallDomain& d = *connection.domain;
  const auto nodes = d.ball_nodes();
  std::vector<double> defect(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const RVec z = d.node_point(nodes[k]);
    defect[k] = std::abs(connection.coefficients(z).dot(z));
  });
  double sup = 0.0;
  for (double v : defect) sup = std::max(sup, v);
  return sup;
}

}  // namespace bargmann
