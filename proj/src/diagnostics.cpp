#include "bargmann/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "bargmann/error.hpp"
#include "bargmann/parallel.hpp"

namespace bargmann {

namespace {

struct Stencil {
  std::vector<std::pair<std::ptrdiff_t, double>> taps;
};

// 1D centered stencils as (offset, weight) for derivative orders 0..3.
std::vector<std::pair<int, double>> stencil_1d(int order, double h) {
  switch (order) {
    case 0: return {{0, 1.0}};
    case 1: return {{-1, -0.5 / h}, {1, 0.5 / h}};
    case 2: return {{-1, 1.0 / (h * h)}, {0, -2.0 / (h * h)}, {1, 1.0 / (h * h)}};
    default: {
      const double c = 0.5 / (h * h * h);
      return {{-2, -c}, {-1, 2.0 * c}, {1, -2.0 * c}, {2, c}};
    }
  }
}

void multi_indices(int axes, int budget, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == axes) {
    out.push_back(cur);
    return;
  }
  for (int o = 0; o <= budget; ++o) {
    cur.push_back(o);
    multi_indices(axes, budget - o, cur, out);
    cur.pop_back();
  }
}

std::vector<Stencil> build_stencils(const BallDomain& d, int m) {
  std::vector<std::vector<int>> alphas;
  std::vector<int> cur;
  multi_indices(d.real_dim(), m, cur, alphas);
  std::vector<Stencil> out;
  for (const auto& alpha : alphas) {
    Stencil st{{{0, 1.0}}};
    for (int axis = 0; axis < d.real_dim(); ++axis) {
      if (alpha[axis] == 0) continue;
      const auto taps = stencil_1d(alpha[axis], d.spacing());
      Stencil next;
      for (const auto& [off, w] : st.taps) {
        for (const auto& [o, c] : taps) {
          next.taps.emplace_back(off + static_cast<std::ptrdiff_t>(o) * static_cast<std::ptrdiff_t>(d.stride(axis)),
                                 w * c);
        }
      }
      st = std::move(next);
    }
    out.push_back(std::move(st));
  }
  return out;
}

void check_subball(const BallDomain& d, int m, double r) {
  if (m < 0 || m > 3) throw InvalidArgument("cm_norm: order must lie in [0, 3]");
  if (!(r >= 0.0)) throw InvalidArgument("cm_norm: negative radius");
  if (r + m * d.spacing() > d.radius() + 1e-12) {
    throw StencilOutOfDomain("cm_norm: subball radius + m h exceeds the grid radius");
  }
}

// components[c][node]: samples of each scalar component on the stored nodes.
double cm_core(const BallDomain& d, int m, double r, const std::vector<const std::vector<cplx>*>& components) {
  const auto stencils = build_stencils(d, m);
  const int reach = m >= 3 ? 2 : (m >= 1 ? 1 : 0);
  const auto nodes = d.ball_nodes(r);
  std::vector<double> local(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const std::size_t node = nodes[i];
    if (!d.stencil_fits(node, reach)) throw StencilOutOfDomain("cm_norm: stencil exits the grid");
    double best = 0.0;
    for (const auto* comp : components) {
      for (const auto& st : stencils) {
        cplx acc = 0.0;
        for (const auto& [off, w] : st.taps) {
          acc += w * (*comp)[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + off)];
        }
        best = std::max(best, std::abs(acc));
      }
    }
    local[i] = best;
  });
  double sup = 0.0;
  for (double v : local) sup = std::max(sup, v);
  if (!std::isfinite(sup)) throw NonFiniteValue("cm_norm: non-finite samples in the stencil range");
  return sup;
}

CVec gradient_at(const GridSection& s, const RVec& u) {
  const auto* f = s.closed_form();
  if (f && f->has_gradient()) return f->gradient(u);
  const double delta = 1e-3 * s.domain().spacing();
  CVec g(u.size());
  RVec p = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    p[i] = u[i] + delta;
    const cplx fp = s.evaluate(p);
    p[i] = u[i] - delta;
    const cplx fm = s.evaluate(p);
    p[i] = u[i];
    g[i] = (fp - fm) / (2.0 * delta);
  }
  return g;
}

CMat hessian_at(const GridSection& s, const RVec& u) {
  const auto* f = s.closed_form();
  if (f && f->has_hessian()) return f->hessian(u);
  const BallDomain& d = s.domain();
  const double h = d.spacing();
  if (!d.inside_cube(u, h)) throw StencilOutOfDomain("curvature_estimate: Hessian stencil exits the grid");
  const Eigen::Index m = u.size();
  CMat hess(m, m);
  RVec p = u;
  if (f && f->has_gradient()) {
    for (Eigen::Index j = 0; j < m; ++j) {
      p[j] = u[j] + h;
      const CVec gp = f->gradient(p);
      p[j] = u[j] - h;
      const CVec gm = f->gradient(p);
      p[j] = u[j];
      hess.col(j) = (gp - gm) / (2.0 * h);
    }
    return CMat(0.5 * (hess + hess.transpose()));
  }
  const cplx f0 = s.evaluate(u);
  for (Eigen::Index i = 0; i < m; ++i) {
    p[i] = u[i] + h;
    const cplx fp = s.evaluate(p);
    p[i] = u[i] - h;
    const cplx fm = s.evaluate(p);
    p[i] = u[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      auto at = [&](double si, double sj) {
        p[i] = u[i] + si * h;
        p[j] = u[j] + sj * h;
        const cplx v = s.evaluate(p);
        p[i] = u[i];
        p[j] = u[j];
        return v;
      };
      hess(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
      hess(j, i) = hess(i, j);
    }
  }
  return hess;
}

RMat stack_real(const CVec& g) {
  RMat m(2, g.size());
  m.row(0) = g.real().transpose();
  m.row(1) = g.imag().transpose();
  return m;
}

RMat covariant_real_at(const GridSection& s, const RVec& u, const ConnectionField* connection) {
  CVec g = gradient_at(s, u);
  const RVec a = connection ? connection->coefficients(u) : model_connection_coefficients(u);
  const cplx v = s.evaluate(u);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += I * a[i] * v;
  return stack_real(g);
}

double max_ball_modulus(const GridSection& s) {
  double m = 0.0;
  for (std::size_t node : s.domain().ball_nodes()) m = std::max(m, std::abs(s.at(node)));
  return m;
}

}  // namespace

double cm_norm(const GridSection& field, int m, double r) {
  check_subball(field.domain(), m, r);
  return cm_core(field.domain(), m, r, {&field.values()});
}

double cm_norm(const MatrixField& field, const BallDomain& grid, int m, double r) {
  check_subball(grid, m, r);
  const double reach = (m >= 3 ? 2.0 : (m >= 1 ? 1.0 : 0.0)) * grid.spacing() * std::sqrt(grid.real_dim());
  const auto nodes = grid.ball_nodes(r + reach + 1e-12);
  std::vector<RMat> samples(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { samples[i] = field(grid.node_point(nodes[i])); });
  const Eigen::Index rows = samples.empty() ? 0 : samples.front().rows();
  const Eigen::Index cols = samples.empty() ? 0 : samples.front().cols();
  const cplx nan{std::nan(""), 0.0};
  std::vector<std::vector<cplx>> comps(static_cast<std::size_t>(rows * cols),
                                       std::vector<cplx>(grid.node_count(), nan));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (Eigen::Index a = 0; a < rows; ++a) {
      for (Eigen::Index b = 0; b < cols; ++b) comps[static_cast<std::size_t>(a * cols + b)][nodes[i]] = samples[i](a, b);
    }
  }
  std::vector<const std::vector<cplx>*> ptrs;
  for (const auto& c : comps) ptrs.push_back(&c);
  return cm_core(grid, m, r, ptrs);
}

DerivativeMode preferred_mode(const GridSection& s) {
  const auto* f = s.closed_form();
  return f && f->has_gradient() ? DerivativeMode::analytic : DerivativeMode::finite_difference;
}

double dbar_defect(const GridSection& s, double r, DerivativeMode mode, const ConnectionField* connection) {
  const BallDomain& d = s.domain();
  const auto nodes = d.ball_nodes(r);
  std::vector<double> local(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const RVec z = d.node_point(nodes[i]);
    CVec g;
    cplx v;
    if (mode == DerivativeMode::finite_difference) {
      g = ordinary_gradient_at_node(s, nodes[i]);
      v = s.at(nodes[i]);
    } else {
      g = ordinary_gradient(s, z, DerivativeMode::analytic);
      v = s.closed_form()->value(z);
    }
    const RVec a = connection ? connection->coefficients(z) : model_connection_coefficients(z);
    for (Eigen::Index j = 0; j < g.size(); ++j) g[j] += I * a[j] * v;
    local[i] = dbar_from_covariant(g).norm();
  });
  double sup = 0.0;
  for (double v : local) sup = std::max(sup, v);
  return sup;
}

RMat real_differential(const GridSection& s, const RVec& z, DerivativeMode mode,
                       const ConnectionField* connection) {
  return stack_real(covariant_gradient(s, z, mode, connection));
}

double smallest_singular_value(const RMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMat> svd(m);
  return svd.singularValues().minCoeff();
}

double default_epsilon(const GridSection& s) { return 0.1 * max_ball_modulus(s); }

TransversalityResult transversality_margin(const GridSection& s, double epsilon, DerivativeMode mode,
                                           const ConnectionField* connection) {
  if (!(epsilon > 0.0)) throw InvalidArgument("transversality_margin: epsilon must be positive");
  const BallDomain& d = s.domain();
  const auto nodes = d.ball_nodes();
  std::vector<double> local(nodes.size(), std::numeric_limits<double>::infinity());
  std::vector<char> hit(nodes.size(), 0);
  parallel_for(nodes.size(), [&](std::size_t i) {
    if (std::abs(s.at(nodes[i])) > epsilon) return;
    const RVec z = d.node_point(nodes[i]);
    if (mode == DerivativeMode::finite_difference && !d.stencil_fits(nodes[i], 1)) return;
    hit[i] = 1;
    local[i] = smallest_singular_value(real_differential(s, z, mode, connection));
  });
  TransversalityResult out;
  out.epsilon = epsilon;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!hit[i]) continue;
    ++out.near_zero_nodes;
    out.eta = std::min(out.eta, local[i]);
  }
  out.empty = out.near_zero_nodes == 0;
  return out;
}

TransversalityResult transversality_margin(const GridSection& s, double epsilon) {
  return transversality_margin(s, epsilon, preferred_mode(s));
}

ZeroLocus zero_locus(const GridSection& s, const ZeroLocusOptions& options) {
  const BallDomain& d = s.domain();
  const int dim = d.real_dim();
  const double h = d.spacing();
  ZeroLocus out;
  out.n = d.complex_dim();
  out.spacing = h;
  const double scale = max_ball_modulus(s);
  if (scale == 0.0) return out;
  const double tol = options.tolerance * scale;

  // Seed cells: lower corners with every axis index < points - 1.
  const int pts = d.points_per_axis();
  std::vector<char> flag(d.node_count(), 0);  // 1 seed, 2 trimmed
  parallel_for(d.node_count(), [&](std::size_t node) {
    for (int a = 0; a < dim; ++a) {
      if (d.axis_index(node, a) >= pts - 1) return;
    }
    RVec center = d.node_point(node);
    center.array() += 0.5 * h;
    const double rc = center.norm();
    if (rc > d.radius()) return;
    double re_lo = INFINITY, re_hi = -INFINITY, im_lo = INFINITY, im_hi = -INFINITY;
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
      std::size_t v = node;
      for (int a = 0; a < dim; ++a) {
        if ((corner >> a) & 1u) v += d.stride(a);
      }
      const cplx val = s.at(v);
      re_lo = std::min(re_lo, val.real());
      re_hi = std::max(re_hi, val.real());
      im_lo = std::min(im_lo, val.imag());
      im_hi = std::max(im_hi, val.imag());
    }
    if (!(re_lo <= 0.0 && re_hi >= 0.0 && im_lo <= 0.0 && im_hi >= 0.0)) return;
    flag[node] = rc < d.radius() - 2.0 * h ? 1 : 2;
  });
  std::vector<RVec> seeds;
  for (std::size_t node = 0; node < flag.size(); ++node) {
    if (flag[node] == 2) ++out.trimmed;
    if (flag[node] != 1) continue;
    RVec c = d.node_point(node);
    c.array() += 0.5 * h;
    seeds.push_back(c);
  }
  out.seeds = seeds.size();

  struct Refined {
    bool ok = false;
    RVec point;
    double residual = 0.0;
    RMat tangent;
    bool degenerate = false;
  };
  std::vector<Refined> refined(seeds.size());
  const ConnectionField* conn = options.connection;
  parallel_for(seeds.size(), [&](std::size_t i) {
    RVec u = seeds[i];
    cplx f = s.evaluate(u);
    bool ok = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      if (std::abs(f) <= tol) {
        ok = true;
        break;
      }
      const RMat jac = covariant_real_at(s, u, conn);
      const Eigen::Vector2d rhs(f.real(), f.imag());
      const RVec step = -jac.completeOrthogonalDecomposition().solve(rhs);
      double lambda = 1.0;
      bool accepted = false;
      for (int b = 0; b < 30; ++b, lambda *= 0.5) {
        const RVec trial = u + lambda * step;
        if (trial.norm() >= d.radius()) continue;
        const cplx ft = s.evaluate(trial);
        if (std::abs(ft) < std::abs(f)) {
          u = trial;
          f = ft;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (!ok && std::abs(f) <= tol) ok = true;
    if (!ok) return;
    Refined r;
    r.ok = true;
    r.point = u;
    r.residual = std::abs(f);
    const RMat jac = stack_real(gradient_at(s, u));
    Eigen::JacobiSVD<RMat> svd(jac, Eigen::ComputeFullV);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 1e-8 * scale) {
      r.degenerate = true;
    } else {
      r.tangent = svd.matrixV().rightCols(dim - 2);
    }
    refined[i] = std::move(r);
  });

  for (auto& r : refined) {
    if (!r.ok) {
      ++out.nonconvergent;
      continue;
    }
    ++out.converged;
    if (out.n == 1) {
      bool duplicate = false;
      for (const RVec& p : out.points) {
        if ((p - r.point).norm() < 0.5 * h) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
    }
    out.points.push_back(r.point);
    out.residuals.push_back(r.residual);
    out.tangents.push_back(r.tangent);
    out.degenerate.push_back(r.degenerate);
  }
  return out;
}

MarginResult symplectic_margin(const ZeroLocus& locus, const MatrixField& omega) {
  MarginResult out;
  out.value = std::numeric_limits<double>::infinity();
  if (locus.n < 2) {
    out.trivial = true;
    return out;
  }
  for (std::size_t i = 0; i < locus.points.size(); ++i) {
    if (locus.degenerate[i] || locus.tangents[i].size() == 0) {
      ++out.excluded;
      continue;
    }
    const RMat& t = locus.tangents[i];
    out.value = std::min(out.value, smallest_singular_value(t.transpose() * omega(locus.points[i]) * t));
  }
  return out;
}

MarginResult symplectic_margin(const ZeroLocus& locus) {
  const int n = locus.n;
  return symplectic_margin(locus, [n](const RVec&) { return standard_symplectic(n); });
}

MarginResult curvature_estimate(const ZeroLocus& locus, const GridSection& s) {
  MarginResult out;
  if (locus.n < 2) {
    out.trivial = true;
    return out;
  }
  std::vector<double> local(locus.points.size(), 0.0);
  std::vector<char> used(locus.points.size(), 0);
  parallel_for(locus.points.size(), [&](std::size_t i) {
    if (locus.degenerate[i] || locus.tangents[i].size() == 0) return;
    const RVec& u = locus.points[i];
    const RMat jac = stack_real(gradient_at(s, u));
    const CMat hess = hessian_at(s, u);
    const RMat hre = hess.real();
    const RMat him = hess.imag();
    const RMat proj = jac.transpose() * (jac * jac.transpose()).inverse();
    const RMat& t = locus.tangents[i];
    auto second = [&](Eigen::Index a, Eigen::Index b) {
      const Eigen::Vector2d q(t.col(a).dot(hre * t.col(b)), t.col(a).dot(him * t.col(b)));
      return RVec(-proj * q);
    };
    double sup = 0.0;
    for (Eigen::Index a = 0; a < t.cols(); ++a) {
      for (Eigen::Index b = a + 1; b < t.cols(); ++b) {
        const RVec aa = second(a, a), bb = second(b, b), ab = second(a, b);
        sup = std::max(sup, std::abs(aa.dot(bb) - ab.squaredNorm()));
      }
    }
    local[i] = sup;
    used[i] = 1;
  });
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (!used[i]) {
      ++out.excluded;
      continue;
    }
    out.value = std::max(out.value, local[i]);
  }
  return out;
}

bool DiagnosticsReport::all_finite() const {
  for (const auto& r : records) {
    for (const auto& [name, v] : r.values) {
      if (!std::isfinite(v)) return false;
    }
    if (!std::isfinite(r.spacing) || !std::isfinite(r.radius)) return false;
  }
  return true;
}

}  // namespace bargmann
