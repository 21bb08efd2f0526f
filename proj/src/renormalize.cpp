#include "bargmann/renormalize.hpp"

#include <algorithm>
#include <cmath>

#include "bargmann/diagnostics.hpp"
#include "bargmann/error.hpp"
#include "bargmann/parallel.hpp"

namespace bargmann {

namespace {

double max_abs(const RMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

TransportResult transport_ray(const Chart& chart, int steps, const RVec& z) {
  Path path;
  const RVec v = chart.linear * z;
  const BackendPtr backend = chart.backend;
  const RVec center = chart.center;
  path.pieces.push_back(
      {[backend, center, v](double t) { return backend->geodesic(center, v, t); }, 1.0});
  return parallel_transport(*chart.backend, chart.k, path, 1.0 / (steps - 0.5));
}

// RK4 steps per ray: parameter step at most h, and at most 0.05 rad of
// transport phase per step. The phase rate k |a . gamma'| is sampled along a
// fan of full-radius rays (axes and pairwise diagonals), with a 1.5 margin.
int ray_steps(const Chart& chart, const BallDomain& grid) {
  int steps = std::max(1, static_cast<int>(std::ceil(grid.radius() / grid.spacing() - 1e-9)));
  const PrequantizedKahler& m = *chart.backend;
  if (m.is_flat()) return steps;
  const int dim = grid.real_dim();
  std::vector<RVec> dirs;
  for (int i = 0; i < dim; ++i) {
    for (double si : {1.0, -1.0}) {
      dirs.push_back(si * RVec::Unit(dim, i));
      for (int j = i + 1; j < dim; ++j) {
        for (double sj : {1.0, -1.0}) dirs.push_back((si * RVec::Unit(dim, i) + sj * RVec::Unit(dim, j)) / std::sqrt(2.0));
      }
    }
  }
  double peak = 0.0;
  for (const RVec& d : dirs) {
    const RVec v = chart.linear * (grid.radius() * d);
    for (int s = 0; s <= 32; ++s) {
      const GeodesicState g = m.geodesic(chart.center, v, s / 32.0);
      if (!m.in_atlas(g.position)) break;
      peak = std::max(peak, chart.k * std::abs(m.connection_coefficients(g.position).dot(g.velocity)));
    }
  }
  return std::max(steps, static_cast<int>(std::ceil(1.5 * peak / 0.05)));
}

bool same_chart(const Chart& a, const Chart& b) {
  return a.backend == b.backend && a.k == b.k && a.center == b.center && a.linear == b.linear;
}

}  // namespace

RVec Chart::point(const RVec& z) const {
  if (z.size() != 2 * complex_dim()) throw DimensionMismatch("Chart: point dimension");
  return backend->geodesic(center, linear * z, 1.0).position;
}

RVec Chart::velocity(const RVec& z, double t) const {
  return backend->geodesic(center, linear * z, t).velocity;
}

RMat Chart::differential(const RVec& z) const {
  return backend->exp_differential(center, linear * z) * linear;
}

Chart build_chart(BackendPtr backend, const RVec& center, int k, const CMat& frame) {
  if (!backend) throw InvalidArgument("build_chart: no backend");
  if (k < 1) throw InvalidArgument("build_chart: k must be positive");
  const int n = backend->complex_dim();
  if (center.size() != 2 * n) throw DimensionMismatch("build_chart: center dimension");
  if (!backend->in_atlas(center)) throw AtlasCoverage("build_chart: center outside the chart");
  CMat u = frame.size() == 0 ? CMat::Identity(n, n) : frame;
  if (u.rows() != n || u.cols() != n) throw DimensionMismatch("build_chart: frame must be n x n");
  if ((u.adjoint() * u - CMat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("build_chart: frame is not unitary");
  }
  Chart chart;
  chart.backend = std::move(backend);
  chart.center = center;
  chart.k = k;
  chart.frame = u;
  chart.linear = chart.backend->unitary_frame(center) * realify(u) / std::sqrt(static_cast<double>(k));
  return chart;
}

cplx RadialGauge::at(const RVec& z) const {
  if (chart.backend->is_flat()) {
    const double phase = -chart.k * chart.backend->connection_coefficients(chart.center).dot(chart.linear * z);
    return std::polar(1.0, phase);
  }
  return transport_ray(chart, steps, z).value;
}

RadialGauge radial_gauge(const Chart& chart, const BallDomain& grid) {
  if (grid.radius() > 1.0) throw InvalidArgument("radial_gauge: grid radius must not exceed 1");
  if (grid.complex_dim() != chart.complex_dim()) throw DimensionMismatch("radial_gauge: grid dimension");
  RadialGauge gauge{chart, grid, {}, 1, 0.0};
  gauge.steps = ray_steps(chart, grid);
  gauge.values.resize(grid.node_count());
  std::vector<double> drift(grid.node_count(), 0.0);
  const bool flat = chart.backend->is_flat();
  parallel_for(grid.node_count(), [&](std::size_t node) {
    const RVec z = grid.node_point(node);
    if (flat) {
      gauge.values[node] = gauge.at(z);
    } else {
      const TransportResult r = transport_ray(chart, gauge.steps, z);
      gauge.values[node] = r.value;
      drift[node] = r.modulus_drift;
    }
  });
  for (double d : drift) gauge.max_modulus_drift = std::max(gauge.max_modulus_drift, d);
  return gauge;
}

GridSection renormalize_section(const SectionFamily& family, const Chart& chart,
                                const RadialGauge& gauge, const BallDomain& grid) {
  if (family.k != chart.k) throw InvalidArgument("renormalize_section: family power differs from chart power");
  if (family.backend != chart.backend) throw InvalidArgument("renormalize_section: backend mismatch");
  if (!same_chart(gauge.chart, chart) || !(gauge.domain == grid)) {
    throw InvalidArgument("renormalize_section: gauge was built for another chart or grid");
  }
  auto s = family.section;
  auto form = std::make_shared<ClosedFormSection>();
  form->n = chart.complex_dim();
  if (chart.backend->is_flat()) {
    const RVec c = chart.center;
    const RMat l = chart.linear;
    const RVec b = chart.k * (l.transpose() * chart.backend->connection_coefficients(c));
    form->value = [s, c, l, b](const RVec& z) {
      return s->value(c + l * z) * std::polar(1.0, b.dot(z));
    };
    if (s->has_gradient()) {
      form->gradient = [s, c, l, b](const RVec& z) {
        const RVec p = c + l * z;
        const cplx v = s->value(p);
        const CVec g = l.transpose().cast<cplx>() * s->gradient(p);
        return CVec((g + I * v * b.cast<cplx>()) * std::polar(1.0, b.dot(z)));
      };
    }
    if (s->has_gradient() && s->has_hessian()) {
      form->hessian = [s, c, l, b](const RVec& z) {
        const RVec p = c + l * z;
        const cplx v = s->value(p);
        const CMat lc = l.cast<cplx>();
        const CVec bc = b.cast<cplx>();
        const CVec g = lc.transpose() * s->gradient(p);
        const CMat h = lc.transpose() * s->hessian(p) * lc + I * (g * bc.transpose() + bc * g.transpose()) -
                       v * bc * bc.transpose();
        return CMat(h * std::polar(1.0, b.dot(z)));
      };
    }
  } else {
    const Chart ch = chart;
    const RadialGauge gg = gauge;
    form->value = [s, ch, gg](const RVec& z) {
      const RVec p = ch.point(z);
      if (!ch.backend->in_atlas(p)) throw AtlasCoverage("renormalize_section: chart image leaves the atlas");
      return s->value(p) / gg.at(z);
    };
  }
  return GridSection::sample(grid, form);
}

GridSection renormalize(const SectionFamily& family, const RVec& center, const BallDomain& grid,
                        const CMat& frame) {
  const Chart chart = build_chart(family.backend, center, family.k, frame);
  return renormalize_section(family, chart, radial_gauge(chart, grid), grid);
}

StructurePullback pullback_structure(const Chart& chart, const BallDomain& grid, double subball_radius) {
  if (!(subball_radius > 0.0) || subball_radius > grid.radius()) {
    throw InvalidArgument("pullback_structure: subball radius must lie in (0, grid radius]");
  }
  const int m = 2 * chart.complex_dim();
  StructurePullback out;
  out.subball_radius = subball_radius;
  const Chart ch = chart;
  const double kd = chart.k;
  out.metric = [ch, kd](const RVec& z) {
    const RMat d = ch.differential(z);
    return RMat(kd * d.transpose() * ch.backend->metric(ch.point(z)) * d);
  };
  out.omega = [ch, kd](const RVec& z) {
    const RMat d = ch.differential(z);
    return RMat(kd * d.transpose() * ch.backend->symplectic_form(ch.point(z)) * d);
  };
  out.complex_structure = [ch](const RVec& z) {
    const RMat d = ch.differential(z);
    return RMat(d.inverse() * ch.backend->complex_structure(ch.point(z)) * d);
  };

  const RMat g0 = RMat::Identity(m, m);
  const RMat w0 = standard_symplectic(m / 2);
  const RMat j0 = standard_complex_structure(m / 2);
  const auto nodes = grid.ball_nodes(subball_radius);
  const double h = grid.spacing();
  struct NodeDeviation {
    double c0[3];
    double d1[3];
  };
  std::vector<NodeDeviation> dev(nodes.size());
  const std::function<RMat(const RVec&)>* fields[3] = {&out.metric, &out.omega, &out.complex_structure};
  const RMat* refs[3] = {&g0, &w0, &j0};
  parallel_for(nodes.size(), [&](std::size_t i) {
    const RVec z = grid.node_point(nodes[i]);
    for (int f = 0; f < 3; ++f) {
      dev[i].c0[f] = max_abs((*fields[f])(z) - *refs[f]);
      double d1 = 0.0;
      RVec p = z;
      for (int a = 0; a < m; ++a) {
        p[a] = z[a] + h;
        const RMat fp = (*fields[f])(p);
        p[a] = z[a] - h;
        const RMat fm = (*fields[f])(p);
        p[a] = z[a];
        d1 = std::max(d1, max_abs(fp - fm) / (2.0 * h));
      }
      dev[i].d1[f] = d1;
    }
  });
  StructureDeviation* targets[3] = {&out.metric_deviation, &out.omega_deviation, &out.j_deviation};
  for (const auto& d : dev) {
    for (int f = 0; f < 3; ++f) {
      targets[f]->c0 = std::max(targets[f]->c0, d.c0[f]);
      targets[f]->c1 = std::max({targets[f]->c1, d.c0[f], d.d1[f]});
    }
  }
  return out;
}

ConnectionPullback pullback_connection(const Chart& chart, const RadialGauge& gauge, const BallDomain& grid) {
  if (!same_chart(gauge.chart, chart)) throw InvalidArgument("pullback_connection: gauge chart mismatch");
  ConnectionPullback out;
  out.field.n = chart.complex_dim();
  out.field.domain = grid;
  const Chart ch = chart;
  const double kd = chart.k;
  if (chart.backend->is_flat()) {
    const RVec shift = -kd * (chart.linear.transpose() * chart.backend->connection_coefficients(chart.center));
    out.field.coefficients = [ch, kd, shift](const RVec& z) {
      return RVec(kd * ch.linear.transpose() * ch.backend->connection_coefficients(ch.point(z)) + shift);
    };
    out.field.jacobian = [ch, kd](const RVec&) {
      // Flat backends have coefficients linear in p.
      return RMat(kd * ch.linear.transpose() * ch.backend->connection_jacobian(ch.center) * ch.linear);
    };
  } else {
    const RadialGauge gg = gauge;
    out.field.coefficients = [ch, kd, gg](const RVec& z) {
      const RMat d = ch.differential(z);
      RVec a = kd * d.transpose() * ch.backend->connection_coefficients(ch.point(z));
      const double delta = 1e-5;
      RVec p = z;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        p[i] = z[i] + delta;
        const cplx tp = gg.at(p);
        p[i] = z[i] - delta;
        const cplx tm = gg.at(p);
        p[i] = z[i];
        a[i] += std::arg(tp / tm) / (2.0 * delta);
      }
      return a;
    };
  }
  const auto nodes = grid.ball_nodes();
  std::vector<double> dev(nodes.size());
  const auto& coeffs = out.field.coefficients;
  parallel_for(nodes.size(), [&](std::size_t i) {
    const RVec z = grid.node_point(nodes[i]);
    dev[i] = (coeffs(z) - model_connection_coefficients(z)).cwiseAbs().maxCoeff();
  });
  for (double d : dev) out.deviation = std::max(out.deviation, d);
  out.radial_defect = radial_flatness_defect(out.field);
  return out;
}

LimitCandidate limit_extract(const std::vector<GridSection>& sections, const std::vector<int>& ladder,
                             int order, double subball_radius) {
  if (sections.size() < 3) throw InvalidArgument("limit_extract: ladder needs at least 3 rungs");
  if (ladder.size() != sections.size()) throw InvalidArgument("limit_extract: ladder and sections differ in length");
  if (order < 0 || order > 3) throw InvalidArgument("limit_extract: seminorm order must lie in [0, 3]");
  const BallDomain& d = sections.front().domain();
  if (!(subball_radius > 0.0) || subball_radius >= d.radius()) {
    throw InvalidArgument("limit_extract: subball radius must lie in (0, grid radius)");
  }
  for (const auto& s : sections) {
    if (!(s.domain() == d)) throw DimensionMismatch("limit_extract: rungs live on different grids");
  }
  LimitCandidate out{sections.back(), ladder, {}, order, subball_radius, true};
  for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
    out.distances.push_back(cm_norm(difference(sections[i], sections[i + 1]), order, subball_radius));
  }
  for (std::size_t i = 0; i + 1 < out.distances.size(); ++i) {
    if (!(out.distances[i + 1] < out.distances[i]) && out.distances[i + 1] > 0.0) out.cauchy = false;
  }
  return out;
}

}  // namespace bargmann
