#include "bargmann/backends.hpp"

#include <cmath>

#include "bargmann/error.hpp"

namespace bargmann {

ConnectionField PrequantizedKahler::connection(int k) const {
  ConnectionField field;
  field.n = complex_dim();
  const PrequantizedKahler* self = this;
  const double scale = static_cast<double>(k);
  field.coefficients = [self, scale](const RVec& p) -> RVec {
    return scale * self->connection_coefficients(p);
  };
  field.jacobian = [self, scale](const RVec& p) -> RMat {
    return scale * self->connection_jacobian(p);
  };
  return field;
}

RMat PrequantizedKahler::exp_differential(const RVec& p, const RVec& v) const {
  const Eigen::Index m = v.size();
  const double d = 1e-3 * (1.0 + v.norm());
  RMat jac(m, m);
  RVec w = v;
  for (Eigen::Index i = 0; i < m; ++i) {
    auto at = [&](double off) {
      w[i] = v[i] + off;
      RVec r = geodesic(p, w, 1.0).position;
      w[i] = v[i];
      return r;
    };
    jac.col(i) = (-at(2 * d) + 8.0 * at(d) - 8.0 * at(-d) + at(-2 * d)) / (12.0 * d);
  }
  return jac;
}

// ---------------------------------------------------------------- flat torus

FlatTorus::FlatTorus(int n) : n_(n) {
  if (n != 1 && n != 2) throw InvalidArgument("torus_backend: n must be 1 or 2");
}

RMat FlatTorus::metric(const RVec&) const { return RMat::Identity(2 * n_, 2 * n_); }
RMat FlatTorus::symplectic_form(const RVec&) const { return standard_symplectic(n_); }
RMat FlatTorus::complex_structure(const RVec&) const { return standard_complex_structure(n_); }

RVec FlatTorus::connection_coefficients(const RVec& p) const {
  if (p.size() != 2 * n_) throw DimensionMismatch("FlatTorus: point dimension");
  return model_connection_coefficients(p);
}

RMat FlatTorus::connection_jacobian(const RVec& p) const {
  return model_connection_field(n_).jacobian(p);
}

std::vector<RMat> FlatTorus::christoffel(const RVec&) const {
  return std::vector<RMat>(2 * n_, RMat::Zero(2 * n_, 2 * n_));
}

GeodesicState FlatTorus::geodesic(const RVec& p, const RVec& v, double t) const {
  return {p + t * v, v};
}

RMat FlatTorus::exp_differential(const RVec&, const RVec& v) const {
  return RMat::Identity(v.size(), v.size());
}

RMat FlatTorus::unitary_frame(const RVec&) const { return RMat::Identity(2 * n_, 2 * n_); }

bool FlatTorus::in_atlas(const RVec& p) const {
  return p.size() == 2 * n_ && p.allFinite();
}

cplx FlatTorus::multiplier(int k, const std::vector<int>& lambda, const RVec& z) const {
  if (static_cast<int>(lambda.size()) != 2 * n_ || z.size() != 2 * n_) {
    throw DimensionMismatch("FlatTorus::multiplier: dimension");
  }
  long parity = 0;
  double phase = 0.0;
  for (int a = 0; a < n_; ++a) {
    const int lx = lambda[2 * a];
    const int ly = lambda[2 * a + 1];
    parity += static_cast<long>(k) * lx * ly;
    phase += pi * k * (lx * z[2 * a + 1] - ly * z[2 * a]);
  }
  const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
  return sign * std::polar(1.0, phase);
}

RVec FlatTorus::wrap(const RVec& p) const {
  RVec q = p;
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] -= std::floor(q[i]);
  return q;
}

// ------------------------------------------------------------ Fubini-Study

FubiniStudyLine::FubiniStudyLine(double chart_limit) : chart_limit_(chart_limit) {
  if (!(chart_limit > 0.0)) throw InvalidArgument("FubiniStudyLine: chart limit must be positive");
}

double FubiniStudyLine::sphere_radius() { return 0.5 / std::sqrt(pi); }

double FubiniStudyLine::conformal_factor(const RVec& p) {
  const double d = 1.0 + p.squaredNorm();
  return 1.0 / (pi * d * d);
}

RMat FubiniStudyLine::metric(const RVec& p) const {
  return conformal_factor(p) * RMat::Identity(2, 2);
}

RMat FubiniStudyLine::symplectic_form(const RVec& p) const {
  return conformal_factor(p) * standard_symplectic(1);
}

RMat FubiniStudyLine::complex_structure(const RVec&) const { return standard_complex_structure(1); }

RVec FubiniStudyLine::connection_coefficients(const RVec& p) const {
  if (p.size() != 2) throw DimensionMismatch("FubiniStudyLine: point dimension");
  const double d = 1.0 + p.squaredNorm();
  RVec a(2);
  a << p[1] / d, -p[0] / d;
  return a;
}

RMat FubiniStudyLine::connection_jacobian(const RVec& p) const {
  const double x = p[0], y = p[1];
  const double d = 1.0 + x * x + y * y;
  const double d2 = d * d;
  RMat jac(2, 2);
  jac(0, 0) = -2.0 * x * y / d2;
  jac(0, 1) = 1.0 / d - 2.0 * y * y / d2;
  jac(1, 0) = -1.0 / d + 2.0 * x * x / d2;
  jac(1, 1) = 2.0 * x * y / d2;
  return jac;
}

std::vector<RMat> FubiniStudyLine::christoffel(const RVec& p) const {
  // g = e^{2 phi} delta with d phi = -2 u / (1 + |u|^2).
  const double d = 1.0 + p.squaredNorm();
  const RVec dphi = -2.0 * p / d;
  std::vector<RMat> gamma(2, RMat::Zero(2, 2));
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        gamma[k](i, j) = (i == k ? dphi[j] : 0.0) + (j == k ? dphi[i] : 0.0) -
                         (i == j ? dphi[k] : 0.0);
      }
    }
  }
  return gamma;
}

GeodesicState FubiniStudyLine::geodesic(const RVec& p, const RVec& v, double t) const {
  // Great circle on the unit sphere via inverse stereographic projection
  // from the north pole; w = 0 is the south pole.
  const double x = p[0], y = p[1];
  const double d = 1.0 + x * x + y * y;
  Eigen::Vector3d X(2 * x / d, 2 * y / d, 1.0 - 2.0 / d);
  Eigen::Matrix<double, 3, 2> dX;
  dX << 2.0 / d - 4 * x * x / (d * d), -4 * x * y / (d * d),
      -4 * x * y / (d * d), 2.0 / d - 4 * y * y / (d * d),
      4 * x / (d * d), 4 * y / (d * d);
  const Eigen::Vector3d V = dX * Eigen::Vector2d(v[0], v[1]);
  const double speed = V.norm();
  Eigen::Vector3d Xt = X;
  Eigen::Vector3d Vt = V;
  if (speed > 0.0) {
    const double c = std::cos(speed * t);
    const double s = std::sin(speed * t);
    Xt = c * X + s * V / speed;
    Vt = -speed * s * X + c * V;
  }
  const double q = 1.0 - Xt[2];
  if (!(q > 1e-300)) throw AtlasCoverage("FubiniStudyLine: geodesic reached the chart's pole");
  RVec pos(2), vel(2);
  pos << Xt[0] / q, Xt[1] / q;
  vel << Vt[0] / q + Xt[0] * Vt[2] / (q * q), Vt[1] / q + Xt[1] * Vt[2] / (q * q);
  return {pos, vel};
}

RMat FubiniStudyLine::unitary_frame(const RVec& p) const {
  return RMat::Identity(2, 2) / std::sqrt(conformal_factor(p));
}

bool FubiniStudyLine::in_atlas(const RVec& p) const {
  return p.size() == 2 && p.allFinite() && p.norm() <= chart_limit_;
}

RVec FubiniStudyLine::to_opposite_chart(const RVec& w) {
  const double r2 = w.squaredNorm();
  if (r2 == 0.0) throw AtlasCoverage("FubiniStudyLine: w = 0 is not in the opposite chart");
  RVec u(2);
  u << w[0] / r2, -w[1] / r2;
  return u;
}

cplx FubiniStudyLine::transition(int k, const RVec& w) {
  const cplx wc{w[0], w[1]};
  const double r = std::abs(wc);
  if (r == 0.0) throw AtlasCoverage("FubiniStudyLine: transition undefined at w = 0");
  return std::pow(std::conj(wc) / r, k);
}

BackendPtr torus_backend(int n) { return std::make_shared<FlatTorus>(n); }
BackendPtr cp1_backend() { return std::make_shared<FubiniStudyLine>(); }

GeodesicState integrate_geodesic(const PrequantizedKahler& backend, const RVec& p, const RVec& v,
                                 double t, int steps) {
  if (steps < 1) throw IntegrationFailure("integrate_geodesic: step count underflow");
  const double dt = t / steps;
  auto accel = [&](const RVec& x, const RVec& u) {
    const auto gamma = backend.christoffel(x);
    RVec a(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) a[k] = -u.dot(gamma[k] * u);
    return a;
  };
  RVec x = p, u = v;
  for (int s = 0; s < steps; ++s) {
    const RVec k1x = u, k1u = accel(x, u);
    const RVec k2x = u + 0.5 * dt * k1u, k2u = accel(x + 0.5 * dt * k1x, u + 0.5 * dt * k1u);
    const RVec k3x = u + 0.5 * dt * k2u, k3u = accel(x + 0.5 * dt * k2x, u + 0.5 * dt * k2u);
    const RVec k4x = u + dt * k3u, k4u = accel(x + dt * k3x, u + dt * k3u);
    x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    u += dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    if (!x.allFinite() || !u.allFinite()) throw IntegrationFailure("integrate_geodesic: blow-up");
  }
  return {x, u};
}

// ------------------------------------------------------------- CP^1 sections

namespace {

std::vector<cplx> trimmed(const std::vector<cplx>& c) {
  std::vector<cplx> out = c;
  while (!out.empty() && out.back() == cplx{}) out.pop_back();
  return out;
}

}  // namespace

SectionFamily cp1_section(int k, const std::vector<cplx>& coeffs, BackendPtr backend) {
  if (k < 1) throw InvalidArgument("cp1_section: k must be positive");
  if (!backend || backend->name() != "cp1") throw InvalidArgument("cp1_section: needs the cp1 backend");
  const std::vector<cplx> p = trimmed(coeffs);
  if (static_cast<int>(p.size()) - 1 > k) throw InvalidArgument("cp1_section: degree exceeds k");
  const std::vector<cplx> dp = poly1::derivative(p.empty() ? std::vector<cplx>{0.0} : p);
  auto form = std::make_shared<ClosedFormSection>();
  form->n = 1;
  const double half_k = 0.5 * k;
  form->value = [p, half_k](const RVec& u) {
    const double d = 1.0 + u.squaredNorm();
    return poly1::evaluate(p, {u[0], u[1]}) * std::pow(d, -half_k);
  };
  form->gradient = [p, dp, half_k](const RVec& u) {
    const cplx w{u[0], u[1]};
    const double d = 1.0 + u.squaredNorm();
    const double f = std::pow(d, -half_k);
    const cplx pv = poly1::evaluate(p, w);
    const cplx dv = poly1::evaluate(dp, w);
    CVec g(2);
    g[0] = dv * f - pv * half_k * f * 2.0 * u[0] / d;
    g[1] = I * dv * f - pv * half_k * f * 2.0 * u[1] / d;
    return g;
  };
  return {std::move(backend), k, "cp1 O(" + std::to_string(k) + ") polynomial", std::move(form)};
}

std::vector<cplx> cp1_coefficients_for_limit(int k, const std::vector<cplx>& limit_poly) {
  const std::vector<cplx> p = trimmed(limit_poly);
  if (static_cast<int>(p.size()) - 1 > k) {
    throw InvalidArgument("cp1_coefficients_for_limit: degree exceeds k");
  }
  std::vector<cplx> c(p.size());
  const double scale = std::sqrt(static_cast<double>(k) / pi);
  double f = 1.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    c[m] = p[m] * f;
    f *= scale;
  }
  return c;
}

cplx cp1_section_opposite_chart(int k, const std::vector<cplx>& coeffs, const RVec& u) {
  const cplx uc{u[0], u[1]};
  cplx q = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) q += coeffs[m] * std::pow(uc, k - static_cast<int>(m));
  return q * std::pow(1.0 + u.squaredNorm(), -0.5 * k);
}

}  // namespace bargmann
