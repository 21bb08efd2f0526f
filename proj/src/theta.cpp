#include "bargmann/theta.hpp"

#include <algorithm>
#include <cmath>

#include "bargmann/error.hpp"

namespace bargmann {

namespace {

void validate(const ThetaCombination& t) {
  if (t.k < 1) throw InvalidArgument("theta: level k must be positive");
  if (static_cast<int>(t.weights.size()) != t.k) {
    throw DimensionMismatch("theta: a level-k combination needs k weights");
  }
}

void require_backend(const BackendPtr& backend, int n) {
  if (!backend || backend->name() != "torus" || backend->complex_dim() != n) {
    throw InvalidArgument("theta: needs the n = " + std::to_string(n) + " torus backend");
  }
}

// I_m(z) = (2 pi i)^{-m} e^{pi z^2/2} d^m/dz^m [e^{-pi z^2/2}] / sqrt(2), which
// is the limit attached to the profile monomial t^m.
std::vector<std::vector<cplx>> limit_basis(std::size_t count) {
  std::vector<std::vector<cplx>> basis;
  std::vector<cplx> cur{1.0 / std::sqrt(2.0)};
  for (std::size_t m = 0; m < count; ++m) {
    basis.push_back(cur);
    std::vector<cplx> next(cur.size() + 1, cplx{});
    const std::vector<cplx> d = poly1::derivative(cur);
    for (std::size_t i = 0; i < d.size(); ++i) next[i] += d[i];
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] -= pi * cur[i];
    for (auto& c : next) c /= 2.0 * pi * I;
    cur = std::move(next);
  }
  return basis;
}

CMat jet_hessian(const ThetaJet& j) {
  CMat h(2, 2);
  h << j.dxx, j.dxy, j.dxy, j.dyy;
  return h;
}

}  // namespace

ThetaCombination theta_basis(int k, int j) {
  if (k < 1) throw InvalidArgument("theta_basis: level k must be positive");
  if (j < 0 || j >= k) throw InvalidArgument("theta_basis: characteristic j must lie in [0, k)");
  ThetaCombination t{k, std::vector<cplx>(k, cplx{})};
  t.weights[j] = 1.0;
  return t;
}

ThetaJet evaluate_theta(const ThetaCombination& theta, double x, double y) {
  validate(theta);
  const int k = theta.k;
  const double kd = k;
  double wmax = 0.0;
  for (const cplx& w : theta.weights) wmax = std::max(wmax, std::abs(w));
  ThetaJet jet{};
  if (wmax == 0.0) return jet;

  double abs_sum = 0.0;
  auto visit = [&](long i) {
    const double m = static_cast<double>(i) / kd;
    const double env = std::exp(-pi * kd * (m + y) * (m + y));
    const cplx w = theta.weights[static_cast<std::size_t>(((i % k) + k) % k)];
    if (w != cplx{} && env > 0.0) {
      const cplx term = w * env * std::polar(1.0, pi * kd * x * (y + 2.0 * m));
      const cplx ex = I * pi * kd * (y + 2.0 * m);
      const cplx ey = -2.0 * pi * kd * (m + y) + I * pi * kd * x;
      jet.value += term;
      jet.dx += term * ex;
      jet.dy += term * ey;
      jet.dxx += term * ex * ex;
      jet.dxy += term * (ex * ey + I * pi * kd);
      jet.dyy += term * (ey * ey - 2.0 * pi * kd);
      abs_sum += std::abs(w) * env;
    }
    return env;
  };

  const long peak = std::lround(-kd * y);
  visit(peak);
  for (long dir : {1L, -1L}) {
    for (long i = peak + dir;; i += dir) {
      const double env = visit(i);
      if (env * wmax < 1e-14 * abs_sum || env < 1e-300) break;
    }
  }
  return jet;
}

ThetaCombination theta_profile(int k, const std::vector<cplx>& profile) {
  if (k < 1) throw InvalidArgument("theta_profile: level k must be positive");
  const double sk = std::sqrt(static_cast<double>(k));
  ThetaCombination t{k, std::vector<cplx>(k, cplx{})};
  for (int j = 0; j < k; ++j) {
    const double base = static_cast<double>(j) / k;
    const long lo = static_cast<long>(std::floor(-9.0 / sk - base));
    const long hi = static_cast<long>(std::ceil(9.0 / sk - base));
    cplx sum = 0.0;
    for (long l = lo; l <= hi; ++l) {
      const double s = sk * (base + static_cast<double>(l));
      sum += std::exp(-pi * s * s) * poly1::evaluate(profile, s);
    }
    t.weights[j] = sum / sk;
  }
  return t;
}

std::vector<cplx> profile_for_limit(const std::vector<cplx>& limit_poly) {
  std::vector<cplx> r = limit_poly;
  while (!r.empty() && r.back() == cplx{}) r.pop_back();
  if (r.empty()) return {};
  const auto basis = limit_basis(r.size());
  std::vector<cplx> q(r.size(), cplx{});
  for (std::size_t m = r.size(); m-- > 0;) {
    q[m] = r[m] / basis[m][m];
    for (std::size_t i = 0; i <= m; ++i) r[i] -= q[m] * basis[m][i];
  }
  return q;
}

std::vector<cplx> limit_of_profile(const std::vector<cplx>& profile) {
  if (profile.empty()) return {};
  const auto basis = limit_basis(profile.size());
  std::vector<cplx> f(profile.size(), cplx{});
  for (std::size_t m = 0; m < profile.size(); ++m) {
    for (std::size_t i = 0; i <= m; ++i) f[i] += profile[m] * basis[m][i];
  }
  return f;
}

SectionFamily theta_combination_section(const ThetaCombination& theta, BackendPtr backend) {
  validate(theta);
  require_backend(backend, 1);
  auto form = std::make_shared<ClosedFormSection>();
  form->n = 1;
  form->value = [theta](const RVec& u) { return evaluate_theta(theta, u[0], u[1]).value; };
  form->gradient = [theta](const RVec& u) {
    const ThetaJet j = evaluate_theta(theta, u[0], u[1]);
    CVec g(2);
    g << j.dx, j.dy;
    return g;
  };
  form->hessian = [theta](const RVec& u) { return jet_hessian(evaluate_theta(theta, u[0], u[1])); };
  return {std::move(backend), theta.k, "theta level " + std::to_string(theta.k), std::move(form)};
}

SectionFamily theta_section(int k, int j, BackendPtr backend) {
  SectionFamily s = theta_combination_section(theta_basis(k, j), std::move(backend));
  s.label = "theta_{" + std::to_string(k) + "," + std::to_string(j) + "}";
  return s;
}

SectionFamily torus_product_section(const std::vector<ProductTerm>& terms, BackendPtr backend) {
  require_backend(backend, 2);
  if (terms.empty()) throw InvalidArgument("torus_product_section: no terms");
  const int k = terms.front().first.k;
  for (const auto& t : terms) {
    validate(t.first);
    validate(t.second);
    if (t.first.k != k || t.second.k != k) {
      throw InvalidArgument("torus_product_section: factors must share the level k");
    }
  }
  struct Jets {
    ThetaJet a, b;
  };
  auto jets = [terms](const RVec& u) {
    std::vector<Jets> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
      out.push_back({evaluate_theta(t.first, u[0], u[1]), evaluate_theta(t.second, u[2], u[3])});
    }
    return out;
  };
  auto form = std::make_shared<ClosedFormSection>();
  form->n = 2;
  form->value = [terms, jets](const RVec& u) {
    const auto js = jets(u);
    cplx v = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) v += terms[i].coeff * js[i].a.value * js[i].b.value;
    return v;
  };
  form->gradient = [terms, jets](const RVec& u) {
    const auto js = jets(u);
    CVec g = CVec::Zero(4);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const ThetaJet& a = js[i].a;
      const ThetaJet& b = js[i].b;
      const cplx c = terms[i].coeff;
      g[0] += c * a.dx * b.value;
      g[1] += c * a.dy * b.value;
      g[2] += c * a.value * b.dx;
      g[3] += c * a.value * b.dy;
    }
    return g;
  };
  form->hessian = [terms, jets](const RVec& u) {
    const auto js = jets(u);
    CMat h = CMat::Zero(4, 4);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const ThetaJet& a = js[i].a;
      const ThetaJet& b = js[i].b;
      const cplx c = terms[i].coeff;
      const cplx da[2] = {a.dx, a.dy};
      const cplx db[2] = {b.dx, b.dy};
      const CMat ha = jet_hessian(a);
      const CMat hb = jet_hessian(b);
      for (int r = 0; r < 2; ++r) {
        for (int s = 0; s < 2; ++s) {
          h(r, s) += c * ha(r, s) * b.value;
          h(2 + r, 2 + s) += c * a.value * hb(r, s);
          h(r, 2 + s) += c * da[r] * db[s];
          h(2 + s, r) += c * da[r] * db[s];
        }
      }
    }
    return h;
  };
  return {std::move(backend), k, "torus product level " + std::to_string(k), std::move(form)};
}

SectionFamily torus_product_for_limit(int k, const std::vector<LimitProduct>& limit,
                                      BackendPtr backend) {
  std::vector<ProductTerm> terms;
  for (const auto& p : limit) {
    terms.push_back({p.coeff, theta_profile(k, profile_for_limit(p.first)),
                     theta_profile(k, profile_for_limit(p.second))});
  }
  return torus_product_section(terms, std::move(backend));
}

}  // namespace bargmann
