#include "bargmann/polynomial.hpp"

#include <algorithm>

#include "bargmann/error.hpp"

namespace bargmann {

namespace {

cplx ipow(cplx z, int p) {
  cplx r = 1.0;
  for (int i = 0; i < p; ++i) r *= z;
  return r;
}

}  // namespace

PolyTable& PolyTable::add(const std::vector<int>& holo, cplx coeff, const std::vector<int>& anti) {
  if (static_cast<int>(holo.size()) != n_ || (!anti.empty() && static_cast<int>(anti.size()) != n_)) {
    throw DimensionMismatch("PolyTable::add: exponent tuple length must equal n");
  }
  Exponents key(2 * n_, 0);
  for (int a = 0; a < n_; ++a) {
    if (holo[a] < 0 || (!anti.empty() && anti[a] < 0)) {
      throw InvalidArgument("PolyTable::add: negative exponent");
    }
    key[a] = holo[a];
    key[n_ + a] = anti.empty() ? 0 : anti[a];
  }
  terms_[key] += coeff;
  return *this;
}

bool PolyTable::holomorphic() const {
  for (const auto& [key, c] : terms_) {
    for (int a = 0; a < n_; ++a) {
      if (key[n_ + a] != 0 && c != cplx{}) return false;
    }
  }
  return true;
}

int PolyTable::degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) {
    int s = 0;
    for (int e : key) s += e;
    d = std::max(d, s);
  }
  return d;
}

cplx PolyTable::coefficient(const std::vector<int>& holo) const {
  Exponents key(2 * n_, 0);
  std::copy(holo.begin(), holo.end(), key.begin());
  auto it = terms_.find(key);
  return it == terms_.end() ? cplx{} : it->second;
}

cplx PolyTable::value(const RVec& u) const { return derivative(u, {}); }

CVec PolyTable::gradient(const RVec& u) const {
  CVec g(2 * n_);
  for (int i = 0; i < 2 * n_; ++i) g[i] = derivative(u, {i});
  return g;
}

CMat PolyTable::hessian(const RVec& u) const {
  CMat h(2 * n_, 2 * n_);
  for (int i = 0; i < 2 * n_; ++i) {
    for (int j = i; j < 2 * n_; ++j) {
      h(i, j) = derivative(u, {i, j});
      h(j, i) = h(i, j);
    }
  }
  return h;
}

// Real partials expand into Wirtinger derivatives:
// d/dx = d/dz + d/dzbar, d/dy = i (d/dz - d/dzbar).
cplx PolyTable::derivative(const RVec& u, const std::vector<int>& axes) const {
  if (u.size() != 2 * n_) throw DimensionMismatch("PolyTable: point dimension");
  std::vector<cplx> z(n_), zb(n_);
  for (int a = 0; a < n_; ++a) {
    z[a] = complex_coordinate(u, a);
    zb[a] = std::conj(z[a]);
  }
  const std::size_t order = axes.size();
  cplx total = 0.0;
  for (std::size_t choice = 0; choice < (std::size_t{1} << order); ++choice) {
    cplx weight = 1.0;
    std::vector<int> dh(n_, 0), da(n_, 0);
    for (std::size_t t = 0; t < order; ++t) {
      const int axis = axes[t];
      const int alpha = axis / 2;
      const bool is_y = axis % 2 == 1;
      const bool anti = (choice >> t) & 1u;
      if (anti) {
        ++da[alpha];
        weight *= is_y ? -I : cplx{1.0};
      } else {
        ++dh[alpha];
        weight *= is_y ? I : cplx{1.0};
      }
    }
    cplx partial = 0.0;
    for (const auto& [key, c] : terms_) {
      cplx term = c;
      for (int a = 0; a < n_ && term != cplx{}; ++a) {
        const int p = key[a];
        const int q = key[n_ + a];
        if (p < dh[a] || q < da[a]) {
          term = 0.0;
          break;
        }
        double fall = 1.0;
        for (int s = 0; s < dh[a]; ++s) fall *= p - s;
        for (int s = 0; s < da[a]; ++s) fall *= q - s;
        term *= fall * ipow(z[a], p - dh[a]) * ipow(zb[a], q - da[a]);
      }
      partial += term;
    }
    total += weight * partial;
  }
  return total;
}

namespace poly1 {

std::vector<cplx> derivative(const std::vector<cplx>& p) {
  if (p.size() <= 1) return {cplx{}};
  std::vector<cplx> d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

std::vector<cplx> multiply(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> r(a.size() + b.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

cplx evaluate(const std::vector<cplx>& p, cplx z) {
  cplx r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * z + *it;
  return r;
}

}  // namespace poly1

}  // namespace bargmann
