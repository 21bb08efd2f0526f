#pragma once

#include <map>
#include <vector>

#include "bargmann/types.hpp"

namespace bargmann {

/// Sparse polynomial in z_1..z_n and conj(z_1)..conj(z_n).
///
/// Keys are exponent tuples of length 2n: the first n entries are powers of
/// z_a, the last n powers of conj(z_a). A table with no conjugate powers is
/// holomorphic.
class PolyTable {
 public:
  using Exponents = std::vector<int>;

  explicit PolyTable(int n) : n_(n) {}

  int complex_dim() const { return n_; }
  bool empty() const { return terms_.empty(); }
  const std::map<Exponents, cplx>& terms() const { return terms_; }

  /// Adds coeff * z^holo * conj(z)^anti (anti defaults to all zeros).
  PolyTable& add(const std::vector<int>& holo, cplx coeff, const std::vector<int>& anti = {});

  bool holomorphic() const;
  int degree() const;

  cplx value(const RVec& u) const;
  /// Ordinary real partials d/du_i, i = 0..2n-1.
  CVec gradient(const RVec& u) const;
  CMat hessian(const RVec& u) const;

  /// Holomorphic coefficient of z^holo (0 when absent).
  cplx coefficient(const std::vector<int>& holo) const;

 private:
  cplx derivative(const RVec& u, const std::vector<int>& axes) const;

  int n_;
  std::map<Exponents, cplx> terms_;
};

/// One-variable complex polynomial helpers (coefficients in increasing degree).
namespace poly1 {
std::vector<cplx> derivative(const std::vector<cplx>& p);
std::vector<cplx> multiply(const std::vector<cplx>& a, const std::vector<cplx>& b);
cplx evaluate(const std::vector<cplx>& p, cplx z);
}  // namespace poly1

}  // namespace bargmann
