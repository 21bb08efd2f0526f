#include <cmath>
#include <random>

#include "doctest.h"

#include "bargmann/diagnostics.hpp"
#include "bargmann/error.hpp"
#include "bargmann/model_bundle.hpp"

using namespace bargmann;

namespace {

RVec pt(std::initializer_list<double> v) {
  RVec u(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) u[i++] = x;
  return u;
}

PolyTable gaussian_poly(int n) { return PolyTable(n).add(std::vector<int>(n, 0), 1.0); }

}  // namespace

TEST_SUITE("model_bundle") {

TEST_CASE("model connection values") {
  CHECK(std::abs(model_connection(pt({0, 0}), pt({0.3, -1.2}))) == 0.0);
  const cplx v = model_connection(pt({1, 0}), pt({0, 1}));
  CHECK(v.real() == doctest::Approx(0.0));
  CHECK(v.imag() == doctest::Approx(-pi).epsilon(1e-15));
  const RVec z = pt({0.4, -0.7, 0.2, 0.9});
  CHECK(std::abs(model_connection(z, z)) < 1e-15);
  CHECK_THROWS_AS(model_connection(pt({1, 0}), pt({1, 0, 0, 0})), DimensionMismatch);
}

TEST_CASE("covariant derivative of the Gaussian against a fine difference oracle") {
  // Oracle: centered differences at h/4 of exp(-pi|z|^2/2) at (0.5, 0); the
  // connection term vanishes there since a_x = pi y.
  const double oracle = -1.0606517987096094;
  double errs[2];
  int idx = 0;
  for (int pts : {17, 33}) {
    const BallDomain d(1, pts, 1.0);
    const GridSection g = bargmann_section(gaussian_poly(1), d);
    const cplx fd = covariant_derivative(g, pt({0.5, 0}), pt({1, 0}), DerivativeMode::finite_difference);
    const cplx an = covariant_derivative(g, pt({0.5, 0}), pt({1, 0}), DerivativeMode::analytic);
    CHECK(std::abs(an - oracle) < 1e-8);
    errs[idx++] = std::abs(fd - oracle);
  }
  const double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("trivial covariant derivatives") {
  const BallDomain d(1, 17, 1.0);
  const GridSection one = GridSection::from_values(d, std::vector<cplx>(d.node_count(), 1.0));
  CHECK(std::abs(covariant_derivative(one, pt({0, 0}), pt({1, 0}), DerivativeMode::finite_difference)) < 1e-15);
  const GridSection zero = GridSection::from_values(d, std::vector<cplx>(d.node_count(), 0.0));
  CHECK(std::abs(covariant_derivative(zero, pt({0.25, 0.5}), pt({0.3, 1}), DerivativeMode::finite_difference)) == 0.0);
}

TEST_CASE("covariant derivative is complex-linear in s and real-linear in v") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const BallDomain d(2, 9, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    PolyTable p(2), q(2);
    p.add({1, 0}, {U(rng), U(rng)}).add({0, 2}, {U(rng), U(rng)});
    q.add({0, 0}, {U(rng), U(rng)}).add({1, 1}, {U(rng), U(rng)}, {0, 1});
    const cplx c{U(rng), U(rng)};
    PolyTable lin(2);
    for (const auto& [e, v] : p.terms()) {
      std::vector<int> holo(e.begin(), e.begin() + 2), anti(e.begin() + 2, e.end());
      lin.add(holo, c * v, anti);
    }
    for (const auto& [e, v] : q.terms()) {
      std::vector<int> holo(e.begin(), e.begin() + 2), anti(e.begin() + 2, e.end());
      lin.add(holo, v, anti);
    }
    const GridSection sp = polynomial_section(p, d), sq = polynomial_section(q, d), sl = polynomial_section(lin, d);
    const RVec z = pt({0.25, -0.25, 0.5, 0.0});
    const RVec v = pt({U(rng), U(rng), U(rng), U(rng)});
    const RVec w = pt({U(rng), U(rng), U(rng), U(rng)});
    const double a = U(rng), b = U(rng);
    for (auto mode : {DerivativeMode::analytic, DerivativeMode::finite_difference}) {
      const cplx lhs = covariant_derivative(sl, z, v, mode);
      const cplx rhs = c * covariant_derivative(sp, z, v, mode) + covariant_derivative(sq, z, v, mode);
      CHECK(std::abs(lhs - rhs) < 1e-12);
      const cplx l2 = covariant_derivative(sp, z, a * v + b * w, mode);
      const cplx r2 = a * covariant_derivative(sp, z, v, mode) + b * covariant_derivative(sp, z, w, mode);
      CHECK(std::abs(l2 - r2) < 1e-12);
    }
  }
}

TEST_CASE("dbar of the Gaussian and of conj(z) times the Gaussian") {
  const BallDomain d(1, 33, 1.0);
  const GridSection g = bargmann_section(gaussian_poly(1), d);
  for (std::size_t node : d.ball_nodes(0.9)) {
    CHECK(dbar_operator(g, d.node_point(node), DerivativeMode::analytic).norm() < 1e-14);
  }
  CHECK(dbar_operator(g, pt({0.25, 0.5}), DerivativeMode::finite_difference).norm() < 1e-2);

  // Symbolic oracle: 1/2 (d_x + i d_y)(x - i y) e^{-pi r^2/2} at the origin = 1.
  const GridSection s = polynomial_section(PolyTable(1).add({0}, 1.0, {1}), d);
  const CVec an = dbar_operator(s, pt({0, 0}), DerivativeMode::analytic);
  CHECK(std::abs(an[0] - 1.0) < 1e-14);
  const CVec fd = dbar_operator(s, pt({0, 0}), DerivativeMode::finite_difference);
  CHECK(std::abs(fd[0] - 1.0) < 1e-2);

  const GridSection zero = GridSection::from_values(d, std::vector<cplx>(d.node_count(), 0.0));
  CHECK(dbar_operator(zero, pt({0.5, 0.25}), DerivativeMode::finite_difference).norm() == 0.0);
}

TEST_CASE("unweight") {
  const BallDomain d(2, 9, 1.0);
  const GridSection g = unweight(bargmann_section(gaussian_poly(2), d));
  for (std::size_t node : d.ball_nodes()) CHECK(std::abs(g.at(node) - 1.0) < 1e-14);

  const GridSection z1 = unweight(bargmann_section(PolyTable(2).add({1, 0}, 1.0), d));
  for (std::size_t node : d.ball_nodes()) {
    const RVec u = d.node_point(node);
    CHECK(std::abs(z1.at(node) - complex_coordinate(u, 0)) < 1e-14);
    CHECK(ordinary_dbar(z1, u, DerivativeMode::analytic).norm() < 1e-14);
  }
  const GridSection zero = unweight(GridSection::from_values(d, std::vector<cplx>(d.node_count(), 0.0)));
  CHECK(std::abs(zero.at(17)) == 0.0);
}

TEST_CASE("bargmann_section values and errors") {
  const BallDomain d(1, 17, 1.0);
  const GridSection s = bargmann_section(PolyTable(1).add({2}, 1.0).add({0}, 2.0), d);
  // Direct evaluation oracle: 3 exp(-pi/2).
  CHECK(std::abs(s.evaluate(pt({1, 0})) - 0.62363872905228573) < 1e-15);
  const GridSection z = bargmann_section(PolyTable(1).add({1}, 1.0), d);
  CHECK(std::abs(z.evaluate(pt({0, 0}))) == 0.0);
  const GridSection empty = bargmann_section(PolyTable(1), d);
  CHECK(std::abs(empty.evaluate(pt({0.3, 0.1}))) == 0.0);
  REQUIRE(empty.notes.size() == 1);
  CHECK(empty.notes[0] == "empty coefficient table");
  CHECK_THROWS_AS(bargmann_section(PolyTable(1).add({0}, 1.0, {1}), d), InvalidArgument);
}

TEST_CASE("bargmann_section dbar: analytic vanishes, differences converge at second order") {
  const PolyTable p = PolyTable(2).add({1, 1}, {0.5, -1.0}).add({0, 3}, 0.25).add({0, 0}, 1.0);
  double errs[2];
  int idx = 0;
  for (int pts : {9, 17}) {
    const BallDomain d(2, pts, 1.0);
    const GridSection s = bargmann_section(p, d);
    CHECK(dbar_defect(s, 0.75, DerivativeMode::analytic) < 1e-10);
    errs[idx++] = dbar_operator(s, pt({0.25, 0.25, -0.5, 0.0}), DerivativeMode::finite_difference).norm();
  }
  const double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("holomorphy criterion equivalence on random polynomials") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> D(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial < 10 ? 1 : 2;
    const BallDomain d(n, n == 1 ? 17 : 7, 1.0);
    PolyTable p(n);
    for (int t = 0; t < 4; ++t) {
      std::vector<int> holo(n), anti(n, 0);
      int budget = D(rng);
      for (int a = 0; a < n; ++a) {
        holo[a] = budget == 0 ? 0 : std::uniform_int_distribution<int>(0, budget)(rng);
        budget -= holo[a];
      }
      if (trial % 3 == 0 && budget > 0) anti[0] = budget;
      p.add(holo, {U(rng), U(rng)}, anti);
    }
    const GridSection s = polynomial_section(p, d);
    const GridSection uw = unweight(s);
    double gap = 0.0;
    for (std::size_t node : d.ball_nodes()) {
      const RVec u = d.node_point(node);
      const CVec cov = dbar_operator(s, u, DerivativeMode::analytic);
      const CVec ord = ordinary_dbar(uw, u, DerivativeMode::analytic) * gaussian_weight(u);
      gap = std::max(gap, (cov - ord).cwiseAbs().maxCoeff());
    }
    CHECK(gap < 1e-8);
  }
}

TEST_CASE("curvature of the model connection") {
  const ConnectionField a2 = model_connection_field(2, BallDomain(2, 9, 1.0));
  const RVec z = pt({0.1, -0.2, 0.3, 0.05});
  const CMat F = curvature_of(a2, z, DerivativeMode::analytic, 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      cplx expect = 0.0;
      if (i % 2 == 0 && j == i + 1) expect = cplx(0, -2.0 * pi);
      if (j % 2 == 0 && i == j + 1) expect = cplx(0, 2.0 * pi);
      CHECK(std::abs(F(i, j) - expect) < 1e-12);
    }
  }
  const CMat Ffd = curvature_of(a2, z, DerivativeMode::finite_difference, 0.05);
  CHECK(std::abs(Ffd(0, 1) - cplx(0, -2.0 * pi)) < 1e-10);
  CHECK(std::abs(Ffd(0, 2)) < 1e-10);

  ConnectionField zero;
  zero.n = 1;
  zero.coefficients = [](const RVec&) { return RVec::Zero(2).eval(); };
  zero.jacobian = [](const RVec&) { return RMat::Zero(2, 2).eval(); };
  CHECK(curvature_of(zero, pt({0.2, 0.2}), DerivativeMode::analytic, 0.0).norm() == 0.0);
  CHECK(curvature_of(zero, pt({0.2, 0.2}), DerivativeMode::finite_difference, 0.1).norm() == 0.0);
}

TEST_CASE("radial flatness defect") {
  const BallDomain d(1, 33, 1.0);
  CHECK(radial_flatness_defect(model_connection_field(1, d)) < 1e-15);
  ConnectionField a;
  a.n = 1;
  a.domain = d;
  // A = -i pi x dx, so a = (-pi x, 0) and |A(z)(z)| = pi x^2.
  a.coefficients = [](const RVec& u) {
    RVec c(2);
    c << -pi * u[0], 0.0;
    return c;
  };
  CHECK(radial_flatness_defect(a) == doctest::Approx(pi).epsilon(1e-14));
  ConnectionField zero;
  zero.n = 1;
  zero.domain = d;
  zero.coefficients = [](const RVec&) { return RVec::Zero(2).eval(); };
  CHECK(radial_flatness_defect(zero) == 0.0);
}

}  // TEST_SUITE
