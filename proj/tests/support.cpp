#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bargmann/theta.hpp"

namespace support {

using namespace bargmann;

double winding_number(const std::function<cplx(double, double)>& f, double x0, double y0, double side,
                      int samples_per_edge) {
  const double corners[5][2] = {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}, {x0, y0}};
  double total = 0.0;
  cplx prev = f(x0, y0);
  for (int e = 0; e < 4; ++e) {
    for (int i = 1; i <= samples_per_edge; ++i) {
      const double t = static_cast<double>(i) / samples_per_edge;
      const double x = corners[e][0] + t * (corners[e + 1][0] - corners[e][0]);
      const double y = corners[e][1] + t * (corners[e + 1][1] - corners[e][1]);
      const cplx cur = f(x, y);
      total += std::arg(cur / prev);
      prev = cur;
    }
  }
  return total / (2.0 * pi);
}

int theta_zero_count(int k, int j) {
  const ThetaCombination th = theta_basis(k, j);
  // Offset corner keeps the zeros ((a + 1/2)/k, 1/2 - j/k) off the contour.
  const double w = winding_number([&](double x, double y) { return evaluate_theta(th, x, y).value; }, 0.0137,
                                  0.0291, 1.0, 400 * k);
  return static_cast<int>(std::lround(w));
}

Hausdorff hausdorff_to_z2_plane(const std::vector<RVec>& points, double r, double spacing) {
  Hausdorff out;
  for (const auto& p : points) out.locus_to_set = std::max(out.locus_to_set, std::hypot(p[0], p[1]));
  std::vector<RVec> samples;
  for (double rho = 0.0; rho <= r + 1e-12; rho += spacing) {
    const int m = std::max(1, static_cast<int>(std::ceil(2.0 * pi * rho / spacing)));
    for (int i = 0; i < m; ++i) {
      RVec u = RVec::Zero(4);
      u[2] = rho * std::cos(2.0 * pi * i / m);
      u[3] = rho * std::sin(2.0 * pi * i / m);
      samples.push_back(u);
    }
  }
  for (const auto& s : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, (p - s).norm());
    out.set_to_locus = std::max(out.set_to_locus, best);
  }
  return out;
}

std::shared_ptr<const ClosedFormSection> sphere_section(double radius, bool with_hessian) {
  auto f = std::make_shared<ClosedFormSection>();
  f->n = 2;
  f->value = [radius](const RVec& u) {
    return cplx(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] - radius * radius, u[3]);
  };
  f->gradient = [](const RVec& u) {
    CVec g(4);
    g << 2.0 * u[0], 2.0 * u[1], 2.0 * u[2], cplx(0.0, 1.0);
    return g;
  };
  if (with_hessian) {
    f->hessian = [](const RVec&) {
      CMat h = CMat::Zero(4, 4);
      h(0, 0) = h(1, 1) = h(2, 2) = 2.0;
      return h;
    };
  }
  return f;
}

double sup_difference(const GridSection& a, const GridSection& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

}  // namespace support
