#include <algorithm>
#include <cmath>

#include "bargmann/backends.hpp"
#include "bargmann/error.hpp"

namespace bargmann {

Path Path::segment(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("Path::segment: endpoint dimensions differ");
  const RVec d = b - a;
  Path path;
  path.pieces.push_back({[a, d](double t) { return GeodesicState{a + t * d, d}; }, d.norm()});
  return path;
}

Path Path::polyline(const std::vector<RVec>& points) {
  if (points.size() < 2) throw InvalidArgument("Path::polyline: need at least two points");
  Path path;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    Path s = segment(points[i], points[i + 1]);
    path.pieces.push_back(std::move(s.pieces.front()));
  }
  return path;
}

Path Path::constant(const RVec& p) {
  Path path;
  const RVec zero = RVec::Zero(p.size());
  path.pieces.push_back({[p, zero](double) { return GeodesicState{p, zero}; }, 0.0});
  return path;
}

Path Path::square_loop(const RVec& corner, double eps, int alpha) {
  if (2 * alpha + 1 >= corner.size() || alpha < 0) {
    throw DimensionMismatch("Path::square_loop: plane index out of range");
  }
  RVec ex = RVec::Zero(corner.size());
  RVec ey = RVec::Zero(corner.size());
  ex[2 * alpha] = eps;
  ey[2 * alpha + 1] = eps;
  return polyline({corner, corner + ex, corner + ex + ey, corner + ey, corner});
}

Path Path::reversed() const {
  Path out;
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
    auto f = it->state;
    out.pieces.push_back({[f](double t) {
                            GeodesicState s = f(1.0 - t);
                            s.velocity = -s.velocity;
                            return s;
                          },
                          it->length_hint});
  }
  return out;
}

TransportResult parallel_transport(const PrequantizedKahler& backend, int k, const Path& path,
                                   double max_step) {
  if (!(max_step > 0.0)) throw InvalidArgument("parallel_transport: max_step must be positive");
  cplx c = 1.0;
  auto rate = [&](const GeodesicState& s) {
    if (!backend.in_atlas(s.position)) {
      throw AtlasCoverage("parallel_transport: path leaves the " + backend.name() + " chart");
    }
    // dc/dt = -A_k(gamma') c with A_k = i k a.
    return -I * static_cast<double>(k) * backend.connection_coefficients(s.position).dot(s.velocity);
  };
  for (const auto& piece : path.pieces) {
    const int steps = std::max(1, static_cast<int>(std::ceil(piece.length_hint / max_step)));
    const double dt = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = s * dt;
      const cplx r1 = rate(piece.state(t));
      const cplx rm = rate(piece.state(t + 0.5 * dt));
      const cplx r4 = rate(piece.state(t + dt));
      const cplx k1 = r1 * c;
      const cplx k2 = rm * (c + 0.5 * dt * k1);
      const cplx k3 = rm * (c + 0.5 * dt * k2);
      const cplx k4 = r4 * (c + dt * k3);
      c += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    throw IntegrationFailure("parallel_transport: non-finite fiber coordinate");
  }
  const double m = std::abs(c);
  return {c / m, std::abs(m - 1.0)};
}

}  // namespace bargmann
