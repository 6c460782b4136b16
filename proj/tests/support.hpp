#ifndef DETSHOCK_TESTS_SUPPORT_HPP_
#define DETSHOCK_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "detshock/free_boundary.hpp"

namespace detshock::testing {

inline constexpr double kPi = std::numbers::pi;
inline double deg(double d) { return d * kPi / 180.0; }

// Straight wedge whose apex sits where the default body's nose would be.
inline BluntBody nose_wedge(double theta_w, double h0 = 1.0) {
  return wedge_body(theta_w, 0.5 * h0 / std::tan(theta_w));
}

// Dirichlet data of the uniform strong-shock state on the wedge walls.
inline BoundaryData background_data(const GasParams& g, double eps,
                                    const BackgroundPair& bg) {
  BoundaryData bc = physical_boundary_data(g, eps);
  bc.sym = [bg](const Vec2& x) { return bg.psi0(x); };
  bc.body = [bg](const Vec2& x) { return bg.psi0(x); };
  return bc;
}

struct WedgeRun {
  FreeBoundaryResult result;
  double f_error = 0.0;    // max |f - f0| over shock nodes
  double psi_error = 0.0;  // max |psi - psi0| over grid nodes
  double psi_scale = 0.0;  // max |psi0|
  double h = 0.0;          // 1/(n_t - 1)
};

// Free-boundary solve on the straight wedge seeded from f0.
inline WedgeRun wedge_oracle(int ns, int nt, double eps = 0.05,
                             double theta_w = deg(30.0), double d0 = 1.0,
                             SeedProfile seed_kind = SeedProfile::Background) {
  const GasParams g;
  const BluntBody body = nose_wedge(theta_w);
  const BackgroundPair bg = background_pair(g, eps, theta_w, body.b0(), d0);
  const BoundaryData bc = background_data(g, eps, bg);
  FreeBoundaryOptions o;
  o.ns = ns;
  o.nt = nt;
  o.enforce_min_height = false;
  const double L = 4.0 * min_cutoff_height(body, d0);
  const auto nodes = shock_nodes(L, nt, o.grading);
  const ShockCurve seed =
      seed_kind == SeedProfile::Background
          ? seed_from_background(bg, nodes)
          : seed_shock(body, d0, L, g, eps, theta_w, nodes, seed_kind);
  WedgeRun w;
  w.result = solve_free_boundary(body, g, eps, theta_w, d0, L, o, &seed, &bc);
  const auto& r = w.result;
  for (std::size_t j = 0; j < r.shock.nodes().size(); ++j)
    w.f_error = std::max(w.f_error, std::abs(r.shock.values()[j] -
                                             bg.f0(r.shock.nodes()[j])));
  for (std::size_t k = 0; k < r.grid.size(); ++k) {
    const double p0 = bg.psi0({r.grid.x1[k], r.grid.x2[k]});
    w.psi_error = std::max(w.psi_error, std::abs(r.field.psi[k] - p0));
    w.psi_scale = std::max(w.psi_scale, std::abs(p0));
  }
  w.h = 1.0 / (nt - 1);
  return w;
}

struct MmsRun {
  double error = 0.0;
  double h = 0.0;
};

// Manufactured solution sin(pi x1) sin(pi x2) with variable coefficients on a
// 45 degree wedge domain cut by the vertical shock x1 = -1/2.
inline MmsRun mms_wedge(int n) {
  const double pi = kPi;
  const BluntBody body = wedge_body(deg(45.0), 0.0);
  const double L = 2.0, d0 = 0.5;
  const std::vector<double> xs = shock_nodes(L, 2 * n, 3.0);
  const std::vector<double> fs(xs.size(), -0.5);
  const CubicSpline f(xs, fs, 0.0, 0.0);
  const CutoffDomain dom = build_cutoff_domain(body, f, d0, L);
  const BodyFittedGrid grid = make_grid(dom, n, 2 * n, 3.0);
  auto exact = [pi](const Vec2& x) {
    return std::sin(pi * x.x()) * std::sin(pi * x.y());
  };
  Coefficients a;
  std::vector<double> src(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.x1[k], y = grid.x2[k];
    const double a11 = 2.0 + x * x, a12 = 0.3, a22 = 1.0 + y * y;
    a.a11.push_back(a11);
    a.a12.push_back(a12);
    a.a22.push_back(a22);
    const double pxx = -pi * pi * exact({x, y});
    const double pxy = pi * pi * std::cos(pi * x) * std::cos(pi * y);
    src[k] = a11 * pxx + 2.0 * a12 * pxy + a22 * pxx;
  }
  BoundaryData bc;
  bc.shock = bc.sym = bc.body = exact;
  const Vec2 nc = dom.n_c;
  bc.cutoff_flux = [nc, pi](const Vec2& x) {
    return pi * (nc.x() * std::cos(pi * x.x()) * std::sin(pi * x.y()) +
                 nc.y() * std::sin(pi * x.x()) * std::cos(pi * x.y()));
  };
  const auto psi = solve_linear_bvp(grid, a, bc, src);
  MmsRun r;
  for (std::size_t k = 0; k < grid.size(); ++k)
    r.error = std::max(r.error, std::abs(psi[k] - exact({grid.x1[k], grid.x2[k]})));
  r.h = 1.0 / (2 * n - 1);
  return r;
}

// Golden blunt-body run parameters.
struct GoldenSetup {
  GasParams gas;
  double eps = 0.05;
  double theta_w = deg(30.0);
  double h0 = 1.0;
  double d0 = 1.0;
  BluntBody body = default_body(deg(30.0), 1.0);
  double L() const { return 4.0 * min_cutoff_height(body, d0); }
};

inline FreeBoundaryResult golden_run(int ns = 64, int nt = 128,
                                     double L_factor = 4.0) {
  const GoldenSetup s;
  FreeBoundaryOptions o;
  o.ns = ns;
  o.nt = nt;
  return solve_free_boundary(s.body, s.gas, s.eps, s.theta_w, s.d0,
                             L_factor * min_cutoff_height(s.body, s.d0), o);
}

}  // namespace detshock::testing

#endif  // DETSHOCK_TESTS_SUPPORT_HPP_
