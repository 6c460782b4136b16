#include "detshock/shock_polar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "detshock/errors.hpp"

namespace detshock {

namespace {

void check_eps(double eps, const PolarOptions& opt) {
  if (!(eps > 0.0 && eps <= opt.eps_guard))
    throw DomainError("eps must lie in (0, eps_guard]; eps_guard = " +
                      std::to_string(opt.eps_guard));
}

void check_theta(double theta_w) {
  if (!(theta_w > 0.0 && theta_w < 0.5 * std::numbers::pi))
    throw DomainError("theta_w must lie in (0, pi/2)");
}

// Density from Bernoulli for a given speed squared.
double rho_of_q2(const GasParams& g, double q2) {
  const double h = g.b0_bernoulli - 0.5 * q2;
  if (h <= 0.0) return 0.0;
  return enthalpy_inverse(g, h);
}

// Magnitudes of the terms in each residual component; rows are divided by
// these so that tiny strong-branch unknowns keep full relative precision.
std::array<double, 3> term_scales(const GasParams& g, const FlowState& in,
                                  double kappa, const PolarSolution& x,
                                  double u_floor) {
  return {std::max(std::abs(x.rho * x.u) * std::max(std::abs(x.s * kappa), 1.0),
                   in.rho * in.u1),
          std::max({std::abs(x.u * (x.s + kappa)), std::abs(x.s * in.u1),
                    kappa * u_floor}),
          std::max({0.5 * x.u * x.u * (1.0 + kappa * kappa),
                    enthalpy(g, x.rho), g.b0_bernoulli})};
}

bool newton_at(const GasParams& g, const FlowState& in, double kappa,
               PolarSolution& x, const PolarOptions& opt) {
  // Floors for the unknown scales: the smallest downstream speed compatible
  // with mass conservation, and the slope it induces.
  const double u_floor =
      std::max(in.rho * in.u1 / rho_max(g), 1e-300);
  const double s_floor = std::max(kappa * u_floor / std::max(in.u1, 1e-300), 1e-300);
  for (int it = 0; it < opt.newton_max_iter; ++it) {
    if (!(x.rho > 0.0) || !std::isfinite(x.u) || !std::isfinite(x.s))
      return false;
    const auto r = rh_residual(g, in, kappa, x.rho, x.u, x.s);
    const auto rs = term_scales(g, in, kappa, x, u_floor);
    const Eigen::Vector3d cs(std::abs(x.rho), std::max(std::abs(x.u), u_floor),
                             std::max(std::abs(x.s), s_floor));
    Eigen::Vector3d rv(r[0] / rs[0], r[1] / rs[1], r[2] / rs[2]);
    Eigen::Matrix3d jac;
    const double sk = x.s * kappa - 1.0;
    jac << x.u * sk, x.rho * sk, x.rho * x.u * kappa,  //
        0.0, x.s + kappa, x.u - in.u1,                  //
        std::pow(x.rho, g.gamma - 2.0), x.u * (1.0 + kappa * kappa), 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) jac(i, j) *= cs[j] / rs[i];
    Eigen::PartialPivLU<Eigen::Matrix3d> lu(jac);
    if (!(std::abs(lu.determinant()) > 1e-300)) return false;
    const Eigen::Vector3d dx = lu.solve(-rv);
    x.rho += dx[0] * cs[0];
    x.u += dx[1] * cs[1];
    x.s += dx[2] * cs[2];
    if (dx.cwiseAbs().maxCoeff() <= opt.newton_tol) {
      if (!(x.rho > 0.0)) return false;
      const auto rf = rh_residual(g, in, kappa, x.rho, x.u, x.s);
      const auto sf = term_scales(g, in, kappa, x, u_floor);
      return std::abs(rf[0]) <= 1e-10 * sf[0] && std::abs(rf[1]) <= 1e-10 * sf[1] &&
             std::abs(rf[2]) <= 1e-10 * sf[2];
    }
  }
  return false;
}

double distance(const PolarSolution& a, const PolarSolution& b) {
  return std::abs(a.rho - b.rho) + std::abs(a.u - b.u) + std::abs(a.s - b.s);
}

}  // namespace

std::string to_string(Branch b) {
  return b == Branch::Strong ? "strong" : "weak";
}

std::array<double, 3> rh_residual(const GasParams& g, const FlowState& in,
                                  double kappa, double rho, double u,
                                  double s) {
  if (!(rho > 0.0)) throw DomainError("rh_residual: density must be > 0");
  const double rin = in.rho, uin = in.u1;
  return {rho * u * (s * kappa - 1.0) + rin * uin,
          u * (s + kappa) - s * uin,
          0.5 * u * u * (1.0 + kappa * kappa) + enthalpy(g, rho) -
              g.b0_bernoulli};
}

PolarSolution strong_limit(const GasParams& g, double /*kappa_w*/) {
  return {enthalpy_inverse(g, g.b0_bernoulli), 0.0, 0.0, Branch::Strong};
}

PolarSolution weak_limit(const GasParams& g, double kappa) {
  const double k2 = kappa * kappa;
  return {enthalpy_inverse(g, g.b0_bernoulli * k2 / (1.0 + k2)),
          std::sqrt(2.0 * g.b0_bernoulli) / (1.0 + k2), 1.0 / kappa,
          Branch::Weak};
}

PolarSolution newton_polish(const GasParams& g, double eps, double kappa,
                            PolarSolution guess, const PolarOptions& opt) {
  const FlowState in = incoming_state_limit(g, eps);
  PolarSolution x = guess;
  if (!newton_at(g, in, kappa, x, opt))
    throw ConvergenceError("RH Newton iteration did not converge");
  return x;
}

EntropyMargins entropy_margins(const GasParams& g, const FlowState& in,
                               double kappa, const PolarSolution& sol) {
  (void)g;
  const double nrm = std::sqrt(1.0 + sol.s * sol.s);
  const double un = sol.u * (1.0 - kappa * sol.s) / nrm;
  const double uin = in.u1 / nrm;
  return {sol.rho - in.rho, uin - un, un};
}

BranchPair solve_branches(const GasParams& g, double eps, double theta_w,
                          const PolarOptions& opt) {
  validate(g);
  check_eps(eps, opt);
  check_theta(theta_w);
  const double kappa = std::tan(theta_w);
  PolarSolution strong = strong_limit(g, kappa);
  PolarSolution weak = weak_limit(g, kappa);

  double e_prev = 0.0;
  double e_next = std::min(eps, opt.eps_start);
  double growth = opt.eps_growth;
  bool failed = false;
  std::string why;
  while (true) {
    const FlowState in = incoming_state_limit(g, e_next);
    PolarSolution s1 = strong, w1 = weak;
    const bool ok = newton_at(g, in, kappa, s1, opt) &&
                    newton_at(g, in, kappa, w1, opt) &&
                    distance(s1, w1) > 1e-6 * (1.0 + s1.rho + w1.rho) &&
                    s1.u < w1.u;
    if (ok) {
      strong = s1;
      weak = w1;
      e_prev = e_next;
      if (e_prev >= eps) break;
      e_next = std::min(eps, e_prev > 0.0 ? e_prev * growth : opt.eps_start);
      continue;
    }
    // Shrink the continuation step; give up when it stalls.
    const double mid = e_prev > 0.0 ? std::sqrt(e_prev * e_next)
                                    : 0.5 * e_next;
    if (e_prev > 0.0 && e_next / e_prev < 1.0 + 1e-7) {
      failed = true;
      why = "continuation stalled";
      break;
    }
    if (e_prev == 0.0 && e_next < 1e-14) {
      failed = true;
      why = "no root near the eps = 0 seeds";
      break;
    }
    e_next = mid;
    growth = std::max(1.0 + 1e-3, std::sqrt(growth));
  }

  if (failed) {
    double theta_det = -1.0;
    try {
      theta_det = detachment_angle(g, eps, opt);
    } catch (const Error&) {
    }
    std::ostringstream msg;
    msg.precision(10);
    if (theta_det > 0.0 && theta_w >= theta_det - 1e-9) {
      msg << "strong and weak branches collide: theta_w = " << theta_w
          << " rad is at or above the detachment angle " << theta_det
          << " rad (detached shock, no attached root)";
      throw BranchCollisionError(msg.str());
    }
    msg << "branch continuation failed (" << why << ") at eps = " << e_next
        << "; last accepted eps = " << e_prev << ", strong (rho,u,s) = ("
        << strong.rho << ", " << strong.u << ", " << strong.s << ")";
    throw ConvergenceError(msg.str());
  }

  // The normal speed u (1 - kappa s) cancels on the weak branch as eps -> 0;
  // a margin within its own round-off is unresolved rather than violated.
  const FlowState in = incoming_state(g, eps);
  auto admissible = [&](const PolarSolution& x) {
    const EntropyMargins m = entropy_margins(g, in, kappa, x);
    const double ulp = 8.0 * std::numeric_limits<double>::epsilon() *
                       std::abs(x.u) * (1.0 + std::abs(kappa * x.s));
    return m.density > 0.0 && m.normal_drop > 0.0 && m.normal_speed > -ulp;
  };
  if (!admissible(strong) || !admissible(weak) || !(strong.u > 0.0) ||
      !(strong.s >= 0.0))
    throw ConvergenceError("converged roots violate the entropy condition");
  return {strong, weak};
}

double normal_shock_speed(const GasParams& g, double eps) {
  const FlowState in = incoming_state(g, eps);
  const double flux = in.rho * in.u1;
  const double qs =
      std::sqrt(2.0 * (g.gamma - 1.0) * g.b0_bernoulli / (g.gamma + 1.0));
  auto fn = [&](double q) { return rho_of_q2(g, q * q) * q - flux; };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(
      fn, 0.0, qs, -flux, fn(qs), boost::math::tools::eps_tolerance<double>(52),
      iters);
  return 0.5 * (r.first + r.second);
}

double polar_height(const GasParams& g, double eps, double u) {
  const FlowState in = incoming_state(g, eps);
  const double uin = in.u1;
  const double u0 = normal_shock_speed(g, eps);
  if (u <= u0 || u >= uin) return 0.0;
  const double flux = in.rho * uin;
  auto G = [&](double v) {
    const double rho = rho_of_q2(g, u * u + v * v);
    return rho * (u * (uin - u) - v * v) - flux * (uin - u);
  };
  const double vmax = std::sqrt(u * (uin - u));
  const double g0 = G(0.0), g1 = G(vmax);
  if (!(g0 > 0.0) || !(g1 < 0.0)) {
    if (g0 <= 0.0) return 0.0;
    throw ConvergenceError("polar root not bracketed");
  }
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(
      G, 0.0, vmax, g0, g1, boost::math::tools::eps_tolerance<double>(52),
      iters);
  return 0.5 * (r.first + r.second);
}

PolarCurve polar_curve(const GasParams& g, double eps, int n_samples,
                       const PolarOptions& opt) {
  validate(g);
  check_eps(eps, opt);
  if (n_samples < 16) throw DomainError("polar_curve: n_samples must be >= 16");
  PolarCurve pc;
  pc.u0 = normal_shock_speed(g, eps);
  pc.u_inf = incoming_state(g, eps).u1;
  const double mid = 0.5 * (pc.u0 + pc.u_inf);
  const double half = 0.5 * (pc.u_inf - pc.u0);
  for (int k = 0; k < n_samples; ++k) {
    const double u =
        mid - half * std::cos(std::numbers::pi * k / (n_samples - 1));
    if (k == 0 || k == n_samples - 1) {
      pc.samples.emplace_back(k == 0 ? pc.u0 : pc.u_inf, 0.0);
      continue;
    }
    try {
      pc.samples.emplace_back(u, polar_height(g, eps, u));
    } catch (const Error&) {
      pc.dropped.push_back(u);
    }
  }
  return pc;
}

double detachment_angle(const GasParams& g, double eps,
                        const PolarOptions& opt) {
  const PolarCurve pc = polar_curve(g, eps, opt.detachment_samples, opt);
  auto angle = [&](double u) { return std::atan2(polar_height(g, eps, u), u); };
  std::size_t best = 1;
  for (std::size_t k = 1; k + 1 < pc.samples.size(); ++k) {
    const auto& [u, v] = pc.samples[k];
    const auto& [ub, vb] = pc.samples[best];
    if (std::atan2(v, u) > std::atan2(vb, ub)) best = k;
  }
  double a = pc.samples[best - 1].first;
  double b = pc.samples[best + 1].first;
  // Golden-section search for the maximum of the ray angle.
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = angle(c), fd = angle(d);
  while (b - a > 1e-13 * (1.0 + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = angle(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = angle(d);
    }
  }
  return angle(0.5 * (a + b));
}

double q_gamma(const GasParams& g, double eps, double theta_w,
               const PolarOptions& opt) {
  const PolarSolution ref = strong_limit(g, std::tan(theta_w));
  const auto br = solve_branches(g, eps, theta_w, opt);
  return std::sqrt(std::pow(br.strong.rho - ref.rho, 2) +
                   std::pow(br.strong.u, 2) + std::pow(br.strong.s, 2));
}

double q_gamma_rate(const GasParams& g, const std::vector<double>& eps_list,
                    double theta_w, const PolarOptions& opt) {
  if (eps_list.size() < 3)
    throw DomainError("q_gamma_rate: need at least 3 eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw DomainError("q_gamma_rate: eps_list must be strictly decreasing");
  std::vector<double> xs, ys;
  for (double e : eps_list) {
    xs.push_back(std::log(e));
    ys.push_back(std::log(q_gamma(g, e, theta_w, opt)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detshock
