#include "detshock/gas_model.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "detshock/errors.hpp"

namespace detshock {

void validate(const GasParams& g) {
  if (!(g.gamma > 1.0) || !std::isfinite(g.gamma))
    throw DomainError("gamma must be > 1, got " + std::to_string(g.gamma));
  if (!(g.b0_bernoulli > 0.0) || !std::isfinite(g.b0_bernoulli))
    throw DomainError("Bernoulli constant must be > 0");
}

double enthalpy(const GasParams& g, double rho) {
  if (rho < 0.0) throw DomainError("enthalpy: negative density");
  return std::pow(rho, g.gamma - 1.0) / (g.gamma - 1.0);
}

double enthalpy_inverse(const GasParams& g, double h) {
  if (h < 0.0) throw DomainError("enthalpy_inverse: negative argument");
  return std::pow((g.gamma - 1.0) * h, 1.0 / (g.gamma - 1.0));
}

double sound_speed(const GasParams& g, double rho) {
  if (!(rho > 0.0)) throw DomainError("sound_speed: density must be > 0");
  return std::pow(rho, 0.5 * (g.gamma - 1.0));
}

double speed(const FlowState& s) { return std::hypot(s.u1, s.u2); }

double mach(const GasParams& g, const FlowState& s) {
  return speed(s) / sound_speed(g, s.rho);
}

double bernoulli_residual(const GasParams& g, const FlowState& s) {
  return 0.5 * (s.u1 * s.u1 + s.u2 * s.u2) + enthalpy(g, s.rho) -
         g.b0_bernoulli;
}

double h_function(const GasParams& g, double rho) {
  if (rho < 0.0) throw DomainError("h_function: negative density");
  return rho * rho * (g.b0_bernoulli - enthalpy(g, rho));
}

double h_prime(const GasParams& g, double rho) {
  if (rho < 0.0) throw DomainError("h_prime: negative density");
  return 2.0 * rho * g.b0_bernoulli -
         std::pow(rho, g.gamma) * (g.gamma + 1.0) / (g.gamma - 1.0);
}

double rho_sonic(const GasParams& g) {
  return std::pow(2.0 * (g.gamma - 1.0) * g.b0_bernoulli / (g.gamma + 1.0),
                  1.0 / (g.gamma - 1.0));
}

double rho_max(const GasParams& g) {
  return std::pow((g.gamma - 1.0) * g.b0_bernoulli, 1.0 / (g.gamma - 1.0));
}

double zeta_sonic(const GasParams& g) {
  const double rs = rho_sonic(g);
  return 2.0 * rs * rs * (g.gamma - 1.0) * g.b0_bernoulli / (g.gamma + 1.0);
}

double rho_hat(const GasParams& g, double zeta, double rel_tol) {
  if (!std::isfinite(zeta) || zeta < 0.0)
    throw RangeError("rho_hat: |grad psi|^2 must be finite and >= 0");
  const double zs = zeta_sonic(g);
  if (zeta >= zs)
    throw RangeError("rho_hat: |grad psi|^2 = " + std::to_string(zeta) +
                     " reaches the sonic bound " + std::to_string(zs));
  const double hi = rho_max(g);
  if (zeta == 0.0) return hi;
  const double lo = rho_sonic(g);
  const double target = 0.5 * zeta;
  auto fn = [&](double rho) {
    return std::make_pair(h_function(g, rho) - target, h_prime(g, rho));
  };
  int digits = static_cast<int>(std::ceil(-std::log2(rel_tol))) + 1;
  if (digits > 52) digits = 52;
  std::uintmax_t iters = 200;
  // H is concave and decreasing on the branch, so Newton from rho_max
  // approaches the root monotonically; the bracket guards the sonic end.
  return boost::math::tools::newton_raphson_iterate(fn, hi, lo, hi, digits,
                                                    iters);
}

double mach_of_rho(const GasParams& g, double rho) {
  if (!(rho > 0.0)) throw DomainError("mach_of_rho: density must be > 0");
  const double h = h_function(g, rho);
  return std::sqrt(std::max(0.0, 2.0 * h / std::pow(rho, g.gamma + 1.0)));
}

FlowState incoming_state_limit(const GasParams& g, double eps) {
  const double gm1 = g.gamma - 1.0;
  const double base = gm1 * g.b0_bernoulli / (0.5 * gm1 + eps * eps);
  FlowState s;
  s.u1 = std::sqrt(base);
  s.u2 = 0.0;
  s.rho = eps == 0.0 ? 0.0
                     : std::pow(eps, 2.0 / gm1) * std::pow(base, 1.0 / gm1);
  return s;
}

FlowState incoming_state(const GasParams& g, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("incoming_state: eps must lie in (0, 1)");
  return incoming_state_limit(g, eps);
}

}  // namespace detshock
