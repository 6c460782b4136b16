#ifndef DETSHOCK_GAS_MODEL_HPP_
#define DETSHOCK_GAS_MODEL_HPP_

namespace detshock {

struct GasParams {
  double gamma = 2.0;         // adiabatic exponent, > 1
  double b0_bernoulli = 1.0;  // Bernoulli constant, > 0
};

struct FlowState {
  double rho = 1.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

// Throws DomainError unless gamma > 1 and b0_bernoulli > 0.
void validate(const GasParams& g);

double enthalpy(const GasParams& g, double rho);
// Inverse of the enthalpy on [0, inf).
double enthalpy_inverse(const GasParams& g, double h);

double sound_speed(const GasParams& g, double rho);
double speed(const FlowState& s);
double mach(const GasParams& g, const FlowState& s);
double bernoulli_residual(const GasParams& g, const FlowState& s);

// H(rho) = rho^2 (B0 - h(rho)) and its derivative.
double h_function(const GasParams& g, double rho);
double h_prime(const GasParams& g, double rho);

double rho_sonic(const GasParams& g);
double rho_max(const GasParams& g);
// 2 H(rho_sonic): the supremum of admissible |grad psi|^2.
double zeta_sonic(const GasParams& g);

// Subsonic root of H(rho) = zeta/2 on (rho_sonic, rho_max].
double rho_hat(const GasParams& g, double zeta, double rel_tol = 1e-12);

double mach_of_rho(const GasParams& g, double rho);

// Horizontal incoming state with Mach number 1/eps, 0 < eps < 1.
FlowState incoming_state(const GasParams& g, double eps);
// Same formula without the eps > 0 restriction; eps = 0 gives rho = 0.
FlowState incoming_state_limit(const GasParams& g, double eps);

}  // namespace detshock

#endif  // DETSHOCK_GAS_MODEL_HPP_
