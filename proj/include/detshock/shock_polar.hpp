#ifndef DETSHOCK_SHOCK_POLAR_HPP_
#define DETSHOCK_SHOCK_POLAR_HPP_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "detshock/gas_model.hpp"

namespace detshock {

enum class Branch { Strong, Weak };
std::string to_string(Branch b);

// Downstream state behind a straight oblique shock: velocity u*(1, kappa_w),
// shock line dx1/dx2 = s.
struct PolarSolution {
  double rho = 0.0;
  double u = 0.0;
  double s = 0.0;
  Branch branch = Branch::Strong;
};

struct BranchPair {
  PolarSolution strong;
  PolarSolution weak;
};

struct PolarCurve {
  std::vector<std::pair<double, double>> samples;  // (u, v), u ascending
  double u0 = 0.0;
  double u_inf = 0.0;
  std::vector<double> dropped;  // u values whose root-finding failed
};

struct PolarOptions {
  double eps_guard = 0.25;
  double newton_tol = 1e-13;
  int newton_max_iter = 60;
  double eps_start = 1e-6;   // first continuation step away from eps = 0
  double eps_growth = 1.5;   // geometric continuation ratio
  int detachment_samples = 257;
};

struct EntropyMargins {
  double density;       // rho - rho_inf
  double normal_drop;   // u_inf.nu - u.nu
  double normal_speed;  // u.nu
  bool ok() const {
    return density > 0.0 && normal_drop > 0.0 && normal_speed > 0.0;
  }
};

std::array<double, 3> rh_residual(const GasParams& g, const FlowState& incoming,
                                  double kappa_w, double rho, double u,
                                  double s);

// eps = 0 closed forms.
PolarSolution strong_limit(const GasParams& g, double kappa_w);
PolarSolution weak_limit(const GasParams& g, double kappa_w);

// Newton polish of a single root at fixed eps; throws ConvergenceError.
PolarSolution newton_polish(const GasParams& g, double eps, double kappa_w,
                            PolarSolution guess,
                            const PolarOptions& opt = {});

BranchPair solve_branches(const GasParams& g, double eps, double theta_w,
                          const PolarOptions& opt = {});

EntropyMargins entropy_margins(const GasParams& g, const FlowState& incoming,
                               double kappa_w, const PolarSolution& sol);

// Downstream subsonic speed for a normal shock: rho(q) q = rho_inf u_inf.
double normal_shock_speed(const GasParams& g, double eps);
// Height of the polar above u, 0 outside (u0, u_inf).
double polar_height(const GasParams& g, double eps, double u);

PolarCurve polar_curve(const GasParams& g, double eps, int n_samples,
                       const PolarOptions& opt = {});

double detachment_angle(const GasParams& g, double eps,
                        const PolarOptions& opt = {});

// |strong(eps) - strong(0)| in the (rho, u, s) coordinates.
double q_gamma(const GasParams& g, double eps, double theta_w,
               const PolarOptions& opt = {});

// Least-squares slope of log|strong(eps) - strong(0)| against log eps.
double q_gamma_rate(const GasParams& g, const std::vector<double>& eps_list,
                    double theta_w, const PolarOptions& opt = {});

}  // namespace detshock

#endif  // DETSHOCK_SHOCK_POLAR_HPP_
