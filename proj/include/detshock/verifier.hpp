#ifndef DETSHOCK_VERIFIER_HPP_
#define DETSHOCK_VERIFIER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "detshock/elliptic_solver.hpp"
#include "detshock/free_boundary.hpp"
#include "detshock/gas_model.hpp"
#include "detshock/geometry.hpp"
#include "detshock/shock_polar.hpp"

namespace detshock {

struct TraceNode {
  double x2 = 0.0;
  double fp = 0.0;  // f'(x2)
  FlowState down;
  Vec2 nu, tau;
  double q = 0.0, Theta = 0.0, beta = 0.0;
};

struct ShockTraceState {
  FlowState up;
  std::vector<TraceNode> nodes;
};

// Downstream states at the shock nodes (i = 0) with normals from f'.
ShockTraceState build_trace(const BodyFittedGrid& grid, const StreamField& field,
                            const ShockCurve& f, const GasParams& g, double eps);

struct RhResiduals {
  double mass = 0.0;
  double tangential = 0.0;
};
RhResiduals check_rh(const ShockTraceState& trace);

EntropyMargins check_entropy(const ShockTraceState& trace);

struct SubsonicReport {
  double max_mach = 0.0;
  double sigma = 0.0;
};
SubsonicReport check_subsonic(const GasParams& g, const StreamField& field);

struct VelocitySigns {
  double min_u1 = 0.0;
  double min_u2 = 0.0;
  double stagnation_speed = 0.0;
  double ball_radius = 0.0;
  double nose_cell = 0.0;
};
VelocitySigns check_velocity_signs(const BodyFittedGrid& grid,
                                   const StreamField& field);

struct QMonotone {
  double min_forward_difference = 0.0;
  double q_first = 0.0;
  double q_last = 0.0;
};
QMonotone check_q_monotone(const ShockTraceState& trace);

// ((gamma + 1) eta^2 - 2 eta^(gamma + 1))/(gamma - 1) - 1
double f_eta(double gamma, double eta);
// (q^2 - u_inf^2)/(u_inf^2 (rho_inf^2/rho^2 - 1))
double sin2beta_closed(const FlowState& up, double q, double rho);

struct Convexity {
  double min_fpp = 0.0;
  double sin2beta_mismatch = 0.0;
  double max_f_eta = 0.0;
  double max_dsin2beta_dq = 0.0;
  int dq_pairs = 0;
};
Convexity check_convexity(const ShockCurve& f, const ShockTraceState& trace,
                          const GasParams& g);

struct Asymptotics {
  double far_field = 0.0;     // relative, averaged over the top 10% of t
  double fprime_dev = 0.0;    // |f'(L) - s_st|
};
Asymptotics check_asymptotics(const BodyFittedGrid& grid,
                              const StreamField& field, const ShockCurve& f,
                              const BackgroundPair& bg);

struct CheckLine {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "<", ">"
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckLine> lines;
  bool all_pass() const;
  const CheckLine* find(const std::string& name) const;
  std::string text() const;
};

struct VerifyTolerances {
  double rh = 1e-3;
  double detach_fraction = 0.5;  // min(b - f) >= fraction * d0
  double mach_margin = 0.05;
  double sign_factor = 1e-8;     // tol_sign = factor * u_inf
  double cvx_factor = 10.0;      // tol_cvx = factor * dt^2 * s_st / h
  double q_factor = 10.0;        // tol_q = factor * dt^2 * q_st
  double sin2beta = 1e-3;
  double axis_oracle = 0.02;
  double tol_pde = 1e-6;
};

struct VerifyInput {
  const BodyFittedGrid* grid = nullptr;
  const StreamField* field = nullptr;
  const ShockCurve* shock = nullptr;
  const CutoffDomain* domain = nullptr;
  GasParams gas;
  double eps = 0.0;
  BackgroundPair background;
  // Boundary data the field must reproduce; physical data when empty.
  const BoundaryData* boundary = nullptr;
  // Blunt-body only checks (stagnation, strict q growth, axis oracle).
  bool blunt = true;
  VerifyTolerances tol;
};

VerificationReport verify(const VerifyInput& in);

}  // namespace detshock

#endif  // DETSHOCK_VERIFIER_HPP_
