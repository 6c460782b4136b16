#ifndef DETSHOCK_FREE_BOUNDARY_HPP_
#define DETSHOCK_FREE_BOUNDARY_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detshock/elliptic_solver.hpp"
#include "detshock/gas_model.hpp"
#include "detshock/geometry.hpp"
#include "detshock/shock_polar.hpp"
#include "detshock/spline.hpp"

namespace detshock {

// Shock x1 = f(x2) sampled on [0, L] with clamped end slopes.
class ShockCurve {
 public:
  ShockCurve() = default;
  ShockCurve(std::vector<double> x2, std::vector<double> f, double slope0,
             double slope_end);

  double value(double x2) const { return spline_.value(x2); }
  double d1(double x2) const { return spline_.d1(x2); }
  double d2(double x2) const { return spline_.d2(x2); }
  const CubicSpline& spline() const { return spline_; }
  const std::vector<double>& nodes() const { return spline_.nodes(); }
  const std::vector<double>& values() const { return spline_.values(); }
  double L() const { return spline_.back(); }

 private:
  CubicSpline spline_;
};

enum class SeedProfile { Blend, Background };

struct FreeBoundaryOptions {
  int ns = 64;
  int nt = 128;
  double grading = 3.0;
  double damping = 0.5;
  double tol_f = 1e-10;
  int max_outer = 200;
  int max_backtracks = 12;
  bool enforce_min_height = true;
  SeedProfile seed = SeedProfile::Blend;
  SolverOptions inner;
  PolarOptions polar;
  double m1 = 0.0;  // iteration-set bounds; 0 disables the membership lines
  double m2 = 0.0;
  double norm_beta = 0.5;
  double norm_alpha = 0.5;
};

struct OuterRecord {
  double change = 0.0;       // max |f_{k+1} - f_k|
  double fixed_point = 0.0;  // max |H(f_k) - f_k|
  double lambda = 0.0;
  int picard_iterations = 0;
  double pde_residual = 0.0;
};

struct ReportEntry {
  std::string key;
  double value = 0.0;
  std::string tolerance;  // e.g. "<= 1e-3", "info"
};

struct SolveReport {
  bool converged = false;
  int outer_iterations = 0;
  std::vector<OuterRecord> history;
  std::vector<ReportEntry> entries;
  bool verified = false;
  std::string failure;
  double value(const std::string& key) const;
};

struct FreeBoundaryResult {
  ShockCurve shock;
  std::optional<CutoffDomain> domain;
  BodyFittedGrid grid;
  StreamField field;
  BackgroundPair background;
  double pde_residual = 0.0;
  SolveReport report;
};

// Height bound (4/kappa)((1 + kappa^2) h0/kappa + d0 - b0).
double min_cutoff_height(const BluntBody& body, double d0);

// Cutoff function: 1 on [0, 5], 0 on [10, inf), smooth in between.
double cutoff_chi(double x);
double cutoff_chi_d1(double x);

ShockCurve seed_shock(const BluntBody& body, double d0, double L,
                      const GasParams& g, double eps, double theta_w,
                      const std::vector<double>& x2_nodes,
                      SeedProfile profile = SeedProfile::Blend);

ShockCurve seed_from_background(const BackgroundPair& bg,
                                const std::vector<double>& x2_nodes);

struct ShockUpdate {
  ShockCurve shock;
  std::vector<double> integrand;
  double min_denominator = 0.0;
};

// Integrates the shock slope from the field on the shock nodes (i = 0).
ShockUpdate update_shock(const BodyFittedGrid& grid, const StreamField& field,
                         const CutoffDomain& dom, const GasParams& g,
                         double eps);

FreeBoundaryResult solve_free_boundary(
    const BluntBody& body, const GasParams& g, double eps, double theta_w,
    double d0, double L, const FreeBoundaryOptions& opt = {},
    const ShockCurve* seed = nullptr, const BoundaryData* bc = nullptr);

struct SweepEntry {
  double L = 0.0;
  bool ok = false;
  std::string error;
  FreeBoundaryResult result;
};

struct SweepResult {
  std::vector<SweepEntry> runs;
  // Sup of |f_a - f_b| over [0, L_min/2] for consecutive successful runs.
  std::vector<double> pair_differences;
};

SweepResult l_sweep(const BluntBody& body, const GasParams& g, double eps,
                    double theta_w, double d0, const std::vector<double>& L_list,
                    const FreeBoundaryOptions& opt = {}, int threads = 1);

double weighted_norm_f(const ShockCurve& f, const BackgroundPair& bg,
                       double beta, double alpha, double L);

double weighted_norm_psi(const BodyFittedGrid& grid, const StreamField& field,
                         const BackgroundPair& bg, double beta, double alpha,
                         const Vec2& corner);

}  // namespace detshock

#endif  // DETSHOCK_FREE_BOUNDARY_HPP_
