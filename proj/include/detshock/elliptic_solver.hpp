#ifndef DETSHOCK_ELLIPTIC_SOLVER_HPP_
#define DETSHOCK_ELLIPTIC_SOLVER_HPP_

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "detshock/gas_model.hpp"
#include "detshock/geometry.hpp"

namespace detshock {

struct StreamField {
  std::vector<double> psi, gx1, gx2, rho;
  double u1(std::size_t k) const { return gx2[k] / rho[k]; }
  double u2(std::size_t k) const { return -gx1[k] / rho[k]; }
  FlowState state(std::size_t k) const { return {rho[k], u1(k), u2(k)}; }
};

struct Coefficients {
  std::vector<double> a11, a12, a22;
};

// Dirichlet data on Shock, Sym and Body nodes plus the n_c-derivative on the
// cutoff. Corners take the Dirichlet value of the arc that owns them.
struct BoundaryData {
  std::function<double(const Vec2&)> shock, sym, body;
  std::function<double(const Vec2&)> cutoff_flux;
};

struct SolverOptions {
  double omega = 0.7;
  double tol_psi = 1e-9;
  double tol_pde = 1e-6;
  int max_iters = 200;
  double ellipticity = 1e-2;  // required min eigenvalue, in units of c0^2
  double linear_tol = 1e-10;
};

struct NonlinearResult {
  StreamField field;
  std::vector<double> history;  // max |psi_{k+1} - psi_k| / scale
  double pde_residual = 0.0;
  int iterations = 0;
};

struct BackgroundPair {
  double s_st = 0.0, rho_st = 0.0, u_st = 0.0, kappa = 0.0;
  double b0 = 0.0, d0 = 0.0;
  double f0(double x2) const { return s_st * x2 + b0 - d0; }
  double psi0(const Vec2& x) const {
    return rho_st * u_st * (x.y() - kappa * (x.x() - b0 + d0));
  }
  Vec2 grad_psi0() const { return rho_st * u_st * Vec2(-kappa, 1.0); }
};

double psi_infinity(const GasParams& g, double eps, const Vec2& x);

BackgroundPair background_pair(const GasParams& g, double eps, double theta_w,
                               double b0, double d0);

BoundaryData physical_boundary_data(const GasParams& g, double eps);

// Discrete metric terms of a grid; every derivative below uses the same
// stencils so that affine functions are differentiated exactly.
class MappedDifferences {
 public:
  explicit MappedDifferences(const BodyFittedGrid& grid);

  const BodyFittedGrid& grid() const { return *grid_; }
  // Index-space first derivative at node (i, j); one-sided on edges.
  double d_xi(const std::vector<double>& v, int i, int j) const;
  double d_eta(const std::vector<double>& v, int i, int j) const;
  // Physical gradient at every node.
  void gradient(const std::vector<double>& v, std::vector<double>& gx1,
                std::vector<double>& gx2) const;
  // Inverse metric (d xi_k / d x_m) at node k: [xi_x1, xi_x2, eta_x1, eta_x2].
  const std::array<double, 4>& inverse_metric(std::size_t k) const {
    return inv_[k];
  }

 private:
  const BodyFittedGrid* grid_;
  std::vector<std::array<double, 4>> inv_;
};

StreamField make_field(const MappedDifferences& md, const GasParams& g,
                       std::vector<double> psi);

Coefficients coefficients(const GasParams& g, const StreamField& field,
                          double ellipticity = 1e-2);

// Linear solver with a fixed sparsity pattern for one grid.
class LinearBVP {
 public:
  explicit LinearBVP(const BodyFittedGrid& grid);
  ~LinearBVP();
  LinearBVP(const LinearBVP&) = delete;
  LinearBVP& operator=(const LinearBVP&) = delete;

  const MappedDifferences& differences() const { return md_; }
  // Solves sum a_ij psi_ij = source with the boundary data; source may be
  // empty (zero).
  std::vector<double> solve(const Coefficients& a, const BoundaryData& bc,
                            const std::vector<double>& source = {},
                            double tol = 1e-10);
  // Max over interior nodes of |L psi - source| divided by the largest
  // magnitude of the individual operator terms.
  double residual(const Coefficients& a, const std::vector<double>& psi,
                  const std::vector<double>& source = {}) const;

 private:
  struct Impl;
  const BodyFittedGrid* grid_;
  MappedDifferences md_;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> solve_linear_bvp(const BodyFittedGrid& grid,
                                     const Coefficients& a,
                                     const BoundaryData& bc,
                                     const std::vector<double>& source = {},
                                     double tol = 1e-10);

// Picard iteration on frozen coefficients with under-relaxation.
NonlinearResult solve_nonlinear(LinearBVP& bvp, const GasParams& g,
                                const BoundaryData& bc,
                                std::vector<double> init,
                                const SolverOptions& opt = {});

NonlinearResult solve_nonlinear(const BodyFittedGrid& grid, const GasParams& g,
                                double eps, std::vector<double> init,
                                const SolverOptions& opt = {});

// Linear solve with the background state's constant coefficients; a smooth
// admissible start for the Picard iteration that honours the boundary data.
std::vector<double> initial_guess(LinearBVP& bvp, const GasParams& g,
                                  const BackgroundPair& bg,
                                  const BoundaryData& bc);

// Nodal values of a function on the grid.
std::vector<double> sample(const BodyFittedGrid& grid,
                           const std::function<double(const Vec2&)>& fn);

}  // namespace detshock

#endif  // DETSHOCK_ELLIPTIC_SOLVER_HPP_
