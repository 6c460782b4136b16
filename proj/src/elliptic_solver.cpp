#include "detshock/elliptic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "detshock/errors.hpp"
#include "detshock/shock_polar.hpp"

namespace detshock {

double psi_infinity(const GasParams& g, double eps, const Vec2& x) {
  const FlowState in = incoming_state(g, eps);
  return in.rho * in.u1 * x.y();
}

BackgroundPair background_pair(const GasParams& g, double eps, double theta_w,
                               double b0, double d0) {
  const BranchPair br = solve_branches(g, eps, theta_w);
  BackgroundPair bp;
  bp.s_st = br.strong.s;
  bp.rho_st = br.strong.rho;
  bp.u_st = br.strong.u;
  bp.kappa = std::tan(theta_w);
  bp.b0 = b0;
  bp.d0 = d0;
  return bp;
}

BoundaryData physical_boundary_data(const GasParams& g, double eps) {
  const FlowState in = incoming_state(g, eps);
  const double m = in.rho * in.u1;
  BoundaryData bc;
  bc.shock = [m](const Vec2& x) { return m * x.y(); };
  bc.sym = [](const Vec2&) { return 0.0; };
  bc.body = [](const Vec2&) { return 0.0; };
  bc.cutoff_flux = [](const Vec2&) { return 0.0; };
  return bc;
}

std::vector<double> sample(const BodyFittedGrid& grid,
                           const std::function<double(const Vec2&)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = fn(Vec2(grid.x1[k], grid.x2[k]));
  return v;
}

// ---------------------------------------------------------------------------

MappedDifferences::MappedDifferences(const BodyFittedGrid& grid)
    : grid_(&grid), inv_(grid.size()) {
  for (int j = 0; j < grid.nt; ++j) {
    for (int i = 0; i < grid.ns; ++i) {
      const double a = d_xi(grid.x1, i, j), b = d_eta(grid.x1, i, j);
      const double c = d_xi(grid.x2, i, j), d = d_eta(grid.x2, i, j);
      const double det = a * d - b * c;
      if (!(det > 0.0)) {
        std::ostringstream m;
        m << "discrete Jacobian " << det << " at node (" << i << ", " << j
          << ")";
        throw FoldedGridError(m.str());
      }
      inv_[grid.idx(i, j)] = {d / det, -b / det, -c / det, a / det};
    }
  }
}

double MappedDifferences::d_xi(const std::vector<double>& v, int i,
                               int j) const {
  const auto& g = *grid_;
  if (i == 0)
    return 0.5 * (-3.0 * v[g.idx(0, j)] + 4.0 * v[g.idx(1, j)] -
                  v[g.idx(2, j)]);
  if (i == g.ns - 1)
    return 0.5 * (3.0 * v[g.idx(i, j)] - 4.0 * v[g.idx(i - 1, j)] +
                  v[g.idx(i - 2, j)]);
  return 0.5 * (v[g.idx(i + 1, j)] - v[g.idx(i - 1, j)]);
}

double MappedDifferences::d_eta(const std::vector<double>& v, int i,
                                int j) const {
  const auto& g = *grid_;
  if (j == 0)
    return 0.5 * (-3.0 * v[g.idx(i, 0)] + 4.0 * v[g.idx(i, 1)] -
                  v[g.idx(i, 2)]);
  if (j == g.nt - 1)
    return 0.5 * (3.0 * v[g.idx(i, j)] - 4.0 * v[g.idx(i, j - 1)] +
                  v[g.idx(i, j - 2)]);
  return 0.5 * (v[g.idx(i, j + 1)] - v[g.idx(i, j - 1)]);
}

void MappedDifferences::gradient(const std::vector<double>& v,
                                 std::vector<double>& gx1,
                                 std::vector<double>& gx2) const {
  const auto& g = *grid_;
  gx1.assign(g.size(), 0.0);
  gx2.assign(g.size(), 0.0);
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.ns; ++i) {
      const int k = g.idx(i, j);
      const double px = d_xi(v, i, j), pe = d_eta(v, i, j);
      const auto& m = inv_[k];
      gx1[k] = m[0] * px + m[2] * pe;
      gx2[k] = m[1] * px + m[3] * pe;
    }
}

StreamField make_field(const MappedDifferences& md, const GasParams& g,
                       std::vector<double> psi) {
  StreamField f;
  f.psi = std::move(psi);
  md.gradient(f.psi, f.gx1, f.gx2);
  f.rho.resize(f.psi.size());
  const double zs = zeta_sonic(g);
  const auto& grid = md.grid();
  for (std::size_t k = 0; k < f.psi.size(); ++k) {
    const double z = f.gx1[k] * f.gx1[k] + f.gx2[k] * f.gx2[k];
    if (!(z < zs)) {
      std::ostringstream m;
      m << "admissibility lost: |grad psi|^2 = " << z << " >= " << zs
        << " at node " << k % grid.ns << ", " << k / grid.ns << " (x = "
        << grid.x1[k] << ", " << grid.x2[k] << ")";
      throw RangeError(m.str());
    }
    f.rho[k] = rho_hat(g, z);
  }
  return f;
}

Coefficients coefficients(const GasParams& g, const StreamField& field,
                          double ellipticity) {
  const std::size_t n = field.psi.size();
  Coefficients a;
  a.a11.resize(n);
  a.a12.resize(n);
  a.a22.resize(n);
  const double c0sq = (g.gamma - 1.0) * g.b0_bernoulli;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = field.rho[k];
    const double c2 = std::pow(r, g.gamma - 1.0);
    const double p1 = field.gx1[k], p2 = field.gx2[k];
    const double r2 = r * r;
    a.a11[k] = c2 - p2 * p2 / r2;
    a.a22[k] = c2 - p1 * p1 / r2;
    a.a12[k] = p1 * p2 / r2;
    const double tr = a.a11[k] + a.a22[k];
    const double df = a.a11[k] - a.a22[k];
    const double lmin =
        0.5 * (tr - std::sqrt(df * df + 4.0 * a.a12[k] * a.a12[k]));
    if (!(lmin >= ellipticity * c0sq)) {
      std::ostringstream m;
      m << "ellipticity lost at node " << k << ": min eigenvalue " << lmin
        << " < " << ellipticity * c0sq;
      throw EllipticityError(m.str());
    }
  }
  return a;
}

// ---------------------------------------------------------------------------

namespace {

struct Stencil {
  std::array<int, 9> node{};
  std::array<double, 9> w{};
  int n = 0;
  double scale = 1.0;  // magnitude used for row normalization
  void add(int k, double v) {
    node[n] = k;
    w[n] = v;
    ++n;
  }
};

// Second-derivative operator at an interior node, built so that it vanishes
// on x1 and x2.
Stencil interior_stencil(const BodyFittedGrid& g, const MappedDifferences& md,
                         const Coefficients& a, int i, int j,
                         std::array<double, 5>* terms = nullptr,
                         const std::vector<double>* psi = nullptr) {
  const int k = g.idx(i, j);
  const auto& m = md.inverse_metric(k);
  const double xx = m[0], xy = m[1], ex = m[2], ey = m[3];
  const double a11 = a.a11[k], a12 = a.a12[k], a22 = a.a22[k];
  const double Axx = a11 * xx * xx + 2.0 * a12 * xx * xy + a22 * xy * xy;
  const double Axe = a11 * xx * ex + a12 * (xx * ey + xy * ex) + a22 * xy * ey;
  const double Aee = a11 * ex * ex + 2.0 * a12 * ex * ey + a22 * ey * ey;
  auto second = [&](const std::vector<double>& v, double& dxx, double& dxe,
                    double& dee) {
    dxx = v[g.idx(i + 1, j)] - 2.0 * v[k] + v[g.idx(i - 1, j)];
    dee = v[g.idx(i, j + 1)] - 2.0 * v[k] + v[g.idx(i, j - 1)];
    dxe = 0.25 * (v[g.idx(i + 1, j + 1)] - v[g.idx(i + 1, j - 1)] -
                  v[g.idx(i - 1, j + 1)] + v[g.idx(i - 1, j - 1)]);
  };
  double sxx, sxe, see;
  second(g.x1, sxx, sxe, see);
  const double r1 = Axx * sxx + 2.0 * Axe * sxe + Aee * see;
  second(g.x2, sxx, sxe, see);
  const double r2 = Axx * sxx + 2.0 * Axe * sxe + Aee * see;
  const double Bx = -(xx * r1 + xy * r2);
  const double Be = -(ex * r1 + ey * r2);

  Stencil st;
  st.scale = std::abs(Axx) + std::abs(Aee);
  st.add(k, -2.0 * Axx - 2.0 * Aee);
  st.add(g.idx(i + 1, j), Axx + 0.5 * Bx);
  st.add(g.idx(i - 1, j), Axx - 0.5 * Bx);
  st.add(g.idx(i, j + 1), Aee + 0.5 * Be);
  st.add(g.idx(i, j - 1), Aee - 0.5 * Be);
  st.add(g.idx(i + 1, j + 1), 0.5 * Axe);
  st.add(g.idx(i - 1, j - 1), 0.5 * Axe);
  st.add(g.idx(i + 1, j - 1), -0.5 * Axe);
  st.add(g.idx(i - 1, j + 1), -0.5 * Axe);
  if (terms && psi) {
    double pxx, pxe, pee;
    second(*psi, pxx, pxe, pee);
    (*terms)[0] = Axx * pxx;
    (*terms)[1] = 2.0 * Axe * pxe;
    (*terms)[2] = Aee * pee;
    (*terms)[3] = Bx * md.d_xi(*psi, i, j);
    (*terms)[4] = Be * md.d_eta(*psi, i, j);
  }
  return st;
}

Vec2 cutoff_normal(const BodyFittedGrid& g) {
  const Vec2 p2 = g.point(0, g.nt - 1), p3 = g.point(g.ns - 1, g.nt - 1);
  const Vec2 tau = (p3 - p2).normalized();
  return {-tau.y(), tau.x()};
}

}  // namespace

struct LinearBVP::Impl {
  Eigen::SparseMatrix<double> A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
};

LinearBVP::LinearBVP(const BodyFittedGrid& grid)
    : grid_(&grid), md_(grid), impl_(std::make_unique<Impl>()) {}

LinearBVP::~LinearBVP() = default;

std::vector<double> LinearBVP::solve(const Coefficients& a,
                                     const BoundaryData& bc,
                                     const std::vector<double>& source,
                                     double tol) {
  const auto& g = *grid_;
  const int n = static_cast<int>(g.size());
  const Vec2 nc = cutoff_normal(g);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < g.nt; ++j) {
    for (int i = 0; i < g.ns; ++i) {
      const int k = g.idx(i, j);
      const Vec2 x(g.x1[k], g.x2[k]);
      switch (g.tag[k]) {
        case Tag::Shock:
          trip.emplace_back(k, k, 1.0);
          rhs[k] = bc.shock(x);
          break;
        case Tag::Body:
          trip.emplace_back(k, k, 1.0);
          rhs[k] = bc.body(x);
          break;
        case Tag::Sym:
          trip.emplace_back(k, k, 1.0);
          rhs[k] = bc.sym(x);
          break;
        case Tag::Cutoff: {
          const auto& m = md_.inverse_metric(k);
          const double wx = nc.x() * m[0] + nc.y() * m[1];
          const double we = nc.x() * m[2] + nc.y() * m[3];
          const double sc = 1.0 / std::hypot(wx, we);
          trip.emplace_back(k, g.idx(i + 1, j), 0.5 * wx * sc);
          trip.emplace_back(k, g.idx(i - 1, j), -0.5 * wx * sc);
          trip.emplace_back(k, k, 1.5 * we * sc);
          trip.emplace_back(k, g.idx(i, j - 1), -2.0 * we * sc);
          trip.emplace_back(k, g.idx(i, j - 2), 0.5 * we * sc);
          rhs[k] = (bc.cutoff_flux ? bc.cutoff_flux(x) : 0.0) * sc;
          break;
        }
        case Tag::Interior: {
          const Stencil st = interior_stencil(g, md_, a, i, j);
          const double sc = 1.0 / st.scale;
          for (int q = 0; q < st.n; ++q)
            trip.emplace_back(k, st.node[q], st.w[q] * sc);
          rhs[k] = source.empty() ? 0.0 : source[k] * sc;
          break;
        }
      }
    }
  }
  auto& A = impl_->A;
  A.resize(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  if (!impl_->analyzed) {
    impl_->lu.analyzePattern(A);
    impl_->analyzed = true;
  }
  impl_->lu.factorize(A);
  if (impl_->lu.info() != Eigen::Success)
    throw LinearSolverError("sparse LU factorization failed: " +
                            impl_->lu.lastErrorMessage());
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  const double bn = std::max(rhs.norm(), 1e-300);
  double rel = (A * x - rhs).norm() / bn;
  if (rel > tol) {
    // One step of iterative refinement before giving up.
    x += impl_->lu.solve(rhs - A * x);
    rel = (A * x - rhs).norm() / bn;
  }
  if (!(rel <= tol)) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd y = impl_->lu.solve(ones);
    double anorm = 0.0;
    for (int c = 0; c < A.outerSize(); ++c) {
      double s = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
        s += std::abs(it.value());
      anorm = std::max(anorm, s);
    }
    const double cond = anorm * y.lpNorm<1>() / n;
    std::ostringstream m;
    m << "linear solve residual " << rel << " exceeds " << tol
      << " (condition estimate " << cond << ")";
    throw LinearSolverError(m.str());
  }
  return std::vector<double>(x.data(), x.data() + n);
}

double LinearBVP::residual(const Coefficients& a, const std::vector<double>& psi,
                           const std::vector<double>& source) const {
  const auto& g = *grid_;
  double worst = 0.0, mag = 0.0;
  for (int j = 1; j + 1 < g.nt; ++j) {
    for (int i = 1; i + 1 < g.ns; ++i) {
      std::array<double, 5> t{};
      interior_stencil(g, md_, a, i, j, &t, &psi);
      const int k = g.idx(i, j);
      double s = source.empty() ? 0.0 : -source[k];
      double m = std::abs(s);
      for (double v : t) {
        s += v;
        m += std::abs(v);
      }
      worst = std::max(worst, std::abs(s));
      mag = std::max(mag, m);
    }
  }
  return worst / std::max(mag, 1e-300);
}

std::vector<double> solve_linear_bvp(const BodyFittedGrid& grid,
                                     const Coefficients& a,
                                     const BoundaryData& bc,
                                     const std::vector<double>& source,
                                     double tol) {
  LinearBVP bvp(grid);
  return bvp.solve(a, bc, source, tol);
}

namespace {

void impose_dirichlet(const BodyFittedGrid& g, const BoundaryData& bc,
                      std::vector<double>& psi) {
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 x(g.x1[k], g.x2[k]);
    switch (g.tag[k]) {
      case Tag::Shock: psi[k] = bc.shock(x); break;
      case Tag::Body: psi[k] = bc.body(x); break;
      case Tag::Sym: psi[k] = bc.sym(x); break;
      default: break;
    }
  }
}

}  // namespace

NonlinearResult solve_nonlinear(LinearBVP& bvp, const GasParams& g,
                                const BoundaryData& bc,
                                std::vector<double> init,
                                const SolverOptions& opt) {
  const auto& grid = bvp.differences().grid();
  if (init.size() != grid.size())
    throw DomainError("solve_nonlinear: initial field has the wrong size");
  impose_dirichlet(grid, bc, init);
  NonlinearResult res;
  std::vector<double> psi = std::move(init);
  bool converged = false;
  for (int it = 0; it < opt.max_iters; ++it) {
    StreamField f = make_field(bvp.differences(), g, psi);
    const Coefficients a = coefficients(g, f, opt.ellipticity);
    const std::vector<double> next = bvp.solve(a, bc, {}, opt.linear_tol);
    double dmax = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
      const double v = (1.0 - opt.omega) * psi[k] + opt.omega * next[k];
      dmax = std::max(dmax, std::abs(v - psi[k]));
      psi[k] = v;
      scale = std::max(scale, std::abs(v));
    }
    const double rel = dmax / std::max(scale, 1e-300);
    res.history.push_back(rel);
    res.iterations = it + 1;
    if (rel <= opt.tol_psi) {
      // A small step alone does not bound the nodal residual on fine grids.
      StreamField fc = make_field(bvp.differences(), g, psi);
      const double r =
          bvp.residual(coefficients(g, fc, opt.ellipticity), psi);
      if (r <= opt.tol_pde) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    std::ostringstream m;
    m << "Picard iteration did not converge in " << opt.max_iters
      << " iterations; last relative change " << res.history.back();
    throw ConvergenceError(m.str());
  }
  res.field = make_field(bvp.differences(), g, std::move(psi));
  const Coefficients a = coefficients(g, res.field, opt.ellipticity);
  res.pde_residual = bvp.residual(a, res.field.psi);
  if (!(res.pde_residual <= opt.tol_pde)) {
    std::ostringstream m;
    m << "PDE residual " << res.pde_residual << " exceeds " << opt.tol_pde;
    throw ConvergenceError(m.str());
  }
  return res;
}

std::vector<double> initial_guess(LinearBVP& bvp, const GasParams& g,
                                  const BackgroundPair& bg,
                                  const BoundaryData& bc) {
  const std::size_t n = bvp.differences().grid().size();
  StreamField f;
  const Vec2 gp = bg.grad_psi0();
  f.psi.assign(n, 0.0);
  f.gx1.assign(n, gp.x());
  f.gx2.assign(n, gp.y());
  f.rho.assign(n, bg.rho_st);
  return bvp.solve(coefficients(g, f, 0.0), bc);
}

NonlinearResult solve_nonlinear(const BodyFittedGrid& grid, const GasParams& g,
                                double eps, std::vector<double> init,
                                const SolverOptions& opt) {
  LinearBVP bvp(grid);
  return solve_nonlinear(bvp, g, physical_boundary_data(g, eps),
                         std::move(init), opt);
}

}  // namespace detshock
