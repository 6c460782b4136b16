#include "detshock/free_boundary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "detshock/errors.hpp"
#include "detshock/verifier.hpp"

namespace detshock {

ShockCurve::ShockCurve(std::vector<double> x2, std::vector<double> f,
                       double slope0, double slope_end)
    : spline_(std::move(x2), std::move(f), slope0, slope_end) {}

double SolveReport::value(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return e.value;
  return std::numeric_limits<double>::quiet_NaN();
}

double min_cutoff_height(const BluntBody& body, double d0) {
  const double k = body.kappa();
  return 4.0 / k * ((1.0 + k * k) * body.h0() / k + d0 - body.b0());
}

double cutoff_chi(double x) {
  if (x <= 5.0) return 1.0;
  if (x >= 10.0) return 0.0;
  const double a = std::exp(-1.0 / (10.0 - x));
  const double b = std::exp(-1.0 / (x - 5.0));
  return a / (a + b);
}

double cutoff_chi_d1(double x) {
  if (x <= 5.0 || x >= 10.0) return 0.0;
  const double a = std::exp(-1.0 / (10.0 - x));
  const double b = std::exp(-1.0 / (x - 5.0));
  const double da = -a / ((10.0 - x) * (10.0 - x));
  const double db = b / ((x - 5.0) * (x - 5.0));
  return (da * b - a * db) / ((a + b) * (a + b));
}

ShockCurve seed_from_background(const BackgroundPair& bg,
                                const std::vector<double>& x2) {
  std::vector<double> f(x2.size());
  for (std::size_t j = 0; j < x2.size(); ++j) f[j] = bg.f0(x2[j]);
  f[0] = bg.b0 - bg.d0;
  return ShockCurve(x2, f, bg.s_st, bg.s_st);
}

ShockCurve seed_shock(const BluntBody& body, double d0, double L,
                      const GasParams& g, double eps, double theta_w,
                      const std::vector<double>& x2, SeedProfile profile) {
  if (x2.empty() || x2.front() != 0.0 ||
      std::abs(x2.back() - L) > 1e-12 * (1.0 + L))
    throw DomainError("seed_shock: nodes must span [0, L]");
  const BackgroundPair bg = background_pair(g, eps, theta_w, body.b0(), d0);
  const double h0 = body.h0();
  if (profile == SeedProfile::Background || !(h0 > 0.0))
    return seed_from_background(bg, x2);
  auto fstar = [&](double x) {
    return bg.f0(x) - bg.s_st * x * cutoff_chi(x / h0);
  };
  auto fstar_d1 = [&](double x) {
    const double t = x / h0;
    return bg.s_st - bg.s_st * (cutoff_chi(t) + t * cutoff_chi_d1(t));
  };
  std::vector<double> f(x2.size());
  for (std::size_t j = 0; j < x2.size(); ++j) f[j] = fstar(x2[j]);
  f[0] = body.b0() - d0;
  for (std::size_t j = 0; j < x2.size(); ++j) {
    const double xm = j + 1 < x2.size() ? 0.5 * (x2[j] + x2[j + 1]) : x2[j];
    if (!(f[j] < body.b(x2[j])) || !(fstar(xm) < body.b(xm))) {
      std::ostringstream m;
      m << "seed shock meets the body near x2 = " << x2[j]
        << "; d0 is too large for this body and L";
      throw GeometryError(m.str());
    }
  }
  return ShockCurve(x2, f, fstar_d1(0.0), fstar_d1(L));
}

ShockUpdate update_shock(const BodyFittedGrid& grid, const StreamField& field,
                         const CutoffDomain& dom, const GasParams& g,
                         double eps) {
  const FlowState up = incoming_state(g, eps);
  const double bound =
      0.25 * rho_max(g) * std::sqrt(2.0 * g.b0_bernoulli);
  ShockUpdate out;
  out.integrand.resize(grid.nt);
  out.min_denominator = std::numeric_limits<double>::infinity();
  std::vector<double> x2(grid.nt), f(grid.nt);
  for (int j = 0; j < grid.nt; ++j) {
    const int k = grid.idx(0, j);
    x2[j] = grid.x2[k];
    const double den = field.gx2[k] - up.u1 * field.rho[k];
    out.min_denominator = std::min(out.min_denominator, std::abs(den));
    out.integrand[j] = field.gx1[k] / den;
  }
  if (!(out.min_denominator >= bound)) {
    std::ostringstream m;
    m << "shock update denominator degenerates: min |psi_x2 - u_inf rho| = "
      << out.min_denominator << " < " << bound;
    throw DenominatorError(m.str());
  }
  f[0] = dom.body.b0() - dom.d0;
  for (int j = 1; j < grid.nt; ++j)
    f[j] = f[j - 1] +
           0.5 * (x2[j] - x2[j - 1]) * (out.integrand[j] + out.integrand[j - 1]);
  out.shock = ShockCurve(x2, f, out.integrand.front(), out.integrand.back());
  return out;
}

namespace {

ShockCurve blend(const ShockCurve& a, const ShockCurve& b, double lam,
                 double axis_value) {
  std::vector<double> v(a.values().size());
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = (1.0 - lam) * a.values()[j] + lam * b.values()[j];
  v[0] = axis_value;
  const auto& sa = a.spline();
  const auto& sb = b.spline();
  return ShockCurve(a.nodes(), v,
                    (1.0 - lam) * sa.slope_left() + lam * sb.slope_left(),
                    (1.0 - lam) * sa.slope_right() + lam * sb.slope_right());
}

double max_node_difference(const ShockCurve& a, const ShockCurve& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.values().size(); ++j)
    d = std::max(d, std::abs(a.values()[j] - b.values()[j]));
  return d;
}

std::string fmt(const char* rel, double v) {
  std::ostringstream os;
  os.precision(6);
  os << rel << " " << v;
  return os.str();
}

void fill_report(FreeBoundaryResult& res, const BluntBody& body,
                 const GasParams& g, double eps, double theta_w, double d0,
                 double L, const FreeBoundaryOptions& opt,
                 const BoundaryData* bcp) {
  auto& rep = res.report;
  auto put = [&](const std::string& k, double v, const std::string& t) {
    rep.entries.push_back({k, v, t});
  };
  const auto& dom = *res.domain;
  put("converged", rep.converged ? 1.0 : 0.0, "info");
  put("outer_iterations", rep.outer_iterations, fmt("<=", opt.max_outer));
  if (!rep.history.empty()) {
    put("final_change", rep.history.back().change,
        fmt("<=", opt.tol_f * (1.0 + L)));
    put("fixed_point_residual", rep.history.back().fixed_point,
        fmt("<=", 2.0 * opt.tol_f * (1.0 + L)));
    put("picard_iterations_last", rep.history.back().picard_iterations, "info");
  }
  put("pde_residual", res.pde_residual, fmt("<=", opt.inner.tol_pde));
  put("gamma", g.gamma, "info");
  put("B0", g.b0_bernoulli, "info");
  put("eps", eps, "info");
  put("theta_w", theta_w, "info");
  put("d0", d0, "info");
  put("L", L, "info");
  put("L_min", min_cutoff_height(body, d0), "info");
  put("b0", body.b0(), "info");
  put("s_st", res.background.s_st, "info");
  put("rho_st", res.background.rho_st, "info");
  put("u_st", res.background.u_st, "info");
  put("damping", opt.damping, "info");
  put("omega", opt.inner.omega, "info");
  put("tol_psi", opt.inner.tol_psi, "info");
  put("min_b_minus_f", dom.min_gap, fmt(">=", 0.5 * d0));

  const ShockTraceState tr = build_trace(res.grid, res.field, res.shock, g, eps);
  const Asymptotics as = check_asymptotics(res.grid, res.field, res.shock,
                                           res.background);
  put("asym_far_field", as.far_field, "info");
  put("asym_fprime", as.fprime_dev, "info");
  const double qg = q_gamma(g, eps, theta_w, opt.polar);
  put("q_gamma", qg, "info");
  const double nf = weighted_norm_f(res.shock, res.background, opt.norm_beta,
                                    opt.norm_alpha, L);
  const double np = weighted_norm_psi(res.grid, res.field, res.background,
                                      opt.norm_beta, opt.norm_alpha, dom.p2);
  put("norm_f_minus_f0", nf, "info");
  put("norm_psi_minus_psi0", np, "info");
  if (opt.m1 > 0.0)
    put("iterset_f_ratio", nf / (opt.m1 * qg), fmt("<=", 1.0));
  if (opt.m2 > 0.0)
    put("iterset_psi_ratio", np / (opt.m2 * qg), fmt("<=", 1.0));

  VerifyInput vin;
  vin.grid = &res.grid;
  vin.field = &res.field;
  vin.shock = &res.shock;
  vin.domain = &dom;
  vin.gas = g;
  vin.eps = eps;
  vin.background = res.background;
  vin.boundary = bcp;
  vin.blunt = bcp == nullptr && body.h0() > 0.0 && body.d1(0.0) == 0.0;
  vin.tol.tol_pde = opt.inner.tol_pde;
  const VerificationReport vr = verify(vin);
  for (const auto& l : vr.lines)
    put(l.name, l.value, fmt(l.relation.c_str(), l.tolerance) +
                             (l.pass ? " PASS" : " FAIL"));
  rep.verified = vr.all_pass();
}

}  // namespace

FreeBoundaryResult solve_free_boundary(const BluntBody& body,
                                       const GasParams& g, double eps,
                                       double theta_w, double d0, double L,
                                       const FreeBoundaryOptions& opt,
                                       const ShockCurve* seed,
                                       const BoundaryData* bcp) {
  validate(g);
  if (std::abs(theta_w - body.theta_w()) > 1e-12)
    throw DomainError("theta_w differs from the body's wedge angle");
  const double lmin = min_cutoff_height(body, d0);
  if (opt.enforce_min_height && L < lmin) {
    std::ostringstream m;
    m << "L = " << L << " is below the minimum cutoff height " << lmin;
    throw GeometryError(m.str());
  }
  FreeBoundaryResult res;
  res.background = background_pair(g, eps, theta_w, body.b0(), d0);
  const auto nodes = shock_nodes(L, opt.nt, opt.grading);
  ShockCurve fk = seed ? *seed
                       : seed_shock(body, d0, L, g, eps, theta_w, nodes,
                                    opt.seed);
  if (fk.nodes().size() != nodes.size())
    throw DomainError("seed shock must live on the grid's shock nodes");
  for (std::size_t j = 0; j < nodes.size(); ++j)
    if (std::abs(fk.nodes()[j] - nodes[j]) > 1e-12 * (1.0 + L))
      throw DomainError("seed shock must live on the grid's shock nodes");
  const BoundaryData bc = bcp ? *bcp : physical_boundary_data(g, eps);
  const double axis_value = body.b0() - d0;
  const double tol = opt.tol_f * (1.0 + L);

  std::vector<double> psi_init;
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    CutoffDomain dom = build_cutoff_domain(body, fk.spline(), d0, L);
    BodyFittedGrid grid = make_grid(dom, opt.ns, opt.nt, opt.grading);
    LinearBVP bvp(grid);
    NonlinearResult nl;
    ShockUpdate upd;
    try {
      if (psi_init.empty())
        psi_init = initial_guess(bvp, g, res.background, bc);
      nl = solve_nonlinear(bvp, g, bc, psi_init, opt.inner);
      upd = update_shock(grid, nl.field, dom, g, eps);
    } catch (const Error& e) {
      std::ostringstream m;
      m << "outer iteration " << outer << ": " << e.what();
      res.report.failure = m.str();
      throw ConvergenceError(m.str());
    }
    const double fp = max_node_difference(upd.shock, fk);
    OuterRecord rec;
    rec.fixed_point = fp;
    rec.picard_iterations = nl.iterations;
    rec.pde_residual = nl.pde_residual;
    if (opt.damping * fp <= tol) {
      rec.change = opt.damping * fp;
      rec.lambda = opt.damping;
      res.report.history.push_back(rec);
      res.report.converged = true;
      res.report.outer_iterations = outer + 1;
      res.shock = fk;
      res.domain = std::move(dom);
      res.grid = std::move(grid);
      res.field = std::move(nl.field);
      res.pde_residual = nl.pde_residual;
      break;
    }
    double lam = opt.damping;
    std::optional<ShockCurve> next;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt, lam *= 0.5) {
      ShockCurve cand = blend(fk, upd.shock, lam, axis_value);
      try {
        build_cutoff_domain(body, cand.spline(), d0, L);
        next = std::move(cand);
        break;
      } catch (const GeometryError&) {
      }
    }
    if (!next) {
      std::ostringstream m;
      m << "outer iteration " << outer
        << ": every damped step violates detachment";
      throw ConvergenceError(m.str());
    }
    rec.lambda = lam;
    rec.change = max_node_difference(*next, fk);
    res.report.history.push_back(rec);
    fk = std::move(*next);
    psi_init = std::move(nl.field.psi);
  }
  if (!res.report.converged) {
    std::ostringstream m;
    m << "free-boundary iteration did not converge in " << opt.max_outer
      << " outer iterations; changes:";
    const auto& h = res.report.history;
    for (std::size_t k = h.size() > 8 ? h.size() - 8 : 0; k < h.size(); ++k)
      m << " " << h[k].change;
    throw ConvergenceError(m.str());
  }
  fill_report(res, body, g, eps, theta_w, d0, L, opt, bcp);
  return res;
}

SweepResult l_sweep(const BluntBody& body, const GasParams& g, double eps,
                    double theta_w, double d0, const std::vector<double>& L_list,
                    const FreeBoundaryOptions& opt, int threads) {
  for (std::size_t i = 1; i < L_list.size(); ++i)
    if (!(L_list[i] > L_list[i - 1]))
      throw DomainError("l_sweep: L_list must be increasing");
  SweepResult sw;
  sw.runs.resize(L_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < L_list.size(); i = next++) {
      auto& e = sw.runs[i];
      e.L = L_list[i];
      try {
        e.result = solve_free_boundary(body, g, eps, theta_w, d0, e.L, opt);
        e.ok = e.result.report.converged;
      } catch (const Error& ex) {
        e.error = ex.what();
      }
    }
  };
  const int nthreads =
      std::max(1, std::min<int>(threads, static_cast<int>(L_list.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (L_list.empty()) return sw;
  const double common = 0.5 * L_list.front();
  const SweepEntry* prev = nullptr;
  for (const auto& e : sw.runs) {
    if (!e.ok) continue;
    if (prev) {
      const DomainMorph mp = morph_domains(*prev->result.domain, *e.result.domain);
      double d = 0.0;
      for (double y : prev->result.shock.nodes()) {
        if (y > common) break;
        const Vec2 p(prev->result.shock.value(y), y);
        d = std::max(d, (mp(p) - p).norm());
      }
      sw.pair_differences.push_back(d);
    }
    prev = &e;
  }
  return sw;
}

namespace {

template <class Fn>
void for_pairs(std::size_t n, Fn&& fn) {
  const std::size_t total = n * (n - 1) / 2;
  if (total <= 10000) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) fn(a, b);
    return;
  }
  std::mt19937_64 rng(20240611ULL);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int s = 0; s < 10000; ++s) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    fn(std::min(a, b), std::max(a, b));
  }
}

}  // namespace

double weighted_norm_f(const ShockCurve& f, const BackgroundPair& bg,
                       double beta, double alpha, double L) {
  const double mu = -beta;
  const auto& xs = f.nodes();
  const std::size_t n = xs.size();
  std::vector<double> d0(n), d1(n), d2(n), del(n);
  for (std::size_t j = 0; j < n; ++j) {
    d0[j] = f.value(xs[j]) - bg.f0(xs[j]);
    d1[j] = f.d1(xs[j]) - bg.s_st;
    d2[j] = f.d2(xs[j]);
    del[j] = std::min(std::abs(xs[j] - L), 1.0 + xs[j]);
  }
  double s0 = 0, s1 = 0, s2 = 0, h1 = 0, h2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 1.0 + xs[j];
    s0 = std::max(s0, std::pow(w, mu) * std::abs(d0[j]));
    s1 = std::max(s1, std::pow(w, 1.0 + mu) * std::abs(d1[j]));
    s2 = std::max(s2, std::pow(w, 2.0 + mu) * std::pow(del[j] / w, 1.0 - alpha) *
                          std::abs(d2[j]));
  }
  for_pairs(n, [&](std::size_t a, std::size_t b) {
    const double dx = std::pow(std::abs(xs[b] - xs[a]), alpha);
    const double wmin = 1.0 + std::min(xs[a], xs[b]);
    const double wmax = 1.0 + std::max(xs[a], xs[b]);
    h1 = std::max(h1, std::pow(wmin, 1.0 + alpha + mu) *
                          std::abs(d1[b] - d1[a]) / dx);
    h2 = std::max(h2, std::pow(wmin, 2.0 + alpha + mu) *
                          (std::min(del[a], del[b]) / wmax) *
                          std::abs(d2[b] - d2[a]) / dx);
  });
  return s0 + s1 + h1 + s2 + h2;
}

double weighted_norm_psi(const BodyFittedGrid& grid, const StreamField& field,
                         const BackgroundPair& bg, double beta, double alpha,
                         const Vec2& corner) {
  const double mu = -beta;
  const std::size_t n = grid.size();
  MappedDifferences md(grid);
  std::vector<double> hxx, hxy, hyx, hyy;
  md.gradient(field.gx1, hxx, hxy);
  md.gradient(field.gx2, hyx, hyy);
  const Vec2 g0 = bg.grad_psi0();
  std::vector<double> p(n), q1(n), q2(n), s(n), del(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 x(grid.x1[k], grid.x2[k]);
    p[k] = field.psi[k] - bg.psi0(x);
    q1[k] = field.gx1[k] - g0.x();
    q2[k] = field.gx2[k] - g0.y();
    s[k] = std::abs(hxx[k]) + 0.5 * std::abs(hxy[k] + hyx[k]) + std::abs(hyy[k]);
    del[k] = std::min((x - corner).norm(), 1.0 + x.y());
  }
  double s0 = 0, s1 = 0, s2 = 0, h1 = 0, h2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 1.0 + grid.x2[k];
    s0 = std::max(s0, std::pow(w, mu) * std::abs(p[k]));
    s1 = std::max(s1, std::pow(w, 1.0 + mu) * std::hypot(q1[k], q2[k]));
    s2 = std::max(s2, std::pow(w, 2.0 + mu) * std::pow(del[k] / w, 1.0 - alpha) *
                          s[k]);
  }
  for_pairs(n, [&](std::size_t a, std::size_t b) {
    const Vec2 xa(grid.x1[a], grid.x2[a]), xb(grid.x1[b], grid.x2[b]);
    const double dx = std::pow((xb - xa).norm(), alpha);
    if (!(dx > 0.0)) return;
    const double wmin = 1.0 + std::min(xa.y(), xb.y());
    const double wmax = 1.0 + std::max(xa.y(), xb.y());
    h1 = std::max(h1, std::pow(wmin, 1.0 + alpha + mu) *
                          std::hypot(q1[b] - q1[a], q2[b] - q2[a]) / dx);
    const double dd = std::abs(hxx[b] - hxx[a]) +
                      0.5 * std::abs(hxy[b] + hyx[b] - hxy[a] - hyx[a]) +
                      std::abs(hyy[b] - hyy[a]);
    h2 = std::max(h2, std::pow(wmin, 2.0 + alpha + mu) *
                          (std::min(del[a], del[b]) / wmax) * dd / dx);
  });
  return s0 + s1 + h1 + s2 + h2;
}

}  // namespace detshock
