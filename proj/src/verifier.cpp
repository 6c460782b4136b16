#include "detshock/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace detshock {

ShockTraceState build_trace(const BodyFittedGrid& grid, const StreamField& field,
                            const ShockCurve& f, const GasParams& g,
                            double eps) {
  ShockTraceState tr;
  tr.up = incoming_state(g, eps);
  tr.nodes.reserve(grid.nt);
  for (int j = 0; j < grid.nt; ++j) {
    const int k = grid.idx(0, j);
    TraceNode n;
    n.x2 = grid.x2[k];
    n.fp = f.d1(n.x2);
    n.down = field.state(k);
    const double nrm = std::sqrt(1.0 + n.fp * n.fp);
    n.nu = Vec2(1.0, -n.fp) / nrm;
    n.tau = Vec2(n.fp, 1.0) / nrm;
    n.q = speed(n.down);
    n.Theta = std::atan2(n.down.u2, n.down.u1);
    n.beta = std::atan2(tr.up.u1 - n.down.u1, n.down.u2);
    tr.nodes.push_back(n);
  }
  return tr;
}

RhResiduals check_rh(const ShockTraceState& tr) {
  RhResiduals r;
  const double m = tr.up.rho * tr.up.u1;
  for (const auto& n : tr.nodes) {
    const Vec2 u(n.down.u1, n.down.u2);
    const Vec2 jump = u - Vec2(tr.up.u1, 0.0);
    const double mass = n.down.rho * u.dot(n.nu) - m * n.nu.x();
    r.mass = std::max(r.mass, std::abs(mass) / m);
    r.tangential = std::max(r.tangential, std::abs(jump.dot(n.tau)) / tr.up.u1);
  }
  return r;
}

EntropyMargins check_entropy(const ShockTraceState& tr) {
  EntropyMargins e{std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
  for (const auto& n : tr.nodes) {
    const double un = n.down.u1 * n.nu.x() + n.down.u2 * n.nu.y();
    e.density = std::min(e.density, n.down.rho - tr.up.rho);
    e.normal_drop = std::min(e.normal_drop, tr.up.u1 * n.nu.x() - un);
    e.normal_speed = std::min(e.normal_speed, un);
  }
  return e;
}

SubsonicReport check_subsonic(const GasParams& g, const StreamField& field) {
  SubsonicReport s;
  for (std::size_t k = 0; k < field.rho.size(); ++k)
    s.max_mach = std::max(s.max_mach, mach(g, field.state(k)));
  s.sigma = 1.0 - s.max_mach;
  return s;
}

VelocitySigns check_velocity_signs(const BodyFittedGrid& grid,
                                   const StreamField& field) {
  VelocitySigns v;
  const int ns = grid.ns;
  const Vec2 p0 = grid.point(ns - 1, 0);
  v.nose_cell = std::max((grid.point(ns - 2, 0) - p0).norm(),
                         (grid.point(ns - 1, 1) - p0).norm());
  v.ball_radius = 2.0 * v.nose_cell;
  v.min_u1 = std::numeric_limits<double>::infinity();
  v.min_u2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.nt; ++j) {
    for (int i = 0; i < ns; ++i) {
      const int k = grid.idx(i, j);
      if ((grid.point(i, j) - p0).norm() > v.ball_radius)
        v.min_u1 = std::min(v.min_u1, field.u1(k));
      if (j > 0) v.min_u2 = std::min(v.min_u2, field.u2(k));
    }
  }
  const int k0 = grid.idx(ns - 1, 0);
  v.stagnation_speed = std::hypot(field.u1(k0), field.u2(k0));
  return v;
}

QMonotone check_q_monotone(const ShockTraceState& tr) {
  QMonotone q;
  q.min_forward_difference = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < tr.nodes.size(); ++j)
    q.min_forward_difference =
        std::min(q.min_forward_difference, tr.nodes[j].q - tr.nodes[j - 1].q);
  q.q_first = tr.nodes.front().q;
  q.q_last = tr.nodes.back().q;
  return q;
}

double f_eta(double gamma, double eta) {
  return ((gamma + 1.0) * eta * eta - 2.0 * std::pow(eta, gamma + 1.0)) /
             (gamma - 1.0) -
         1.0;
}

double sin2beta_closed(const FlowState& up, double q, double rho) {
  const double ui2 = up.u1 * up.u1;
  const double r = up.rho / rho;
  return (q * q - ui2) / (ui2 * (r * r - 1.0));
}

Convexity check_convexity(const ShockCurve& f, const ShockTraceState& tr,
                          const GasParams& g) {
  Convexity c;
  c.min_fpp = std::numeric_limits<double>::infinity();
  const auto& xs = f.nodes();
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    if (j > 0) c.min_fpp = std::min(c.min_fpp, f.d2(xs[j]));
    c.min_fpp = std::min(c.min_fpp, f.d2(0.5 * (xs[j] + xs[j + 1])));
  }
  c.max_f_eta = -std::numeric_limits<double>::infinity();
  c.max_dsin2beta_dq = -std::numeric_limits<double>::infinity();
  double qmax = 0.0;
  for (const auto& n : tr.nodes) qmax = std::max(qmax, n.q);
  for (std::size_t j = 0; j < tr.nodes.size(); ++j) {
    const auto& n = tr.nodes[j];
    const double closed = sin2beta_closed(tr.up, n.q, n.down.rho);
    const double geom = 1.0 / (1.0 + n.fp * n.fp);
    c.sin2beta_mismatch = std::max(c.sin2beta_mismatch, std::abs(closed - geom));
    c.max_f_eta = std::max(c.max_f_eta, f_eta(g.gamma, tr.up.rho / n.down.rho));
    if (j > 0) {
      const auto& m = tr.nodes[j - 1];
      const double dq = n.q - m.q;
      if (std::abs(dq) > 1e-12 * qmax) {
        const double ds = closed - sin2beta_closed(tr.up, m.q, m.down.rho);
        c.max_dsin2beta_dq = std::max(c.max_dsin2beta_dq, ds / dq);
        ++c.dq_pairs;
      }
    }
  }
  return c;
}

Asymptotics check_asymptotics(const BodyFittedGrid& grid,
                              const StreamField& field, const ShockCurve& f,
                              const BackgroundPair& bg) {
  Asymptotics a;
  const Vec2 target = bg.rho_st * bg.u_st * Vec2(1.0, bg.kappa);
  const int j0 = static_cast<int>(std::ceil(0.9 * (grid.nt - 1)));
  double sum = 0.0;
  int cnt = 0;
  for (int j = j0; j < grid.nt; ++j)
    for (int i = 0; i < grid.ns; ++i) {
      const int k = grid.idx(i, j);
      const Vec2 perp(field.gx2[k], -field.gx1[k]);
      sum += (perp - target).norm();
      ++cnt;
    }
  a.far_field = sum / cnt / target.norm();
  a.fprime_dev = std::abs(f.d1(f.L()) - bg.s_st);
  return a;
}

bool VerificationReport::all_pass() const {
  return std::all_of(lines.begin(), lines.end(),
                     [](const CheckLine& l) { return l.pass; });
}

const CheckLine* VerificationReport::find(const std::string& name) const {
  for (const auto& l : lines)
    if (l.name == name) return &l;
  return nullptr;
}

std::string VerificationReport::text() const {
  std::ostringstream os;
  for (const auto& l : lines) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %.10e %s %.6e %s\n", l.name.c_str(),
                  l.value, l.relation.c_str(), l.tolerance,
                  l.pass ? "PASS" : "FAIL");
    os << buf;
  }
  return os.str();
}

namespace {

void add(VerificationReport& r, const std::string& name, double value,
         const std::string& rel, double tol) {
  bool pass = false;
  if (std::isfinite(value)) {
    if (rel == "<=") pass = value <= tol;
    else if (rel == ">=") pass = value >= tol;
    else if (rel == "<") pass = value < tol;
    else if (rel == ">") pass = value > tol;
  }
  r.lines.push_back({name, value, rel, tol, pass});
}

}  // namespace

VerificationReport verify(const VerifyInput& in) {
  VerificationReport r;
  const auto& grid = *in.grid;
  const auto& field = *in.field;
  const auto& f = *in.shock;
  const auto& dom = *in.domain;
  const GasParams& g = in.gas;
  const FlowState up = incoming_state(g, in.eps);
  const BackgroundPair& bg = in.background;
  const double dt = 1.0 / (grid.nt - 1);

  const double b0 = dom.body.b0();
  add(r, "shock_axis_intercept_error", std::abs(f.value(0.0) - (b0 - dom.d0)),
      "<=", 0.0);
  if (in.blunt) add(r, "shock_axis_slope", std::abs(f.d1(0.0)), "<=", 1e-12);
  add(r, "detach_min_gap", dom.min_gap, ">=", in.tol.detach_fraction * dom.d0);

  // Field consistency: boundary data, admissibility and PDE residual.
  const BoundaryData bc =
      in.boundary ? *in.boundary : physical_boundary_data(g, in.eps);
  double pscale = 0.0, bdev = 0.0, zmax = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    pscale = std::max(pscale, std::abs(field.psi[k]));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 x(grid.x1[k], grid.x2[k]);
    double want = field.psi[k];
    switch (grid.tag[k]) {
      case Tag::Shock: want = bc.shock(x); break;
      case Tag::Body: want = bc.body(x); break;
      case Tag::Sym: want = bc.sym(x); break;
      default: break;
    }
    bdev = std::max(bdev, std::abs(field.psi[k] - want));
    zmax = std::max(zmax, field.gx1[k] * field.gx1[k] +
                              field.gx2[k] * field.gx2[k]);
  }
  add(r, "boundary_data_error", bdev / std::max(pscale, 1e-300), "<=", 1e-10);
  add(r, "admissibility_ratio", zmax / zeta_sonic(g), "<", 1.0);
  {
    LinearBVP bvp(grid);
    double res = std::numeric_limits<double>::infinity();
    try {
      const Coefficients a = coefficients(g, field, 0.0);
      res = bvp.residual(a, field.psi);
    } catch (const std::exception&) {
    }
    add(r, "pde_residual", res, "<=", in.tol.tol_pde);
  }
  if (!in.boundary) {
    double pmin = std::numeric_limits<double>::infinity();
    for (double v : field.psi) pmin = std::min(pmin, v);
    add(r, "psi_min", pmin / std::max(pscale, 1e-300), ">=", -1e-10);
  }

  const SubsonicReport sub = check_subsonic(g, field);
  add(r, "subsonic_margin", sub.sigma, ">", in.tol.mach_margin);

  const ShockTraceState tr = build_trace(grid, field, f, g, in.eps);
  const RhResiduals rh = check_rh(tr);
  add(r, "rh_mass", rh.mass, "<=", in.tol.rh);
  add(r, "rh_tangential", rh.tangential, "<=", in.tol.rh);
  const EntropyMargins em = check_entropy(tr);
  add(r, "entropy_density", em.density, ">", 0.0);
  add(r, "entropy_normal_drop", em.normal_drop, ">", 0.0);
  add(r, "entropy_normal_speed", em.normal_speed, ">", 0.0);

  const double tol_sign = in.tol.sign_factor * up.u1;
  const VelocitySigns vs = check_velocity_signs(grid, field);
  add(r, "u1_min", vs.min_u1, ">=", -tol_sign);
  add(r, "u2_min", vs.min_u2, ">=", -tol_sign);
  if (in.blunt)
    add(r, "stagnation_speed", vs.stagnation_speed, "<=",
        vs.nose_cell / dom.d0 * up.u1);

  const double q_st = bg.u_st * std::sqrt(1.0 + bg.kappa * bg.kappa);
  const QMonotone qm = check_q_monotone(tr);
  add(r, "q_monotone", qm.min_forward_difference, ">=",
      -in.tol.q_factor * dt * dt * q_st);
  if (in.blunt) add(r, "q_endpoint_gain", qm.q_last - qm.q_first, ">", 0.0);

  const double hlen = dom.body.h0() > 0.0 ? dom.body.h0() : dom.d0;
  const Convexity cv = check_convexity(f, tr, g);
  add(r, "convexity_min_fpp", cv.min_fpp, ">=",
      -in.tol.cvx_factor * dt * dt * bg.s_st / hlen);
  add(r, "sin2beta_mismatch", cv.sin2beta_mismatch, "<=", in.tol.sin2beta);
  add(r, "f_eta_max", cv.max_f_eta, "<", 0.0);
  if (in.blunt) add(r, "dsin2beta_dq_max", cv.max_dsin2beta_dq, "<", 0.0);

  if (in.blunt) {
    const double u_ns = normal_shock_speed(g, in.eps);
    const double rho_ns = up.rho * up.u1 / u_ns;
    const FlowState p1 = field.state(grid.idx(0, 0));
    const double err = std::max(std::abs(p1.rho - rho_ns) / rho_ns,
                                std::abs(p1.u1 - u_ns) / u_ns);
    add(r, "axis_normal_shock_error", err, "<=", in.tol.axis_oracle);
  }
  return r;
}

}  // namespace detshock
