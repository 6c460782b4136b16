#include "detshock/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "detshock/errors.hpp"

namespace detshock {

namespace {

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Quintic smoothstep and its antiderivative / derivatives.
double smooth_s(double t) { return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t); }
double smooth_s1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double smooth_s2(double t) { return 60.0 * t - 180.0 * t * t + 120.0 * t * t * t; }
double smooth_p(double t) {
  const double t4 = t * t * t * t;
  return 2.5 * t4 - 3.0 * t4 * t + t4 * t * t;
}

}  // namespace

BluntBody::BluntBody(double theta_w, double h0, double asymptote_offset,
                     Profile p, std::string name)
    : theta_w_(theta_w),
      h0_(h0),
      offset_(asymptote_offset),
      p_(std::move(p)),
      name_(std::move(name)) {
  if (!(theta_w > 0.0 && theta_w < 0.5 * std::numbers::pi))
    throw DomainError("body: theta_w must lie in (0, pi/2)");
  if (!(h0 >= 0.0)) throw DomainError("body: h0 must be >= 0");
  if (!p_) throw DomainError("body: empty profile");
}

double BluntBody::b(double x2) const { return p_(std::abs(x2), 0); }
double BluntBody::d1(double x2) const { return sgn(x2) * p_(std::abs(x2), 1); }
double BluntBody::d2(double x2) const { return p_(std::abs(x2), 2); }
double BluntBody::d3(double x2) const { return sgn(x2) * p_(std::abs(x2), 3); }
double BluntBody::kappa() const { return std::tan(theta_w_); }
double BluntBody::cot() const { return 1.0 / std::tan(theta_w_); }

double BluntBody::m_b() const {
  double m = 0.0;
  const int n = 2000;
  const double top = h0_ > 0.0 ? h0_ : 1.0;
  for (int k = 0; k <= n; ++k) {
    const double x = top * k / n;
    m = std::max({m, std::abs(d1(x)), std::abs(d2(x)), std::abs(d3(x))});
  }
  return m;
}

BluntBody default_body(double theta_w, double h0) {
  if (!(h0 > 0.0)) throw DomainError("default_body: h0 must be > 0");
  const double cot = 1.0 / std::tan(theta_w);
  const double b0 = 0.5 * h0 * cot;
  auto prof = [=](double x, int k) -> double {
    if (x >= h0) {
      switch (k) {
        case 0: return x * cot;
        case 1: return cot;
        default: return 0.0;
      }
    }
    const double t = x / h0;
    switch (k) {
      case 0: return b0 + cot * h0 * smooth_p(t);
      case 1: return cot * smooth_s(t);
      case 2: return cot * smooth_s1(t) / h0;
      default: return cot * smooth_s2(t) / (h0 * h0);
    }
  };
  return BluntBody(theta_w, h0, 0.0, prof, "smoothstep");
}

BluntBody wedge_body(double theta_w, double apex) {
  const double cot = 1.0 / std::tan(theta_w);
  auto prof = [=](double x, int k) -> double {
    switch (k) {
      case 0: return apex + x * cot;
      case 1: return cot;
      default: return 0.0;
    }
  };
  return BluntBody(theta_w, 0.0, apex, prof, "wedge");
}

BodyAxioms check_body_axioms(const BluntBody& body, int samples, double tol) {
  BodyAxioms ax;
  const double cot = body.cot();
  const double h0 = body.h0();
  const double top = 3.0 * (h0 > 0.0 ? h0 : 1.0);
  ax.flat_nose = std::abs(body.d1(0.0)) <= tol;
  for (int k = 0; k <= samples; ++k) {
    const double x = top * k / samples;
    const double b = body.b(x), b1 = body.d1(x), b2 = body.d2(x);
    if (body.b(-x) != b || body.d1(-x) != -b1) ax.symmetric = false;
    if (x > 0.0 && !(b1 > 0.0)) ax.increasing = false;
    if (b2 < -tol) ax.convex = false;
    if (b1 < -tol || b1 > cot + tol) ax.slope_bounded = false;
    const double line = body.offset() + x * cot;
    if (b < line - tol * (1.0 + x)) ax.above_asymptote = false;
    if (x >= h0 && std::abs(b - line) > tol * (1.0 + x)) ax.straight_tail = false;
  }
  if (h0 > 0.0) {
    const double dl = 1e-7 * h0;
    // One-sided limits of b''' by linear extrapolation.
    const double left = 2.0 * body.d3(h0 - dl) - body.d3(h0 - 2.0 * dl);
    const double right = 2.0 * body.d3(h0 + dl) - body.d3(h0 + 2.0 * dl);
    const double jump = std::abs(left - right);
    // Same size of check applied to b'' via one-sided differences.
    const double fd3 = (body.d2(h0 + dl) - body.d2(h0)) / dl -
                       (body.d2(h0) - body.d2(h0 - dl)) / dl;
    ax.c3 = jump <= tol * (1.0 + body.m_b()) &&
            std::abs(fd3) <= 1e-3 * (1.0 + body.m_b());
  }
  return ax;
}

std::string to_string(Tag t) {
  switch (t) {
    case Tag::Shock: return "shock";
    case Tag::Body: return "body";
    case Tag::Sym: return "sym";
    case Tag::Cutoff: return "cutoff";
    default: return "interior";
  }
}

CutoffDomain build_cutoff_domain(const BluntBody& body, const CubicSpline& f,
                                 double d0, double L) {
  if (!(d0 > 0.0)) throw GeometryError("detached distance d0 must be > 0");
  if (!(L > 0.0)) throw GeometryError("cutoff height L must be > 0");
  if (f.empty() || f.front() != 0.0 ||
      std::abs(f.back() - L) > 1e-12 * (1.0 + L))
    throw GeometryError("shock samples must span [0, L]");
  const double b0 = body.b0();
  const double scale = 1.0 + std::abs(b0) + d0;
  if (std::abs(f.value(0.0) - (b0 - d0)) > 1e-12 * scale)
    throw GeometryError("shock must start at b0 - d0 on the axis");

  CutoffDomain dom{body, f, d0, L, {}, {}, {}, {}, {}, 0.0};
  double gap = std::numeric_limits<double>::infinity();
  double where = 0.0;
  const auto& xs = f.nodes();
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    for (int m = 0; m < 8; ++m) {
      const double x = xs[k] + (xs[k + 1] - xs[k]) * m / 8.0;
      const double gp = body.b(x) - f.value(x);
      if (gp < gap) {
        gap = gp;
        where = x;
      }
    }
  }
  const double gl = body.b(L) - f.value(L);
  if (gl < gap) {
    gap = gl;
    where = L;
  }
  if (!(gap > 0.0)) {
    std::ostringstream m;
    m << "shock touches or crosses the body: b - f = " << gap
      << " at x2 = " << where;
    throw GeometryError(m.str());
  }
  dom.min_gap = gap;
  const double th = body.theta_w();
  dom.n_c = Vec2(std::cos(th), std::sin(th));
  dom.p0 = Vec2(b0, 0.0);
  dom.p1 = Vec2(f.value(0.0), 0.0);
  dom.p2 = Vec2(f.value(L), L);
  const Vec2 a(body.offset(), 0.0);
  dom.p3 = a + (dom.p2 - a).dot(dom.n_c) * dom.n_c;
  if (!(dom.p3.y() > body.h0())) {
    std::ostringstream m;
    m << "cutoff foot P3 at x2 = " << dom.p3.y()
      << " is not on the straight part of the body (h0 = " << body.h0()
      << "); L is too small";
    throw GeometryError(m.str());
  }
  return dom;
}

double grading_map(double t, double beta) {
  if (std::abs(beta) < 1e-12) return t;
  return std::expm1(beta * t) / std::expm1(beta);
}

double grading_map_d1(double t, double beta) {
  if (std::abs(beta) < 1e-12) return 1.0;
  return beta * std::exp(beta * t) / std::expm1(beta);
}

std::vector<double> shock_nodes(double L, int nt, double grading) {
  std::vector<double> x(nt);
  for (int j = 0; j < nt; ++j)
    x[j] = L * grading_map(static_cast<double>(j) / (nt - 1), grading);
  x[0] = 0.0;
  x[nt - 1] = L;
  return x;
}

BodyFittedGrid transfinite_grid(const Arc& left, const Arc& right, int ns,
                                int nt) {
  if (ns < 8 || nt < 8) throw DomainError("grid needs n_s, n_t >= 8");
  BodyFittedGrid g;
  g.ns = ns;
  g.nt = nt;
  const std::size_t n = static_cast<std::size_t>(ns) * nt;
  g.x1.resize(n);
  g.x2.resize(n);
  g.jac.resize(n);
  g.tag.resize(n);
  g.s.resize(ns);
  g.t.resize(nt);
  for (int i = 0; i < ns; ++i) g.s[i] = static_cast<double>(i) / (ns - 1);
  for (int j = 0; j < nt; ++j) g.t[j] = static_cast<double>(j) / (nt - 1);
  for (int j = 0; j < nt; ++j) {
    const double t = g.t[j];
    const Vec2 l = left.pos(t), r = right.pos(t);
    const Vec2 lt = left.tangent(t), rt = right.tangent(t);
    const Vec2 xs = r - l;
    for (int i = 0; i < ns; ++i) {
      const double s = g.s[i];
      const Vec2 x = (1.0 - s) * l + s * r;
      const Vec2 xt = (1.0 - s) * lt + s * rt;
      const int k = g.idx(i, j);
      g.x1[k] = x.x();
      g.x2[k] = x.y();
      g.jac[k] = xs.x() * xt.y() - xs.y() * xt.x();
      Tag tg = Tag::Interior;
      if (i == 0)
        tg = Tag::Shock;
      else if (i == ns - 1)
        tg = Tag::Body;
      else if (j == 0)
        tg = Tag::Sym;
      else if (j == nt - 1)
        tg = Tag::Cutoff;
      g.tag[k] = tg;
      if (!(g.jac[k] > 0.0)) {
        std::ostringstream m;
        m << "folded grid: Jacobian " << g.jac[k] << " at node (" << i << ", "
          << j << ")";
        throw FoldedGridError(m.str());
      }
    }
  }
  return g;
}

BodyFittedGrid make_grid(const CutoffDomain& dom, int ns, int nt,
                         double grading) {
  const double L = dom.L;
  const double h3 = dom.p3.y();
  const CubicSpline* f = &dom.f;
  const BluntBody* body = &dom.body;
  Arc left{[=](double t) {
             const double y = L * grading_map(t, grading);
             return Vec2(f->value(y), y);
           },
           [=](double t) {
             const double y = L * grading_map(t, grading);
             const double yt = L * grading_map_d1(t, grading);
             return Vec2(f->d1(y) * yt, yt);
           }};
  Arc right{[=](double t) {
              const double y = h3 * grading_map(t, grading);
              return Vec2(body->b(y), y);
            },
            [=](double t) {
              const double y = h3 * grading_map(t, grading);
              const double yt = h3 * grading_map_d1(t, grading);
              return Vec2(body->d1(y) * yt, yt);
            }};
  BodyFittedGrid g = transfinite_grid(left, right, ns, nt);
  // Pin the shock nodes to the exact node heights so the shock samples and
  // the grid share one set of x2 values.
  const auto ys = shock_nodes(L, nt, grading);
  for (int j = 0; j < nt; ++j) {
    const int k = g.idx(0, j);
    g.x2[k] = ys[j];
    g.x1[k] = f->value(ys[j]);
  }
  // Exact corners.
  g.x1[g.idx(ns - 1, 0)] = dom.p0.x();
  g.x2[g.idx(ns - 1, 0)] = 0.0;
  g.x1[g.idx(ns - 1, nt - 1)] = dom.p3.x();
  g.x2[g.idx(ns - 1, nt - 1)] = dom.p3.y();
  return g;
}

Vec2 rotate_to_eta(double theta_w, const Vec2& x) {
  const double s = std::sin(theta_w), c = std::cos(theta_w);
  return {s * x.x() - c * x.y(), c * x.x() + s * x.y()};
}

DomainMorph::DomainMorph(const CutoffDomain& a, const CutoffDomain& b)
    : a_(&a), b_(&b), lmin_(std::min(a.L, b.L)) {}

Vec2 DomainMorph::operator()(const Vec2& x) const {
  const double y = x.y();
  if (y < -1e-12 || y > lmin_ * (1.0 + 1e-12))
    throw DomainError("morph: point outside the common height range");
  const double bb = a_->body.b(y);
  const double fa = a_->f.value(y), fb = b_->f.value(y);
  const double den = fa - bb;
  if (!(std::abs(den) > 0.0))
    throw DomainError("morph: shock meets body, map is degenerate");
  return {(fb - bb) / den * (x.x() - bb) + bb, y};
}

DomainMorph morph_domains(const CutoffDomain& dom_a, const CutoffDomain& dom_b) {
  return DomainMorph(dom_a, dom_b);
}

}  // namespace detshock
