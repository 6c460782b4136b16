#ifndef DETSHOCK_GEOMETRY_HPP_
#define DETSHOCK_GEOMETRY_HPP_

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "detshock/spline.hpp"

namespace detshock {

using Vec2 = Eigen::Vector2d;

// Symmetric body x1 = b(x2). Straight beyond h0: b = offset + |x2| cot(theta_w).
class BluntBody {
 public:
  // Profile on x2 >= 0; order = 0..3 selects the derivative.
  using Profile = std::function<double(double x2, int order)>;

  BluntBody(double theta_w, double h0, double asymptote_offset, Profile p,
            std::string name = "custom");

  double b(double x2) const;
  double d1(double x2) const;
  double d2(double x2) const;
  double d3(double x2) const;

  double theta_w() const { return theta_w_; }
  double kappa() const;  // tan(theta_w)
  double cot() const;
  double h0() const { return h0_; }
  double b0() const { return b(0.0); }
  double offset() const { return offset_; }
  const std::string& name() const { return name_; }
  // max over k = 1..3 of sup |b^(k)| on [0, h0] (sampled).
  double m_b() const;

 private:
  double theta_w_, h0_, offset_;
  Profile p_;
  std::string name_;
};

// Quintic-smoothstep blend of a flat nose into the wedge x1 = x2 cot(theta_w).
BluntBody default_body(double theta_w, double h0);
// Straight wedge with apex (apex, 0); not blunt, used as an exact test body.
BluntBody wedge_body(double theta_w, double apex);

struct BodyAxioms {
  bool symmetric = true;
  bool flat_nose = true;        // b'(0) = 0
  bool increasing = true;       // b' > 0 for x2 > 0
  bool convex = true;           // b'' >= 0 (warning only)
  bool straight_tail = true;    // b = offset + x2 cot beyond h0
  bool slope_bounded = true;    // 0 <= b' <= cot
  bool above_asymptote = true;  // b >= offset + x2 cot
  bool c3 = true;               // b''' continuous at h0
  bool blunt() const {
    return symmetric && flat_nose && increasing && straight_tail &&
           slope_bounded && above_asymptote && c3;
  }
};
BodyAxioms check_body_axioms(const BluntBody& body, int samples = 10000,
                             double tol = 1e-6);

enum class Tag : int { Interior = 0, Shock = 1, Body = 2, Sym = 3, Cutoff = 4 };
std::string to_string(Tag t);

struct CutoffDomain {
  BluntBody body;
  CubicSpline f;  // shock x1 = f(x2) on [0, L]
  double d0 = 0.0;
  double L = 0.0;
  Vec2 p0, p1, p2, p3;
  Vec2 n_c;               // (cos theta_w, sin theta_w)
  double min_gap = 0.0;   // min of b - f on [0, L]
};

CutoffDomain build_cutoff_domain(const BluntBody& body, const CubicSpline& f,
                                 double d0, double L);

// Parametrized boundary arc with its derivative.
struct Arc {
  std::function<Vec2(double)> pos;
  std::function<Vec2(double)> tangent;
};

struct BodyFittedGrid {
  int ns = 0, nt = 0;
  std::vector<double> x1, x2, jac;
  std::vector<Tag> tag;
  std::vector<double> s, t;  // parameter values of grid lines
  int idx(int i, int j) const { return j * ns + i; }
  std::size_t size() const { return x1.size(); }
  Vec2 point(int i, int j) const { return {x1[idx(i, j)], x2[idx(i, j)]}; }
};

// g(t) = (exp(beta t) - 1)/(exp(beta) - 1); beta = 0 is the identity.
double grading_map(double t, double beta);
double grading_map_d1(double t, double beta);

// Transfinite interpolation between a left arc (s = 0) and a right arc
// (s = 1) whose end points are joined by straight segments.
BodyFittedGrid transfinite_grid(const Arc& left, const Arc& right, int ns,
                                int nt);

// Shock nodes sit at x2 = L g(t_j), body nodes at x2 = P3.x2 g(t_j).
BodyFittedGrid make_grid(const CutoffDomain& dom, int ns, int nt,
                         double grading = 3.0);

// x2 coordinates of the shock nodes used by make_grid.
std::vector<double> shock_nodes(double L, int nt, double grading);

Vec2 rotate_to_eta(double theta_w, const Vec2& x);

// Fiberwise affine map from dom_a onto dom_b at fixed x2.
class DomainMorph {
 public:
  DomainMorph(const CutoffDomain& a, const CutoffDomain& b);
  Vec2 operator()(const Vec2& x) const;
  double common_height() const { return lmin_; }

 private:
  const CutoffDomain* a_;
  const CutoffDomain* b_;
  double lmin_;
};
DomainMorph morph_domains(const CutoffDomain& dom_a, const CutoffDomain& dom_b);

}  // namespace detshock

#endif  // DETSHOCK_GEOMETRY_HPP_
