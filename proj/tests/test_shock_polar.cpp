#include <doctest.h>

#include <array>
#include <cmath>
#include <string>

#include "detshock/errors.hpp"
#include "detshock/shock_polar.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace detshock;
using detshock::testing::deg;
using detshock::testing::kPi;

using detshock::testing::brute_force_root;

TEST_CASE("residual vanishes at the eps = 0 closed forms") {
  const GasParams g{2.0, 1.0};
  const FlowState in0 = incoming_state_limit(g, 0.0);
  for (double kappa : {0.3, 1.0, 2.0}) {
    const auto r = rh_residual(g, in0, kappa, 1.0, 0.0, 0.0);
    for (double v : r) CHECK(std::abs(v) < 1e-14);
  }
  const auto r3 = rh_residual(g, in0, 1.0, 0.5, std::sqrt(2.0) / 2.0, 1.0);
  for (double v : r3) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("perturbed residual signs") {
  const GasParams g{2.0, 1.0};
  const FlowState in0 = incoming_state_limit(g, 0.0);
  const double kappa = std::tan(deg(30.0));
  const auto rr = rh_residual(g, in0, kappa, 1.1, 0.0, 0.0);
  CHECK(rr[2] > 0.0);
  const auto ru = rh_residual(g, in0, kappa, 1.0, 1e-3, 0.0);
  CHECK(ru[0] < 0.0);
  CHECK(ru[1] > 0.0);
}

TEST_CASE("closed-form limits") {
  for (double gamma : {1.4, 2.0, 3.0}) {
    const GasParams g{gamma, 1.0};
    for (double th : {20.0, 30.0, 45.0}) {
      const double k = std::tan(deg(th));
      const PolarSolution st = strong_limit(g, k);
      const PolarSolution wk = weak_limit(g, k);
      CHECK(st.rho == doctest::Approx(enthalpy_inverse(g, 1.0)));
      CHECK(st.u == 0.0);
      CHECK(st.s == 0.0);
      CHECK(wk.rho == doctest::Approx(enthalpy_inverse(g, k * k / (1 + k * k))));
      CHECK(wk.u == doctest::Approx(std::sqrt(2.0) / (1 + k * k)));
      CHECK(wk.s == doctest::Approx(1.0 / k));
    }
  }
}

TEST_CASE("continued branches match the brute-force oracle") {
  const GasParams g{2.0, 1.0};
  struct Case { double eps, th; };
  for (const Case c : {Case{0.1, 45.0}, Case{0.1, 30.0}, Case{0.05, 20.0}}) {
    const double k = std::tan(deg(c.th));
    const BranchPair bp = solve_branches(g, c.eps, deg(c.th));
    const auto st = brute_force_root(g, c.eps, k, 0.8, 1.0, 0.0, 0.1, 0.0, 0.1);
    CHECK(bp.strong.rho == doctest::Approx(st[0]).epsilon(1e-6));
    CHECK(std::abs(bp.strong.u - st[1]) < 1e-6);
    CHECK(std::abs(bp.strong.s - st[2]) < 1e-6);
    const PolarSolution wl = weak_limit(g, k);
    const auto wk = brute_force_root(g, c.eps, k, 0.5 * wl.rho, 1.5 * wl.rho,
                                     0.5 * wl.u, 1.5 * wl.u, 0.5 * wl.s, 1.5 * wl.s);
    CHECK(bp.weak.rho == doctest::Approx(wk[0]).epsilon(1e-6));
    CHECK(bp.weak.u == doctest::Approx(wk[1]).epsilon(1e-6));
    CHECK(bp.weak.s == doctest::Approx(wk[2]).epsilon(1e-6));
  }
}

TEST_CASE("small eps strong branch approaches the normal shock") {
  const GasParams g{2.0, 1.0};
  const BranchPair bp = solve_branches(g, 1e-4, deg(30.0));
  CHECK(std::abs(bp.strong.rho - 1.0) < 1e-6);
  CHECK(std::abs(bp.strong.u) < 1e-6);
  CHECK(std::abs(bp.strong.s) < 1e-6);
  double prev = INFINITY;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const double s = solve_branches(g, eps, deg(30.0)).strong.s;
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("entropy, ordering and normal alignment") {
  const GasParams g{2.0, 1.0};
  for (double eps : {0.01, 0.1, 0.25}) {
    for (double th : {20.0, 30.0, 45.0}) {
      const double k = std::tan(deg(th));
      const FlowState in = incoming_state(g, eps);
      const BranchPair bp = solve_branches(g, eps, deg(th));
      CHECK(bp.strong.u < bp.weak.u);
      CHECK(bp.weak.u * std::sqrt(1 + k * k) < in.u1);
      for (const auto& sol : {bp.strong, bp.weak}) {
        CHECK(entropy_margins(g, in, k, sol).ok());
        const double du1 = in.u1 - sol.u, du2 = -sol.u * k;
        const double cross = du1 * (-sol.s) - du2 * 1.0;
        CHECK(std::abs(cross) <= 1e-8 * std::hypot(du1, du2));
      }
    }
  }
}

TEST_CASE("eps guard and branch collision") {
  const GasParams g{2.0, 1.0};
  CHECK_THROWS_AS(solve_branches(g, 0.3, deg(30.0)), DomainError);
  try {
    solve_branches(g, 0.05, deg(85.0));
    FAIL("expected a branch collision");
  } catch (const BranchCollisionError& e) {
    CHECK(std::string(e.what()).find("detachment angle") != std::string::npos);
  }
}

TEST_CASE("shock polar curve") {
  const GasParams g{2.0, 1.0};
  const double eps = 0.1;
  const PolarCurve pc = polar_curve(g, eps, 129);
  CHECK(pc.dropped.empty());
  REQUIRE(pc.samples.size() >= 100);
  CHECK(pc.u0 == doctest::Approx(normal_shock_speed(g, eps)));
  CHECK(std::abs(polar_height(g, eps, pc.u0)) < 1e-8);
  CHECK(std::abs(polar_height(g, eps, pc.u_inf)) < 1e-8);
  for (std::size_t k = 1; k + 1 < pc.samples.size(); ++k) {
    CHECK(pc.samples[k].second > 0.0);
    const auto [u0, v0] = pc.samples[k - 1];
    const auto [u1, v1] = pc.samples[k];
    const auto [u2, v2] = pc.samples[k + 1];
    const double d2 = ((v2 - v1) / (u2 - u1) - (v1 - v0) / (u1 - u0)) / (u2 - u0);
    CHECK(d2 < 0.0);
  }
  // The strong and weak roots lie on the polar.
  const BranchPair bp = solve_branches(g, eps, deg(30.0));
  const double k = std::tan(deg(30.0));
  for (const auto& sol : {bp.strong, bp.weak})
    CHECK(polar_height(g, eps, sol.u) == doctest::Approx(sol.u * k).epsilon(1e-8));
}

TEST_CASE("detachment angle") {
  const GasParams g{2.0, 1.0};
  const double td = detachment_angle(g, 0.05);
  CHECK(td > deg(30.0));
  CHECK(td < kPi / 2);
  // Tangency: the line v = u tan(theta_det) touches the polar once.
  const double t = std::tan(td);
  const double u_inf = incoming_state(g, 0.05).u1;
  const double u0 = normal_shock_speed(g, 0.05);
  double gap_max = -INFINITY;
  for (int k = 1; k < 20000; ++k) {
    const double u = u0 + (u_inf - u0) * k / 20000.0;
    gap_max = std::max(gap_max, polar_height(g, 0.05, u) - u * t);
  }
  CHECK(std::abs(gap_max) < 1e-6);
}

TEST_CASE("q_gamma decay exponent") {
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  CHECK(q_gamma_rate({2.0, 1.0}, eps, deg(30.0)) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(q_gamma_rate({3.0, 1.0}, eps, deg(30.0)) == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("tiny upstream density keeps full relative precision") {
  // gamma = 1.4 at eps = 1e-4 puts rho_inf near 1e-20.
  const GasParams g{1.4, 1.0};
  for (double th : {20.0, 30.0, 45.0}) {
    const double k = std::tan(deg(th));
    const FlowState in = incoming_state(g, 1e-4);
    const BranchPair bp = solve_branches(g, 1e-4, deg(th));
    CHECK(bp.strong.u > 0.0);
    CHECK(bp.strong.s > 0.0);
    // Mass balance along the normal fixes u to leading order.
    CHECK(bp.strong.rho * bp.strong.u == doctest::Approx(in.rho * in.u1).epsilon(1e-6));
    CHECK(bp.strong.s == doctest::Approx(bp.strong.u * k / (in.u1 - bp.strong.u)).epsilon(1e-10));
    CHECK(bp.weak.s == doctest::Approx(1.0 / k).epsilon(1e-12));
  }
}
