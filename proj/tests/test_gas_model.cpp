#include <doctest.h>

#include <cmath>
#include <random>

#include "detshock/errors.hpp"
#include "detshock/gas_model.hpp"

using namespace detshock;

namespace {

// Plain bisection for H(rho) = zeta/2 on [rho_sonic, rho_max].
double rho_hat_bisect(const GasParams& g, double zeta) {
  double lo = rho_sonic(g), hi = rho_max(g);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    // H decreases on the subsonic branch.
    if (h_function(g, mid) > 0.5 * zeta) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("enthalpy values") {
  CHECK(enthalpy({2.0, 1.0}, 1.0) == doctest::Approx(1.0));
  CHECK(enthalpy({3.0, 1.0}, 2.0) == doctest::Approx(2.0));
  CHECK(enthalpy({1.4, 1.0}, 0.0) == 0.0);
  CHECK(enthalpy_inverse({1.4, 1.0}, enthalpy({1.4, 1.0}, 0.37)) ==
        doctest::Approx(0.37).epsilon(1e-13));
}

TEST_CASE("sound speed and mach") {
  CHECK(sound_speed({3.0, 1.0}, 2.0) == doctest::Approx(2.0));
  CHECK(mach({2.0, 1.0}, FlowState{1.0, 1.0, 0.0}) == doctest::Approx(1.0));
  const GasParams g{2.0, 1.0};
  CHECK(mach(g, incoming_state(g, 0.1)) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("H function values and critical densities") {
  const GasParams g{2.0, 1.0};
  CHECK(h_function(g, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(h_function(g, 2.0 / 3.0) == doctest::Approx(4.0 / 27.0));
  CHECK(h_function(g, 0.0) == 0.0);
  CHECK(rho_sonic(g) == doctest::Approx(2.0 / 3.0));
  CHECK(rho_max(g) == doctest::Approx(1.0));
  const GasParams g3{3.0, 2.0};
  CHECK(rho_sonic(g3) == doctest::Approx(std::sqrt(2.0)));
  CHECK(rho_max(g3) == doctest::Approx(2.0));
  for (const GasParams gg : {g, g3, GasParams{1.4, 0.7}}) {
    const double rs = rho_sonic(gg), d = 1e-6 * rs;
    const double fd = (h_function(gg, rs + d) - h_function(gg, rs - d)) / (2 * d);
    CHECK(std::abs(fd) < 1e-10 + 1e-8 * std::abs(h_function(gg, rs)));
    CHECK(std::abs(h_prime(gg, rs)) < 1e-12);
    CHECK(zeta_sonic(gg) == doctest::Approx(2.0 * h_function(gg, rs)));
  }
}

TEST_CASE("rho_hat") {
  const GasParams g{2.0, 1.0};
  CHECK(rho_hat(g, 0.0) == doctest::Approx(rho_max(g)));
  const double z = zeta_sonic(g) * (1.0 - 1e-12);
  CHECK(rho_hat(g, z) == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  for (double frac : {0.1, 0.5, 0.9, 0.999}) {
    const double zeta = frac * zeta_sonic(g);
    CHECK(rho_hat(g, zeta) == doctest::Approx(rho_hat_bisect(g, zeta)).epsilon(1e-11));
  }
  for (double r : {0.7, 0.8, 0.95, 1.0}) {
    CHECK(rho_hat(g, 2.0 * h_function(g, r)) == doctest::Approx(r).epsilon(1e-10));
  }
  CHECK_THROWS_AS(rho_hat(g, 1.1 * zeta_sonic(g)), RangeError);
  CHECK_THROWS_AS(rho_hat(g, -1.0), RangeError);
}

TEST_CASE("mach_of_rho") {
  const GasParams g{2.0, 1.0};
  CHECK(mach_of_rho(g, 2.0 / 3.0) == doctest::Approx(1.0));
  CHECK(mach_of_rho(g, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mach_of_rho(g, 0.7) > mach_of_rho(g, 0.9));
}

TEST_CASE("incoming state") {
  const GasParams g{2.0, 1.0};
  const FlowState s = incoming_state(g, 0.1);
  CHECK(s.u1 == doctest::Approx(1.400280).epsilon(1e-6));
  CHECK(s.rho == doctest::Approx(0.0196078).epsilon(1e-5));
  CHECK(s.u2 == 0.0);
  CHECK(std::abs(bernoulli_residual(g, s)) < 1e-12);
  const FlowState lim = incoming_state_limit(g, 0.0);
  CHECK(lim.u1 == doctest::Approx(std::sqrt(2.0)));
  CHECK(lim.rho == 0.0);
  CHECK_THROWS_AS(incoming_state(g, 0.0), DomainError);
  CHECK_THROWS_AS(incoming_state(g, 1.0), DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate({1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate({1.4, 0.0}), DomainError);
  CHECK_NOTHROW(validate({1.4, 1.0}));
}

TEST_CASE("H' sign pattern on random samples") {
  std::mt19937_64 rng(7);
  for (const GasParams g : {GasParams{2.0, 1.0}, GasParams{1.4, 1.0}, GasParams{3.0, 2.0}}) {
    std::uniform_real_distribution<double> U(0.0, rho_max(g));
    const double rs = rho_sonic(g);
    for (int k = 0; k < 1000; ++k) {
      const double r = U(rng);
      if (std::abs(r - rs) < 1e-3 * rs || r < 1e-6) continue;
      const double d = 1e-7 * rs;
      const double fd = (h_function(g, r + d) - h_function(g, r - d)) / (2 * d);
      if (r < rs) CHECK(fd > 0.0); else CHECK(fd < 0.0);
    }
  }
}
