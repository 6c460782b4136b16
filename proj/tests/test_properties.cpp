#include <doctest.h>

#include "properties.hpp"

using namespace detshock::testing;

TEST_CASE("module invariants under 100 random parameter draws") {
  const PropertySummary s = run_property_harness(100);
  CHECK(s.draws == 100);
  for (const auto& [name, t] : s.tally) {
    INFO(name, ": ", t.failures, "/", t.checks, " ", t.first_failure);
    CHECK(t.failures == 0);
  }
}
