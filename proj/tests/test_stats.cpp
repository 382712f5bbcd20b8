#include <cmath>

#include "doctest.h"
#include "funreg/rng.hpp"
#include "funreg/stats.hpp"

using namespace funreg;

TEST_CASE("normal quantile matches tabulated values") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.9987341) == doctest::Approx(3.0193).epsilon(1e-3));
  CHECK(normal_cdf(normal_quantile(0.123)) == doctest::Approx(0.123).epsilon(1e-10));
}

TEST_CASE("student t two-sided p-values") {
  // Reference values from the t distribution: P(|T_10| > 2.228...) = 0.05.
  CHECK(student_t_two_sided_p(2.2281389, 10.0) ==
        doctest::Approx(0.05).epsilon(1e-6));
  CHECK(student_t_two_sided_p(0.0, 5.0) == doctest::Approx(1.0));
  CHECK(student_t_two_sided_p(12.7062047, 1.0) ==
        doctest::Approx(0.05).epsilon(1e-6));
  // Large df approaches the normal tail.
  CHECK(student_t_two_sided_p(1.959964, 1e7) ==
        doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("rng substreams are deterministic and disjoint") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng parent(42);
  Rng c1 = parent.child(1);
  Rng c2 = parent.child(2);
  CHECK(c1.next_u64() != c2.next_u64());

  // Children do not depend on parent consumption.
  Rng parent2(42);
  parent2.next_u64();
  CHECK(parent2.child(1).next_u64() == Rng(42).child(1).next_u64());
}

TEST_CASE("rng normal moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));
}
