#include <doctest.h>

#include <cmath>
#include <vector>

#include "perc/rng.hpp"

using namespace perc;

TEST_CASE("same seed and index reproduce the same sequence") {
  RngStream a = derive_stream(0x1234abcdULL, 0);
  RngStream b = derive_stream(0x1234abcdULL, 0);
  for (int i = 0; i < 10000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("distinct stream indices differ") {
  RngStream a = derive_stream(7, 0);
  RngStream b = derive_stream(7, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("streams with distinct indices are empirically uncorrelated") {
  RngStream a = derive_stream(42, 0);
  RngStream b = derive_stream(42, 1);
  const int n = 1000000;
  double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.next_unit();
    const double y = b.next_unit();
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double ma = sa / n;
  const double mb = sb / n;
  const double cov = sab / n - ma * mb;
  const double va = saa / n - ma * ma;
  const double vb = sbb / n - mb * mb;
  const double rho = cov / std::sqrt(va * vb);
  CHECK(std::abs(rho) < 0.01);
}

TEST_CASE("uniform draws land in [0,1) with the right mean") {
  RngStream rng = derive_stream(3, 5);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("stream identity is recorded") {
  RngStream rng = derive_stream(99, 12);
  CHECK(rng.master_seed() == 99);
  CHECK(rng.stream_index() == 12);
}
