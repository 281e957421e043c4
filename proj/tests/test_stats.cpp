#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "pmkt/stats.hpp"

using namespace pmkt;

TEST_CASE("normal cdf matches reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(-2.0) == doctest::Approx(0.022750131948179207).epsilon(1e-14));
  CHECK(normal_sf(2.0) == doctest::Approx(0.022750131948179207).epsilon(1e-14));
  CHECK(normal_sf(0.7) == doctest::Approx(normal_cdf(-0.7)).epsilon(1e-15));
}

TEST_CASE("log cdf stays accurate deep in the tail") {
  struct Pin {
    double z, expected;
  };
  // reference values from 40-digit arithmetic
  const Pin pins[] = {
      {-50.0, -1254.8313611394199}, {-40.0, -804.60844201375379},
      {-36.5, -670.6420000003137},  {-36.0, -652.5032275937984},
      {-20.0, -203.91715537109726}, {-10.0, -53.231285150512471},
      {-5.0, -15.064998393988726},  {-1.0, -1.8410216450092635},
      {0.5, -0.36894641528865639},  {3.0, -0.0013508099647481938},
  };
  for (const Pin& p : pins) {
    CHECK(normal_log_cdf(p.z) == doctest::Approx(p.expected).epsilon(1e-12));
  }
  CHECK(normal_log_cdf(10.0) == doctest::Approx(-7.6198530241605261e-24).epsilon(1e-9));
  CHECK(normal_log_sf(50.0) == doctest::Approx(-1254.8313611394199).epsilon(1e-12));
}

TEST_CASE("log cdf is continuous across the asymptotic switch") {
  const double below = normal_log_cdf(-36.0000001);
  const double above = normal_log_cdf(-35.9999999);
  CHECK(std::fabs(below - above) < 1e-4);
  for (double z = -60.0; z < -30.0; z += 0.37) {
    CHECK(normal_log_cdf(z) < normal_log_cdf(z + 0.37));
  }
}

TEST_CASE("logit and expit invert each other") {
  for (double p : {0.01, 0.247, 0.5, 0.9}) {
    CHECK(expit(logit(p)) == doctest::Approx(p).epsilon(1e-14));
  }
  CHECK_THROWS_AS(logit(0.0), std::invalid_argument);
  CHECK_THROWS_AS(logit(1.0), std::invalid_argument);
}
