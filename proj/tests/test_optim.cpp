#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pmkt/optim.hpp"

using namespace pmkt;

TEST_CASE("nelder-mead minimizes a quadratic bowl") {
  const auto f = [](const std::vector<double>& x) {
    return (x[0] - 1.5) * (x[0] - 1.5) + 3.0 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  const NelderMeadResult r = nelder_mead(f, {0.0, 0.0}, {0.5, 0.5});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("nelder-mead handles a curved valley") {
  const auto rosenbrock = [](const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions options;
  options.max_iterations = 3000;
  const NelderMeadResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, {0.3, 0.3}, options);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("nelder-mead is deterministic") {
  const auto f = [](const std::vector<double>& x) {
    return std::sin(3.0 * x[0]) + x[0] * x[0] + std::cos(x[1]);
  };
  const NelderMeadResult a = nelder_mead(f, {0.7, -0.3}, {0.2, 0.2});
  const NelderMeadResult b = nelder_mead(f, {0.7, -0.3}, {0.2, 0.2});
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.x[1] == b.x[1]);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("bisection root finder") {
  const auto f = [](double x) { return x * x - 2.0; };
  CHECK(bisect_root(f, 0.0, 2.0, 1e-12) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK_THROWS_AS(bisect_root(f, 2.0, 3.0, 1e-12), std::runtime_error);
}
