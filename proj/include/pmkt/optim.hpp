#pragma once

#include <functional>
#include <vector>

namespace pmkt {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double diameter_tol = 1e-8;
  int max_iterations = 500;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimizes f. The initial simplex is start plus one vertex per coordinate
// offset by steps[i]. Fully deterministic.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& start,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& options = {});

// Bisection root finder; f(lo) and f(hi) must have opposite signs.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iterations = 200);

}  // namespace pmkt
