#include "pmkt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pmkt {

namespace {

double simplex_diameter(const std::vector<std::vector<double>>& verts) {
  double d = 0.0;
  for (std::size_t a = 0; a < verts.size(); ++a) {
    for (std::size_t b = a + 1; b < verts.size(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < verts[a].size(); ++i) {
        const double diff = verts[a][i] - verts[b][i];
        s += diff * diff;
      }
      d = std::max(d, std::sqrt(s));
    }
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& start,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0 || steps.size() != n) throw std::invalid_argument("nelder_mead: bad dimensions");

  std::vector<std::vector<double>> verts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += steps[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(verts[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult result;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    if (simplex_diameter(verts) < options.diameter_tol) {
      result.converged = true;
      break;
    }

    const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += verts[k][i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + coeff * (centroid[i] - verts[worst][i]);
      return x;
    };

    std::vector<double> reflected = blend(options.reflection);
    const double fr = f(reflected);

    if (fr < values[best]) {
      std::vector<double> expanded = blend(options.reflection * options.expansion);
      const double fe = f(expanded);
      if (fe < fr) {
        verts[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        verts[worst] = std::move(reflected);
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second_worst]) {
      verts[worst] = std::move(reflected);
      values[worst] = fr;
      continue;
    }

    const bool outside = fr < values[worst];
    std::vector<double> contracted =
        outside ? blend(options.reflection * options.contraction) : blend(-options.contraction);
    const double fc = f(contracted);
    if (fc < std::min(fr, values[worst])) {
      verts[worst] = std::move(contracted);
      values[worst] = fc;
      continue;
    }

    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i) {
        verts[k][i] = verts[best][i] + options.shrink * (verts[k][i] - verts[best][i]);
      }
      values[k] = f(verts[k]);
    }
  }

  const std::size_t best =
      static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = verts[best];
  result.value = values[best];
  result.iterations = iter;
  return result;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iterations) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw std::runtime_error("bisect_root: no sign change on the bracket");
  }
  for (int i = 0; i < max_iterations && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pmkt
