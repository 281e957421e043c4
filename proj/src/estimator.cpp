#include "pmkt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "pmkt/stats.hpp"
#include "pmkt/utility.hpp"

namespace pmkt {

namespace {

constexpr double kHalfShift = 1e-6;

void check_estimator_args(double sigma, double lambda) {
  if (!(sigma > 0.0)) throw std::invalid_argument("dispersion must be positive");
  if (!(lambda < 0.0)) throw std::invalid_argument("risk parameter must be negative");
}

double clamp_unit(double mu) { return std::clamp(mu, 0.0, 1.0); }

double log_ratio_at(double lambda, double mu, double sigma) {
  const ThresholdPair t = censoring_thresholds(lambda, mu);
  return std::log((1.0 - mu) / mu) + normal_log_sf((t.sell - mu) / sigma) -
         normal_log_cdf((t.buy - mu) / sigma);
}

}  // namespace

double log_likelihood(const VolumeSnapshot& snapshot, double mu, double sigma, double lambda) {
  check_estimator_args(sigma, lambda);
  double sum = 0.0;
  for (std::size_t i = 0; i < snapshot.prices.size(); ++i) {
    const double buy = snapshot.buy_votes[i];
    const double sell = snapshot.sell_votes[i];
    if (buy <= 0.0 && sell <= 0.0) continue;
    const ThresholdPair t = censoring_thresholds(lambda, snapshot.prices[i]);
    if (buy > 0.0) sum += buy * normal_log_sf((t.buy - mu) / sigma);
    if (sell > 0.0) sum += sell * normal_log_cdf((t.sell - mu) / sigma);
  }
  return sum;
}

MleResult mle_mu_sigma(const VolumeSnapshot& snapshot, double lambda,
                       const SolverConfig& config,
                       std::optional<std::pair<double, double>> warm_start) {
  if (!(lambda < 0.0)) throw std::invalid_argument("risk parameter must be negative");
  const double total = snapshot.total_votes();
  if (!(total > 0.0)) throw std::invalid_argument("snapshot carries no votes");

  double mu0 = config.start_mu;
  double sigma0 = config.start_sigma;
  if (warm_start) {
    mu0 = warm_start->first;
    sigma0 = warm_start->second;
  } else if (std::isnan(mu0)) {
    double weighted = 0.0;
    for (std::size_t i = 0; i < snapshot.prices.size(); ++i) {
      weighted += snapshot.prices[i] * (snapshot.buy_votes[i] + snapshot.sell_votes[i]);
    }
    mu0 = weighted / total;
  }

  const auto negative_loglik = [&](const std::vector<double>& x) {
    return -log_likelihood(snapshot, x[0], std::exp(x[1]), lambda);
  };
  const NelderMeadResult r = nelder_mead(negative_loglik, {mu0, std::log(sigma0)},
                                         {0.02, 0.25}, config.simplex);
  return {r.x[0], std::exp(r.x[1]), -r.value, r.converged};
}

double log_equilibrium_ratio(double lambda, double mu, double sigma) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("median price must lie in (0,1)");
  if (!(sigma > 0.0 && sigma < std::min(mu, 1.0 - mu))) {
    throw std::invalid_argument("dispersion outside the proven guard (0, min(mu,1-mu))");
  }
  if (lambda > 0.0) throw std::invalid_argument("risk parameter must be nonpositive");
  if (lambda == 0.0) return std::log((1.0 - mu) / mu);  // thresholds collapse to mu
  if (std::fabs(mu - 0.5) < 1e-9) {
    return 0.5 * (log_ratio_at(lambda, 0.5 - kHalfShift, sigma) +
                  log_ratio_at(lambda, 0.5 + kHalfShift, sigma));
  }
  return log_ratio_at(lambda, mu, sigma);
}

double equilibrium_lambda(double mu, double sigma, double tol) {
  if (std::fabs(mu - 0.5) < 1e-9) {
    return 0.5 * (equilibrium_lambda(0.5 - kHalfShift, sigma, tol) +
                  equilibrium_lambda(0.5 + kHalfShift, sigma, tol));
  }
  const auto f = [&](double lambda) { return log_ratio_at(lambda, mu, sigma); };
  double lo = -50.0;
  const double hi = -1e-12;
  if ((f(lo) < 0.0) == (f(hi) < 0.0)) {
    lo = -kMaxAbsRisk;  // dispersion close to the guard needs a wider bracket
    if ((f(lo) < 0.0) == (f(hi) < 0.0)) {
      throw std::runtime_error("equilibrium equation has no sign change on the bracket");
    }
  }
  return bisect_root(f, lo, hi, tol);
}

EstimateRecord fixed_point_estimate(const VolumeSnapshot& snapshot, const SolverConfig& config,
                                    const EstimateRecord* warm_start) {
  EstimateRecord record;
  record.time = snapshot.time;
  record.volume = snapshot.total_votes();

  double total_buy = 0.0, total_sell = 0.0;
  for (std::size_t i = 0; i < snapshot.prices.size(); ++i) {
    total_buy += snapshot.buy_votes[i];
    total_sell += snapshot.sell_votes[i];
  }
  if (record.volume <= 0.0 || total_buy <= 0.0 || total_sell <= 0.0) {
    // one-sided books do not identify the parameters
    record.boundary = true;
    record.converged = false;
    record.lambda = -1.0;
    if (record.volume > 0.0) {
      const MleResult one_sided = mle_mu_sigma(snapshot, record.lambda, config);
      record.mu = clamp_unit(one_sided.mu);
      record.sigma = one_sided.sigma;
      record.loglik = one_sided.loglik;
    }
    return record;
  }

  std::optional<std::pair<double, double>> inner_warm;
  if (warm_start && warm_start->converged) {
    inner_warm = std::make_pair(warm_start->mu, warm_start->sigma);
  }

  bool boundary_hit = false;
  const auto residual = [&](double lambda) {
    const MleResult inner = mle_mu_sigma(snapshot, lambda, config, inner_warm);
    inner_warm = std::make_pair(inner.mu, inner.sigma);
    double mu = inner.mu;
    if (mu <= 0.0 || mu >= 1.0) {
      boundary_hit = true;
      mu = std::clamp(mu, 1e-9, 1.0 - 1e-9);
    }
    double sigma = inner.sigma;
    const double guard = 0.999 * std::min(mu, 1.0 - mu);
    if (sigma >= guard) {
      boundary_hit = true;
      sigma = guard;
    }
    return lambda - equilibrium_lambda(mu, sigma, config.equilibrium_tol);
  };

  double root = 0.0;
  bool root_found = false;
  // a converged previous record usually brackets the new root tightly
  if (warm_start && warm_start->converged && warm_start->lambda < 0.0) {
    const double lo = std::max(config.lambda_min, warm_start->lambda * 4.0);
    const double hi = std::min(config.lambda_max, warm_start->lambda * 0.25);
    if (lo < hi && (residual(lo) < 0.0) != (residual(hi) < 0.0)) {
      root = bisect_root(residual, lo, hi, config.lambda_tol);
      root_found = true;
    }
  }
  if (!root_found) {
    const double flo = residual(config.lambda_min);
    const double fhi = residual(config.lambda_max);
    if ((flo < 0.0) != (fhi < 0.0)) {
      root = bisect_root(residual, config.lambda_min, config.lambda_max, config.lambda_tol);
      root_found = true;
    } else {
      // no sign change: squared residual by the simplex method
      const auto squared = [&](const std::vector<double>& x) {
        const double lambda = std::clamp(x[0], config.lambda_min, config.lambda_max);
        const double h = residual(lambda);
        return h * h;
      };
      const NelderMeadResult fallback =
          nelder_mead(squared, {std::clamp(-1.0, config.lambda_min, config.lambda_max)}, {0.5},
                      config.simplex);
      root = std::clamp(fallback.x[0], config.lambda_min, config.lambda_max);
      root_found = fallback.converged && fallback.value < config.lambda_tol * config.lambda_tol;
    }
  }

  boundary_hit = false;
  const MleResult final_inner = mle_mu_sigma(snapshot, root, config, inner_warm);
  record.lambda = root;
  record.mu = clamp_unit(final_inner.mu);
  record.sigma = final_inner.sigma;
  record.loglik = final_inner.loglik;
  if (final_inner.mu <= 0.0 || final_inner.mu >= 1.0) boundary_hit = true;
  if (final_inner.sigma >= 0.999 * std::min(record.mu, 1.0 - record.mu)) boundary_hit = true;
  record.boundary = boundary_hit;
  record.converged = root_found && final_inner.converged && !boundary_hit;
  return record;
}

std::vector<EstimateRecord> estimate_series(const std::vector<VolumeSnapshot>& snapshots,
                                            double volume_step, const SolverConfig& config,
                                            int threads) {
  const std::vector<OperationalCheckpoint> checkpoints =
      operational_series(snapshots, volume_step);
  std::vector<EstimateRecord> records(checkpoints.size());

  const auto solve_one = [&](std::size_t k, const EstimateRecord* warm) {
    const VolumeSnapshot& snap = snapshots[checkpoints[k].snapshot_index];
    try {
      records[k] = fixed_point_estimate(snap, config, warm);
    } catch (const std::exception&) {
      records[k] = EstimateRecord{};
      records[k].time = snap.time;
      records[k].volume = snap.total_votes();
      records[k].boundary = true;
    }
    records[k].volume = checkpoints[k].volume;
  };

  if (threads <= 1) {
    const EstimateRecord* warm = nullptr;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      solve_one(k, warm);
      warm = &records[k];
    }
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (checkpoints.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(checkpoints.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        for (std::size_t k = begin; k < end; ++k) solve_one(k, nullptr);
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return records;
}

}  // namespace pmkt
