#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pmkt/market.hpp"
#include "pmkt/optim.hpp"

namespace pmkt {

struct SolverConfig {
  NelderMeadOptions simplex{};
  // bracket and tolerance of the outer fixed-point solve on lambda
  double lambda_min = -50.0;
  double lambda_max = -1e-6;
  double lambda_tol = 1e-6;
  // tolerance of the inner equilibrium-lambda bisection
  double equilibrium_tol = 1e-10;
  // start of the location/dispersion search; nan = volume-weighted mean price
  double start_mu = std::numeric_limits<double>::quiet_NaN();
  double start_sigma = 0.05;
};

struct EstimateRecord {
  double volume = 0.0;
  std::int64_t time = 0;
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double loglik = 0.0;
  bool converged = false;
  bool boundary = false;  // location clamped to [0,1] or dispersion clamped to its guard
};

// Censored log-likelihood of the snapshot: buy votes weight the upper tail
// above the buy threshold, sell votes the lower tail below the sell threshold.
// Zero-volume terms contribute nothing; a positive-volume term with zero tail
// mass yields -inf (a valid comparison value).
double log_likelihood(const VolumeSnapshot& snapshot, double mu, double sigma, double lambda);

struct MleResult {
  double mu = 0.0;
  double sigma = 0.0;
  double loglik = 0.0;
  bool converged = false;
};

// Maximizes the likelihood over (mu, log sigma) by Nelder-Mead at fixed
// lambda. Deterministic given the config and warm start.
MleResult mle_mu_sigma(const VolumeSnapshot& snapshot, double lambda,
                       const SolverConfig& config = {},
                       std::optional<std::pair<double, double>> warm_start = std::nullopt);

// log of the equilibrium ratio at the candidate median price mu: price odds
// (1-mu)/mu times the ratio of the buy-only tail to the sell-only tail.
// Requires 0 < sigma < min(mu, 1-mu); mu = 1/2 is evaluated as the average of
// the two one-sided shifts by 1e-6.
double log_equilibrium_ratio(double lambda, double mu, double sigma);

// The unique negative root of the equilibrium ratio in lambda.
double equilibrium_lambda(double mu, double sigma, double tol = 1e-10);

// Joint estimate: the risk parameter solving lambda = equilibrium_lambda of
// the inner estimates, found by root bracketing with a simplex fallback on the
// squared residual.
EstimateRecord fixed_point_estimate(const VolumeSnapshot& snapshot,
                                    const SolverConfig& config = {},
                                    const EstimateRecord* warm_start = nullptr);

// One fixed-point estimate per operational-volume checkpoint. Sequential runs
// warm-start from the previous record; threads > 1 solves checkpoints
// independently in parallel (no warm start).
std::vector<EstimateRecord> estimate_series(const std::vector<VolumeSnapshot>& snapshots,
                                            double volume_step,
                                            const SolverConfig& config = {},
                                            int threads = 1);

}  // namespace pmkt
