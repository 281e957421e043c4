#pragma once

namespace pmkt {

// Standard normal distribution helpers. The log variants stay finite deep in
// the tails (|z| up to ~1e8) where the plain cdf/sf underflow to 0; likelihood
// code must use them.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_sf(double z);
double normal_log_cdf(double z);
double normal_log_sf(double z);

double logit(double p);
double expit(double x);

}  // namespace pmkt
