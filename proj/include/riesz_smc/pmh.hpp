// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_PMH_HPP
#define RIESZ_SMC_PMH_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "riesz_smc/filter.hpp"

namespace riesz_smc {

// ---------------------------------------------------------------------------
// Pseudo-marginal Metropolis-Hastings over model parameters. The likelihood
// of each proposed parameter vector is estimated by one particle-filter run
// with a fresh seed derived from (master seed, iteration); the estimate kept
// for the current state is never refreshed.
// ---------------------------------------------------------------------------

struct PmhConfig {
  int iterations = 5000;
  int burn_in = -1;  // -1 = 20% of iterations
  std::vector<double> step_sizes;  // per-parameter random-walk sd
  FilterConfig filter;             // filter.seed is overridden per iteration
  std::vector<double> init_params;
  uint64_t seed = 0;

  int effective_burn_in() const;
  void validate() const;
};

struct PmhTrace {
  int iterations = 0;
  int dim = 0;
  std::vector<double> params;    // iterations x dim
  std::vector<double> logliks;   // per iteration (copied on rejection)
  std::vector<uint8_t> accepted;

  double param(int k, int j) const { return params[static_cast<size_t>(k) * dim + j]; }
  std::vector<double> param_series(int j, int from = 0) const;
};

// Symmetric Gaussian random walk: theta'_j = theta_j + h_j * z_j.
std::vector<double> propose_params(std::span<const double> theta,
                                   std::span<const double> step_sizes, Rng& rng);

// min(0, (ll_new + lp_new) - (ll_old + lp_old)); -inf when the proposal
// leaves the prior support.
double acceptance_log_ratio(double loglik_new, double logprior_new, double loglik_old,
                            double logprior_old);

// Likelihood estimator hook; the default runs the particle filter configured
// in PmhConfig. An exact likelihood can be substituted for oracle checks.
using LoglikEstimator =
    std::function<double(const HmmModel& model, std::span<const double> obs, uint64_t seed)>;

PmhTrace run_chain(const HmmModel& model, std::span<const double> obs, const PmhConfig& cfg);
PmhTrace run_chain(const HmmModel& model, std::span<const double> obs, const PmhConfig& cfg,
                   const LoglikEstimator& estimator);

// acf[0] = 1; acf[l] = sum_k (s_k - mean)(s_{k+l} - mean) / ((K - l) * var),
// var the biased sample variance. Throws undefined-acf for constant series.
std::vector<double> acf(std::span<const double> series, int max_lag);

struct PosteriorSummary {
  std::vector<double> mean;
  std::vector<double> variance;  // sample variance (n - 1)
  double acceptance_rate = 0.0;
};

PosteriorSummary posterior_summary(const PmhTrace& trace, int burn_in);

}  // namespace riesz_smc

#endif  // RIESZ_SMC_PMH_HPP
