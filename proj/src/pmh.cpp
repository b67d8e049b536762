// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/pmh.hpp"

#include <cmath>
#include <string>

namespace riesz_smc {

namespace {
constexpr uint64_t kTagChain = 0xc4;
constexpr uint64_t kTagFilterSeed = 0xf1;
}  // namespace

int PmhConfig::effective_burn_in() const {
  return burn_in >= 0 ? burn_in : iterations / 5;
}

void PmhConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::invalid_config, "iterations must be >= 1");
  if (effective_burn_in() >= iterations) {
    throw Error(ErrorKind::invalid_config, "burn_in must be < iterations");
  }
  if (step_sizes.empty()) throw Error(ErrorKind::invalid_config, "step_sizes must be non-empty");
  for (double h : step_sizes) {
    if (!(h > 0.0)) throw Error(ErrorKind::invalid_config, "step sizes must be > 0");
  }
  if (init_params.size() != step_sizes.size()) {
    throw Error(ErrorKind::invalid_config, "init_params and step_sizes must have equal length");
  }
}

std::vector<double> PmhTrace::param_series(int j, int from) const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(iterations - from));
  for (int k = from; k < iterations; ++k) out.push_back(param(k, j));
  return out;
}

std::vector<double> propose_params(std::span<const double> theta,
                                   std::span<const double> step_sizes, Rng& rng) {
  if (theta.size() != step_sizes.size()) {
    throw Error(ErrorKind::invalid_input, "theta and step_sizes must have equal length");
  }
  std::vector<double> out(theta.size());
  for (size_t j = 0; j < theta.size(); ++j) out[j] = theta[j] + step_sizes[j] * rng.normal();
  return out;
}

double acceptance_log_ratio(double loglik_new, double logprior_new, double loglik_old,
                            double logprior_old) {
  double new_total = loglik_new + logprior_new;
  if (std::isnan(new_total) || new_total == -kInf) return -kInf;
  double ratio = new_total - (loglik_old + logprior_old);
  return std::min(0.0, ratio);
}

PmhTrace run_chain(const HmmModel& model, std::span<const double> obs, const PmhConfig& cfg) {
  LoglikEstimator filter_estimator = [&cfg](const HmmModel& m, std::span<const double> y,
                                            uint64_t seed) {
    FilterConfig fc = cfg.filter;
    fc.seed = seed;
    return filter_run(m, y, fc).loglik;
  };
  return run_chain(model, obs, cfg, filter_estimator);
}

PmhTrace run_chain(const HmmModel& model, std::span<const double> obs, const PmhConfig& cfg,
                   const LoglikEstimator& estimator) {
  cfg.validate();
  if (static_cast<int>(cfg.init_params.size()) != model.params_dim()) {
    throw Error(ErrorKind::invalid_config, "init_params does not match the model's parameter count");
  }
  int dim = model.params_dim();

  std::vector<double> theta = cfg.init_params;
  double logprior = model.prior_logpdf(theta);
  if (logprior == -kInf) {
    throw Error(ErrorKind::invalid_config, "initial parameters violate the prior support");
  }

  auto estimate = [&](std::span<const double> params, uint64_t iter) -> double {
    if (obs.empty()) return 0.0;  // prior-only target
    std::unique_ptr<HmmModel> m = model.with_params(params);
    try {
      return estimator(*m, obs, mix_seed(cfg.seed, kTagFilterSeed, iter));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::filter_degeneracy) return -kInf;
      throw;
    }
  };

  double loglik = estimate(theta, 0);

  PmhTrace trace;
  trace.iterations = cfg.iterations;
  trace.dim = dim;
  trace.params.resize(static_cast<size_t>(cfg.iterations) * dim);
  trace.logliks.resize(static_cast<size_t>(cfg.iterations));
  trace.accepted.resize(static_cast<size_t>(cfg.iterations));

  auto record = [&](int k, bool acc) {
    for (int j = 0; j < dim; ++j) trace.params[static_cast<size_t>(k) * dim + j] = theta[static_cast<size_t>(j)];
    trace.logliks[static_cast<size_t>(k)] = loglik;
    trace.accepted[static_cast<size_t>(k)] = acc ? 1 : 0;
  };
  record(0, true);

  Rng chain_rng(mix_seed(cfg.seed, kTagChain));
  for (int k = 1; k < cfg.iterations; ++k) {
    std::vector<double> proposal = propose_params(theta, cfg.step_sizes, chain_rng);
    double logprior_new = model.prior_logpdf(proposal);
    double loglik_new = -kInf;
    if (logprior_new > -kInf) loglik_new = estimate(proposal, static_cast<uint64_t>(k));
    double ratio = acceptance_log_ratio(loglik_new, logprior_new, loglik, logprior);
    double u = chain_rng.uniform01();
    bool accept = std::log(u) < ratio;
    if (accept) {
      theta = std::move(proposal);
      logprior = logprior_new;
      loglik = loglik_new;
    }
    record(k, accept);
  }
  return trace;
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
  if (max_lag < 1) throw Error(ErrorKind::invalid_input, "max_lag must be >= 1");
  int K = static_cast<int>(series.size());
  if (K <= max_lag) throw Error(ErrorKind::invalid_input, "series must be longer than max_lag");
  double mean = 0.0;
  for (double s : series) mean += s;
  mean /= K;
  double var = 0.0;
  for (double s : series) var += (s - mean) * (s - mean);
  var /= K;
  if (!(var > 0.0)) throw Error(ErrorKind::undefined_acf, "series has zero variance");
  std::vector<double> out(static_cast<size_t>(max_lag) + 1);
  out[0] = 1.0;
  for (int l = 1; l <= max_lag; ++l) {
    double c = 0.0;
    for (int k = 0; k + l < K; ++k) c += (series[static_cast<size_t>(k)] - mean) * (series[static_cast<size_t>(k + l)] - mean);
    out[static_cast<size_t>(l)] = c / ((K - l) * var);
  }
  return out;
}

PosteriorSummary posterior_summary(const PmhTrace& trace, int burn_in) {
  if (burn_in < 0 || trace.iterations - burn_in < 2) {
    throw Error(ErrorKind::invalid_input, "posterior_summary needs at least two post-burn-in samples");
  }
  int n = trace.iterations - burn_in;
  PosteriorSummary out;
  out.mean.assign(static_cast<size_t>(trace.dim), 0.0);
  out.variance.assign(static_cast<size_t>(trace.dim), 0.0);
  int accepted = 0;
  for (int k = burn_in; k < trace.iterations; ++k) {
    if (trace.accepted[static_cast<size_t>(k)]) ++accepted;
    for (int j = 0; j < trace.dim; ++j) out.mean[static_cast<size_t>(j)] += trace.param(k, j);
  }
  for (int j = 0; j < trace.dim; ++j) out.mean[static_cast<size_t>(j)] /= n;
  for (int k = burn_in; k < trace.iterations; ++k) {
    for (int j = 0; j < trace.dim; ++j) {
      double d = trace.param(k, j) - out.mean[static_cast<size_t>(j)];
      out.variance[static_cast<size_t>(j)] += d * d;
    }
  }
  for (int j = 0; j < trace.dim; ++j) out.variance[static_cast<size_t>(j)] /= (n - 1);
  out.acceptance_rate = static_cast<double>(accepted) / n;
  return out;
}

}  // namespace riesz_smc
