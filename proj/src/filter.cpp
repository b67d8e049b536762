// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/filter.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace riesz_smc {

namespace {

constexpr uint64_t kTagProposal = 0xa1;
constexpr uint64_t kTagResample = 0xa2;
constexpr uint64_t kTagEstimate = 0xa3;

// Base set coordinates standardized to mean 0 / sd 1 (population sd), so the
// affine transport introduces no deterministic location or scale offset.
std::vector<double> standardized_base(const Configuration& set) {
  std::vector<double> z = set.coordinate(0);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(z.size());
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= static_cast<double>(z.size());
  if (!(var > 0.0)) throw Error(ErrorKind::invalid_config, "chebyshev base set has zero spread");
  double sd = std::sqrt(var);
  for (double& v : z) v = (v - mean) / sd;
  return z;
}

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cum(weights.size());
  double c = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    c += weights[i];
    cum[i] = c;
  }
  return cum;
}

int cdf_search(const std::vector<double>& cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return static_cast<int>(cum.size()) - 1;
  return static_cast<int>(it - cum.begin());
}

struct ProposedParticle {
  double state;
  double log_weight;
};

ProposedParticle propose_one(const HmmModel& model, const FilterConfig& cfg, bool first_step,
                             double prev, double y, double z, Rng& rng) {
  double x = 0.0;
  double lw = 0.0;
  switch (cfg.proposal_mode) {
    case ProposalMode::bootstrap: {
      x = first_step ? model.init_sample(rng) : model.trans_sample(prev, rng);
      lw = model.obs_logpdf(y, x);
      break;
    }
    case ProposalMode::optimal: {
      std::optional<Gaussian> q =
          first_step ? model.optimal_init_proposal(y) : model.optimal_proposal(prev, y);
      x = q->sample(rng);
      double prior_part = first_step ? model.init_logpdf(x) : model.trans_logpdf(x, prev);
      lw = prior_part + model.obs_logpdf(y, x) - q->logpdf(x);
      break;
    }
    case ProposalMode::chebyshev: {
      std::optional<Gaussian> q;
      if (cfg.chebyshev_map == ChebyshevMap::optimal) {
        q = first_step ? model.optimal_init_proposal(y) : model.optimal_proposal(prev, y);
      }
      if (!q) q = first_step ? model.init_gaussian() : model.transition_gaussian(prev);
      x = q->mean + q->sd * z;
      double prior_part = first_step ? model.init_logpdf(x) : model.trans_logpdf(x, prev);
      lw = prior_part + model.obs_logpdf(y, x) - q->logpdf(x);
      break;
    }
  }
  // A zero-density proposal point kills the particle, never the filter.
  if (std::isnan(lw) || lw == kInf) lw = -kInf;
  return {x, lw};
}

}  // namespace

void FilterConfig::validate(const HmmModel& model) const {
  if (n_particles < 2) throw Error(ErrorKind::invalid_config, "n_particles must be >= 2");
  if (!(ess_threshold > 0.0 && ess_threshold <= 1.0)) {
    throw Error(ErrorKind::invalid_config, "ess_threshold must lie in (0, 1]");
  }
  if (proposal_mode == ProposalMode::optimal && !model.optimal_init_proposal(0.0).has_value()) {
    throw Error(ErrorKind::invalid_config, "model provides no optimal proposal");
  }
  if (proposal_mode == ProposalMode::chebyshev) {
    if (cheb_set.size() < 2) {
      throw Error(ErrorKind::invalid_config, "chebyshev mode needs a base set with >= 2 points");
    }
    if (cheb_set.dim() != 1) {
      throw Error(ErrorKind::unsupported_dimension, "chebyshev base set must be one-dimensional");
    }
  }
}

std::vector<int> resample_multinomial(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw Error(ErrorKind::invalid_input, "resample of empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::contract_violation, "negative or NaN weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::contract_violation, "weights are not normalized");
  }
  std::vector<double> cum = cumulative(weights);
  std::vector<int> ancestors(weights.size());
  for (size_t i = 0; i < weights.size(); ++i) ancestors[i] = cdf_search(cum, rng.uniform01());
  return ancestors;
}

int chebyshev_index(long long i, int n_cheb) {
  if (i < 0 || n_cheb < 1) throw Error(ErrorKind::invalid_input, "chebyshev_index requires i >= 0, n_cheb >= 1");
  return static_cast<int>(i % n_cheb);
}

namespace detail {

PropagateResult propagate_slots(std::span<const double> prev_states,
                                std::span<const int> ancestors, double y, bool first_step,
                                const HmmModel& model, const FilterConfig& cfg, int t,
                                std::span<const int> slot_labels) {
  size_t n = slot_labels.size();
  if (ancestors.size() != n) throw Error(ErrorKind::invalid_input, "ancestor/slot size mismatch");
  std::vector<double> z;
  if (cfg.proposal_mode == ProposalMode::chebyshev) z = standardized_base(cfg.cheb_set);
  PropagateResult out;
  out.states.resize(n);
  out.log_weights.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int label = slot_labels[i];
    double prev = 0.0;
    if (!first_step) {
      int a = ancestors[i];
      if (a < 0 || static_cast<size_t>(a) >= prev_states.size()) {
        throw Error(ErrorKind::invalid_input, "ancestor index out of range");
      }
      prev = prev_states[static_cast<size_t>(a)];
    }
    double zi = z.empty() ? 0.0 : z[static_cast<size_t>(
                                      chebyshev_index(label, static_cast<int>(z.size())))];
    Rng rng(mix_seed(cfg.seed, static_cast<uint64_t>(t), static_cast<uint64_t>(label), kTagProposal));
    ProposedParticle pp = propose_one(model, cfg, first_step, prev, y, zi, rng);
    out.states[i] = pp.state;
    out.log_weights[i] = pp.log_weight;
  }
  return out;
}

}  // namespace detail

PropagateResult propagate(std::span<const double> prev_states, std::span<const int> ancestors,
                          double y, const HmmModel& model, const FilterConfig& cfg, Rng& rng) {
  cfg.validate(model);
  if (prev_states.size() != ancestors.size() ||
      prev_states.size() != static_cast<size_t>(cfg.n_particles)) {
    throw Error(ErrorKind::invalid_input, "propagate expects N states and N ancestors");
  }
  if (!std::isfinite(y)) throw Error(ErrorKind::invalid_input, "observation must be finite");
  std::vector<double> z;
  if (cfg.proposal_mode == ProposalMode::chebyshev) z = standardized_base(cfg.cheb_set);
  PropagateResult out;
  out.states.resize(prev_states.size());
  out.log_weights.resize(prev_states.size());
  for (size_t i = 0; i < prev_states.size(); ++i) {
    int a = ancestors[i];
    if (a < 0 || static_cast<size_t>(a) >= prev_states.size()) {
      throw Error(ErrorKind::invalid_input, "ancestor index out of range");
    }
    double zi = z.empty() ? 0.0 : z[static_cast<size_t>(chebyshev_index(
                                      static_cast<long long>(i), static_cast<int>(z.size())))];
    ProposedParticle pp =
        propose_one(model, cfg, /*first_step=*/false, prev_states[static_cast<size_t>(a)], y, zi, rng);
    out.states[i] = pp.state;
    out.log_weights[i] = pp.log_weight;
  }
  return out;
}

FilterResult filter_run(const HmmModel& model, std::span<const double> obs,
                        const FilterConfig& cfg) {
  cfg.validate(model);
  if (obs.empty()) throw Error(ErrorKind::invalid_input, "filter_run requires T >= 1");
  int T = static_cast<int>(obs.size());
  int N = cfg.n_particles;

  std::vector<int> identity(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) identity[static_cast<size_t>(i)] = i;

  FilterResult result;
  result.state_means.resize(static_cast<size_t>(T));
  result.ess.resize(static_cast<size_t>(T));
  result.system.T = T;
  result.system.N = N;
  result.system.particles.resize(static_cast<size_t>(T) * N);
  result.system.weights.resize(static_cast<size_t>(T) * N);
  result.system.ancestors.resize(static_cast<size_t>(T) * N);
  result.system.loglik_increments.resize(static_cast<size_t>(T));

  std::vector<double> states;
  std::vector<double> log_norm_weights;  // normalized log weights of the current set
  std::vector<double> norm_weights(static_cast<size_t>(N));

  for (int t = 0; t < T; ++t) {
    double y = obs[static_cast<size_t>(t)];
    if (!std::isfinite(y)) {
      throw Error(ErrorKind::invalid_input, "observation at t=" + std::to_string(t) + " is not finite");
    }

    std::vector<int> ancestors = identity;
    std::vector<double> carry(static_cast<size_t>(N), -std::log(static_cast<double>(N)));
    if (t > 0) {
      double ess_prev = 0.0;
      for (double w : norm_weights) ess_prev += w * w;
      ess_prev = 1.0 / ess_prev;
      bool resample = !cfg.adaptive_resampling || ess_prev < cfg.ess_threshold * N;
      if (resample) {
        std::vector<double> cum = cumulative(norm_weights);
        for (int i = 0; i < N; ++i) {
          Rng rng(mix_seed(cfg.seed, static_cast<uint64_t>(t), static_cast<uint64_t>(i), kTagResample));
          ancestors[static_cast<size_t>(i)] = cdf_search(cum, rng.uniform01());
        }
      } else {
        carry = log_norm_weights;
      }
    }

    PropagateResult step = detail::propagate_slots(states, ancestors, y, /*first_step=*/t == 0,
                                                   model, cfg, t, identity);

    std::vector<double> total(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      total[static_cast<size_t>(i)] = carry[static_cast<size_t>(i)] + step.log_weights[static_cast<size_t>(i)];
    }
    double incr = logsumexp_sorted(total);
    if (incr == -kInf || std::isnan(incr)) {
      throw Error(ErrorKind::filter_degeneracy,
                  "all particle weights vanished at t=" + std::to_string(t));
    }

    log_norm_weights.assign(total.begin(), total.end());
    double wsq = 0.0;
    for (int i = 0; i < N; ++i) {
      log_norm_weights[static_cast<size_t>(i)] -= incr;
      norm_weights[static_cast<size_t>(i)] = std::exp(log_norm_weights[static_cast<size_t>(i)]);
      wsq += norm_weights[static_cast<size_t>(i)] * norm_weights[static_cast<size_t>(i)];
    }
    states = std::move(step.states);

    // Plain mean of a multinomial resampling of the weighted particles: the
    // estimate carried by the (resampled) particle set itself.
    std::vector<double> cum = cumulative(norm_weights);
    double mean = 0.0;
    for (int i = 0; i < N; ++i) {
      Rng rng(mix_seed(cfg.seed, static_cast<uint64_t>(t), static_cast<uint64_t>(i), kTagEstimate));
      mean += states[static_cast<size_t>(cdf_search(cum, rng.uniform01()))];
    }
    result.state_means[static_cast<size_t>(t)] = mean / N;
    result.ess[static_cast<size_t>(t)] = 1.0 / wsq;
    result.system.loglik_increments[static_cast<size_t>(t)] = incr;
    result.loglik += incr;
    for (int i = 0; i < N; ++i) {
      size_t idx = static_cast<size_t>(t) * N + i;
      result.system.particles[idx] = states[static_cast<size_t>(i)];
      result.system.weights[idx] = norm_weights[static_cast<size_t>(i)];
      result.system.ancestors[idx] = ancestors[static_cast<size_t>(i)];
    }
  }
  return result;
}

FilterMetrics filtering_metrics(std::span<const double> state_means,
                                std::span<const double> reference_states) {
  if (state_means.size() != reference_states.size() || state_means.empty()) {
    throw Error(ErrorKind::invalid_input, "filtering_metrics needs equal-length non-empty series");
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (size_t t = 0; t < state_means.size(); ++t) {
    double e = state_means[t] - reference_states[t];
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  double n = static_cast<double>(state_means.size());
  constexpr double kLogFloor = -745.0;
  double log_bias = abs_sum > 0.0 ? std::log(abs_sum / n) : kLogFloor;
  double log_mse = sq_sum > 0.0 ? std::log(sq_sum / n) : kLogFloor;
  return {log_bias, log_mse};
}

}  // namespace riesz_smc
