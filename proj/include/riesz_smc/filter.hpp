// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_FILTER_HPP
#define RIESZ_SMC_FILTER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "riesz_smc/energy.hpp"
#include "riesz_smc/models.hpp"

namespace riesz_smc {

// ---------------------------------------------------------------------------
// Particle filter with three proposal modes:
//   bootstrap  - propose from the transition, weight by the observation.
//   optimal    - propose from the model's closed-form optimal proposal,
//                weight by transition * observation / proposal.
//   chebyshev  - deterministic proposal support: a precomputed point set,
//                standardized to mean 0 / sd 1, affinely transported per
//                (ancestor, t) through a model Gaussian. Particle slot i uses
//                set element i mod N'. The importance density is the
//                transporting Gaussian. chebyshev_map picks that Gaussian:
//                the optimal proposal when the model has one (fallback to
//                the transition), or always the prior transition.
//
// Randomness is organized in substreams derived from (seed, t, slot, tag) so
// per-slot draws are independent and the whole run is reproducible.
// ---------------------------------------------------------------------------

enum class ProposalMode { bootstrap, optimal, chebyshev };
enum class ChebyshevMap { optimal, prior };

struct FilterConfig {
  int n_particles = 100;
  ProposalMode proposal_mode = ProposalMode::bootstrap;
  Configuration cheb_set{1};  // base point set; required non-empty in chebyshev mode
  ChebyshevMap chebyshev_map = ChebyshevMap::optimal;
  uint64_t seed = 0;
  bool adaptive_resampling = false;  // off: resample every step
  double ess_threshold = 0.5;        // resample when ESS < threshold * N (adaptive mode)

  void validate(const HmmModel& model) const;
};

struct ParticleSystem {
  int T = 0;
  int N = 0;
  std::vector<double> particles;         // T x N proposed states
  std::vector<double> weights;           // T x N normalized weights
  std::vector<int> ancestors;            // T x N; ancestors[0] is the identity
  std::vector<double> loglik_increments; // per step

  double particle(int t, int i) const { return particles[static_cast<size_t>(t) * N + i]; }
  double weight(int t, int i) const { return weights[static_cast<size_t>(t) * N + i]; }
  int ancestor(int t, int i) const { return ancestors[static_cast<size_t>(t) * N + i]; }
  std::span<const double> weights_at(int t) const {
    return {weights.data() + static_cast<size_t>(t) * N, static_cast<size_t>(N)};
  }
  std::span<const double> particles_at(int t) const {
    return {particles.data() + static_cast<size_t>(t) * N, static_cast<size_t>(N)};
  }
};

struct FilterResult {
  // Unweighted mean of a multinomial resampling of the time-t weighted
  // particles, i.e. the mean of the particle set the filter carries forward.
  std::vector<double> state_means;
  std::vector<double> ess;  // 1 / sum(w^2) per step
  double loglik = 0.0;
  ParticleSystem system;
};

// i.i.d. categorical draws with P(a = j) = weights[j]. Throws
// contract-violation if the weights are not normalized to 1e-9.
std::vector<int> resample_multinomial(std::span<const double> weights, Rng& rng);

// Deterministic slot -> set element assignment.
int chebyshev_index(long long i, int n_cheb);

struct PropagateResult {
  std::vector<double> states;
  std::vector<double> log_weights;  // unnormalized
};

// One propagation step (t > 0) from prev_states through the given ancestors;
// draws are consumed from rng sequentially by slot. Zero proposal density at
// a proposed point yields a -inf log weight, never a throw.
PropagateResult propagate(std::span<const double> prev_states, std::span<const int> ancestors,
                          double y, const HmmModel& model, const FilterConfig& cfg, Rng& rng);

FilterResult filter_run(const HmmModel& model, std::span<const double> obs,
                        const FilterConfig& cfg);

struct FilterMetrics {
  double log_bias;  // ln((1/T) sum |means - reference|)
  double log_mse;   // ln((1/T) sum (means - reference)^2)
};

// Zero error maps to the floor -745 (the smallest representable log).
FilterMetrics filtering_metrics(std::span<const double> state_means,
                                std::span<const double> reference_states);

namespace detail {
// Per-slot-substream propagation step used inside filter_run: slot i draws
// from streams keyed by (cfg.seed, t, slot_labels[i]) and, in chebyshev mode,
// uses set element slot_labels[i] mod N'. filter_run passes identity labels;
// tests permute the labels together with the ancestors to check that slots
// are exchangeable.
PropagateResult propagate_slots(std::span<const double> prev_states,
                                std::span<const int> ancestors, double y, bool first_step,
                                const HmmModel& model, const FilterConfig& cfg, int t,
                                std::span<const int> slot_labels);
}  // namespace detail

}  // namespace riesz_smc

#endif  // RIESZ_SMC_FILTER_HPP
