// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_MODELS_HPP
#define RIESZ_SMC_MODELS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "riesz_smc/common.hpp"

namespace riesz_smc {

// ---------------------------------------------------------------------------
// Scalar state-space models: a linear Gaussian model (LGSS) and a stochastic
// volatility model (SV), plus an exact Kalman oracle for the LGSS likelihood.
// ---------------------------------------------------------------------------

struct LgssParams {
  double phi = 0.75;     // state persistence, |phi| < 1
  double sigma_v = 1.0;  // state noise sd
  double sigma_o = 0.1;  // observation noise sd
  void validate() const;
};

struct SvParams {
  double mu = 0.0;           // mean log-volatility
  double persistence = 0.95; // AR(1) coefficient of log-volatility, |.| < 1
  double sigma_v = 0.2;      // log-volatility noise sd
  double tau = 1.0;          // instantaneous volatility scale (fixed)
  void validate() const;
};

struct SimRecord {
  std::vector<double> states;
  std::vector<double> obs;
};

// x_t = phi x_{t-1} + N(0, sigma_v^2), y_t = x_t + N(0, sigma_o^2), t = 1..T,
// from the deterministic start x0. State and observation noise come from
// independent substreams of the seed.
SimRecord lgss_simulate(int T, const LgssParams& p, double x0, uint64_t seed);

// Locally optimal proposal N(mean, sd) for x_t given (x_prev, y):
// sd^-2 = sigma_v^-2 + sigma_o^-2, mean = sd^2 (sigma_o^-2 y + sigma_v^-2 phi x_prev).
Gaussian lgss_optimal_proposal(double x_prev, double y, const LgssParams& p);

struct KalmanResult {
  std::vector<double> filtered_means;
  std::vector<double> filtered_vars;
  double loglik = 0.0;
};

// Exact Gaussian filter via the predict/update recursion; x0_mean/x0_var
// describe the pre-observation state at t = 0 (variance 0 = known start).
KalmanResult kalman_filter(std::span<const double> obs, const LgssParams& p,
                           double x0_mean, double x0_var);
double kalman_loglik(std::span<const double> obs, const LgssParams& p,
                     double x0_mean, double x0_var);

// x_1 ~ transition from x_0 ~ N(mu, sigma_v^2/(1-rho^2));
// y_t ~ N(0, exp(x_t) * tau).
SimRecord sv_simulate(int T, const SvParams& p, uint64_t seed);

// y_t = log(p_t / p_{t-1}); throws invalid-data naming the offending row for
// non-positive prices.
std::vector<double> log_returns(std::span<const double> prices);

// ---------------------------------------------------------------------------
// Model contract used by the particle filter and the parameter sampler.
// Both concrete models have Gaussian initial and transition kernels, which
// the proposal machinery relies on (affine transport of a fixed point set).
// ---------------------------------------------------------------------------

struct PriorSpec {
  double mean = 0.0;
  double sd = 1.0;
  double lo = -kInf;
  double hi = kInf;
  double logpdf(double x) const { return truncnormal_logpdf(x, mean, sd, lo, hi); }
};

class HmmModel {
 public:
  virtual ~HmmModel() = default;

  double init_sample(Rng& rng) const { return init_gaussian().sample(rng); }
  double init_logpdf(double x) const { return init_gaussian().logpdf(x); }
  double trans_sample(double prev, Rng& rng) const { return transition_gaussian(prev).sample(rng); }
  double trans_logpdf(double next, double prev) const { return transition_gaussian(prev).logpdf(next); }

  virtual Gaussian init_gaussian() const = 0;
  virtual Gaussian transition_gaussian(double prev) const = 0;
  virtual double obs_logpdf(double y, double state) const = 0;

  // Observation-informed proposals; nullopt when no closed form exists.
  virtual std::optional<Gaussian> optimal_proposal(double prev, double y) const = 0;
  virtual std::optional<Gaussian> optimal_init_proposal(double y) const = 0;

  virtual double prior_logpdf(std::span<const double> params) const = 0;
  virtual int params_dim() const = 0;
  virtual std::vector<double> params() const = 0;
  // Rebind to a new parameter vector (must be inside the prior support).
  virtual std::unique_ptr<HmmModel> with_params(std::span<const double> params) const = 0;
};

// LGSS with deterministic start x0; only phi is treated as unknown.
class LgssModel final : public HmmModel {
 public:
  explicit LgssModel(LgssParams p, double x0 = 0.0,
                     PriorSpec phi_prior = PriorSpec{0.75, 0.5, -1.0, 1.0});

  Gaussian init_gaussian() const override;
  Gaussian transition_gaussian(double prev) const override;
  double obs_logpdf(double y, double state) const override;
  std::optional<Gaussian> optimal_proposal(double prev, double y) const override;
  std::optional<Gaussian> optimal_init_proposal(double y) const override;
  double prior_logpdf(std::span<const double> params) const override;
  int params_dim() const override { return 1; }
  std::vector<double> params() const override;
  std::unique_ptr<HmmModel> with_params(std::span<const double> params) const override;

  const LgssParams& model_params() const { return p_; }
  double x0() const { return x0_; }

 private:
  LgssParams p_;
  double x0_;
  PriorSpec phi_prior_;
};

// SV with unknown (mu, persistence, sigma_v); tau stays fixed.
class SvModel final : public HmmModel {
 public:
  explicit SvModel(SvParams p,
                   PriorSpec mu_prior = PriorSpec{0.0, 1.0, -kInf, kInf},
                   PriorSpec persistence_prior = PriorSpec{0.95, 0.05, -1.0, 1.0},
                   PriorSpec sigma_v_prior = PriorSpec{0.2, 0.03, 0.0, kInf});

  Gaussian init_gaussian() const override;
  Gaussian transition_gaussian(double prev) const override;
  double obs_logpdf(double y, double state) const override;
  std::optional<Gaussian> optimal_proposal(double prev, double y) const override;
  std::optional<Gaussian> optimal_init_proposal(double y) const override;
  double prior_logpdf(std::span<const double> params) const override;
  int params_dim() const override { return 3; }
  std::vector<double> params() const override;
  std::unique_ptr<HmmModel> with_params(std::span<const double> params) const override;

  const SvParams& model_params() const { return p_; }

 private:
  SvParams p_;
  PriorSpec mu_prior_, persistence_prior_, sigma_v_prior_;
};

}  // namespace riesz_smc

#endif  // RIESZ_SMC_MODELS_HPP
