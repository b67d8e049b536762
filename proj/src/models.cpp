// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/models.hpp"

#include <cmath>
#include <string>

namespace riesz_smc {

namespace {
constexpr uint64_t kTagStateNoise = 0x51;
constexpr uint64_t kTagObsNoise = 0x0b;
constexpr uint64_t kTagInitNoise = 0x17;
}  // namespace

void LgssParams::validate() const {
  if (!(std::abs(phi) < 1.0)) throw Error(ErrorKind::invalid_input, "LGSS requires |phi| < 1");
  if (!(sigma_v > 0.0)) throw Error(ErrorKind::invalid_input, "LGSS requires sigma_v > 0");
  if (!(sigma_o > 0.0)) throw Error(ErrorKind::invalid_input, "LGSS requires sigma_o > 0");
}

void SvParams::validate() const {
  if (!(std::abs(persistence) < 1.0)) throw Error(ErrorKind::invalid_input, "SV requires |persistence| < 1");
  if (!(sigma_v > 0.0)) throw Error(ErrorKind::invalid_input, "SV requires sigma_v > 0");
  if (!(tau > 0.0)) throw Error(ErrorKind::invalid_input, "SV requires tau > 0");
  if (!std::isfinite(mu)) throw Error(ErrorKind::invalid_input, "SV requires finite mu");
}

SimRecord lgss_simulate(int T, const LgssParams& p, double x0, uint64_t seed) {
  if (T < 1) throw Error(ErrorKind::invalid_input, "lgss_simulate requires T >= 1");
  p.validate();
  Rng state_rng(mix_seed(seed, kTagStateNoise));
  Rng obs_rng(mix_seed(seed, kTagObsNoise));
  SimRecord rec;
  rec.states.resize(static_cast<size_t>(T));
  rec.obs.resize(static_cast<size_t>(T));
  double x = x0;
  for (int t = 0; t < T; ++t) {
    x = p.phi * x + p.sigma_v * state_rng.normal();
    rec.states[static_cast<size_t>(t)] = x;
    rec.obs[static_cast<size_t>(t)] = x + p.sigma_o * obs_rng.normal();
  }
  return rec;
}

Gaussian lgss_optimal_proposal(double x_prev, double y, const LgssParams& p) {
  p.validate();
  double prec = 1.0 / (p.sigma_v * p.sigma_v) + 1.0 / (p.sigma_o * p.sigma_o);
  double var = 1.0 / prec;
  double mean = var * (y / (p.sigma_o * p.sigma_o) + p.phi * x_prev / (p.sigma_v * p.sigma_v));
  return {mean, std::sqrt(var)};
}

KalmanResult kalman_filter(std::span<const double> obs, const LgssParams& p,
                           double x0_mean, double x0_var) {
  if (obs.empty()) throw Error(ErrorKind::invalid_input, "kalman_filter requires T >= 1");
  if (x0_var < 0.0) throw Error(ErrorKind::invalid_input, "x0_var must be >= 0");
  p.validate();
  KalmanResult out;
  out.filtered_means.resize(obs.size());
  out.filtered_vars.resize(obs.size());
  double m = x0_mean;
  double v = x0_var;
  for (size_t t = 0; t < obs.size(); ++t) {
    double pred_m = p.phi * m;
    double pred_v = p.phi * p.phi * v + p.sigma_v * p.sigma_v;
    double s = pred_v + p.sigma_o * p.sigma_o;
    if (!(s > 0.0)) throw Error(ErrorKind::internal_consistency, "non-positive innovation variance");
    out.loglik += normal_logpdf(obs[t], pred_m, std::sqrt(s));
    double gain = pred_v / s;
    m = pred_m + gain * (obs[t] - pred_m);
    v = (1.0 - gain) * pred_v;
    out.filtered_means[t] = m;
    out.filtered_vars[t] = v;
  }
  return out;
}

double kalman_loglik(std::span<const double> obs, const LgssParams& p,
                     double x0_mean, double x0_var) {
  return kalman_filter(obs, p, x0_mean, x0_var).loglik;
}

SimRecord sv_simulate(int T, const SvParams& p, uint64_t seed) {
  if (T < 1) throw Error(ErrorKind::invalid_input, "sv_simulate requires T >= 1");
  p.validate();
  Rng init_rng(mix_seed(seed, kTagInitNoise));
  Rng state_rng(mix_seed(seed, kTagStateNoise));
  Rng obs_rng(mix_seed(seed, kTagObsNoise));
  SimRecord rec;
  rec.states.resize(static_cast<size_t>(T));
  rec.obs.resize(static_cast<size_t>(T));
  double stationary_sd = p.sigma_v / std::sqrt(1.0 - p.persistence * p.persistence);
  double x = p.mu + stationary_sd * init_rng.normal();
  for (int t = 0; t < T; ++t) {
    x = p.mu + p.persistence * (x - p.mu) + p.sigma_v * state_rng.normal();
    rec.states[static_cast<size_t>(t)] = x;
    rec.obs[static_cast<size_t>(t)] = std::sqrt(std::exp(x) * p.tau) * obs_rng.normal();
  }
  return rec;
}

std::vector<double> log_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw Error(ErrorKind::invalid_input, "log_returns needs at least two prices");
  std::vector<double> out(prices.size() - 1);
  for (size_t t = 0; t < prices.size(); ++t) {
    if (!(prices[t] > 0.0) || !std::isfinite(prices[t])) {
      throw Error(ErrorKind::invalid_data, "non-positive price at row " + std::to_string(t));
    }
  }
  for (size_t t = 1; t < prices.size(); ++t) out[t - 1] = std::log(prices[t] / prices[t - 1]);
  return out;
}

// ---------------------------------------------------------------------------
// LgssModel
// ---------------------------------------------------------------------------

LgssModel::LgssModel(LgssParams p, double x0, PriorSpec phi_prior)
    : p_(p), x0_(x0), phi_prior_(phi_prior) {
  p_.validate();
  if (!std::isfinite(x0)) throw Error(ErrorKind::invalid_input, "x0 must be finite");
}

Gaussian LgssModel::init_gaussian() const { return transition_gaussian(x0_); }

Gaussian LgssModel::transition_gaussian(double prev) const {
  return {p_.phi * prev, p_.sigma_v};
}

double LgssModel::obs_logpdf(double y, double state) const {
  return normal_logpdf(y, state, p_.sigma_o);
}

std::optional<Gaussian> LgssModel::optimal_proposal(double prev, double y) const {
  return lgss_optimal_proposal(prev, y, p_);
}

std::optional<Gaussian> LgssModel::optimal_init_proposal(double y) const {
  return lgss_optimal_proposal(x0_, y, p_);
}

double LgssModel::prior_logpdf(std::span<const double> params) const {
  if (params.size() != 1) throw Error(ErrorKind::invalid_input, "LGSS parameter vector is {phi}");
  return phi_prior_.logpdf(params[0]);
}

std::vector<double> LgssModel::params() const { return {p_.phi}; }

std::unique_ptr<HmmModel> LgssModel::with_params(std::span<const double> params) const {
  if (params.size() != 1) throw Error(ErrorKind::invalid_input, "LGSS parameter vector is {phi}");
  LgssParams q = p_;
  q.phi = params[0];
  return std::make_unique<LgssModel>(q, x0_, phi_prior_);
}

// ---------------------------------------------------------------------------
// SvModel
// ---------------------------------------------------------------------------

SvModel::SvModel(SvParams p, PriorSpec mu_prior, PriorSpec persistence_prior,
                 PriorSpec sigma_v_prior)
    : p_(p), mu_prior_(mu_prior), persistence_prior_(persistence_prior),
      sigma_v_prior_(sigma_v_prior) {
  p_.validate();
}

Gaussian SvModel::init_gaussian() const {
  double sd = p_.sigma_v / std::sqrt(1.0 - p_.persistence * p_.persistence);
  return {p_.mu, sd};
}

Gaussian SvModel::transition_gaussian(double prev) const {
  return {p_.mu + p_.persistence * (prev - p_.mu), p_.sigma_v};
}

double SvModel::obs_logpdf(double y, double state) const {
  return normal_logpdf(y, 0.0, std::sqrt(std::exp(state) * p_.tau));
}

std::optional<Gaussian> SvModel::optimal_proposal(double, double) const { return std::nullopt; }
std::optional<Gaussian> SvModel::optimal_init_proposal(double) const { return std::nullopt; }

double SvModel::prior_logpdf(std::span<const double> params) const {
  if (params.size() != 3) {
    throw Error(ErrorKind::invalid_input, "SV parameter vector is {mu, persistence, sigma_v}");
  }
  return mu_prior_.logpdf(params[0]) + persistence_prior_.logpdf(params[1]) +
         sigma_v_prior_.logpdf(params[2]);
}

std::vector<double> SvModel::params() const { return {p_.mu, p_.persistence, p_.sigma_v}; }

std::unique_ptr<HmmModel> SvModel::with_params(std::span<const double> params) const {
  if (params.size() != 3) {
    throw Error(ErrorKind::invalid_input, "SV parameter vector is {mu, persistence, sigma_v}");
  }
  SvParams q = p_;
  q.mu = params[0];
  q.persistence = params[1];
  q.sigma_v = params[2];
  return std::make_unique<SvModel>(q, mu_prior_, persistence_prior_, sigma_v_prior_);
}

}  // namespace riesz_smc
