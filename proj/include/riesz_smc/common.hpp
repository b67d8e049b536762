// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_COMMON_HPP
#define RIESZ_SMC_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace riesz_smc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kTwoPi = 6.2831853071795864769;
inline constexpr double kLogTwoPi = 1.8378770664093454836;

enum class ErrorKind {
  invalid_input,
  invalid_config,
  singular_kernel,
  insufficient_points,
  degenerate_density,
  degenerate_pool,
  unsupported_dimension,
  contract_violation,
  filter_degeneracy,
  invalid_data,
  undefined_acf,
  internal_consistency,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Random numbers.
//
// A splitmix64 stream. Cheap to seed, which lets every particle slot, time
// step and replication own an independent substream derived from a master
// seed. Output is identical across platforms for a fixed seed (the normal
// variate goes through libm, so bit-level identity is per-platform).
// ---------------------------------------------------------------------------

inline uint64_t splitmix_finalize(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  return splitmix_finalize(a * 0x9e3779b97f4a7c15ull ^ (b + 0x632be59bd9b4e019ull));
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  return mix_seed(mix_seed(a, b, c), d);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return splitmix_finalize(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; consumes exactly two uniforms per call (no cached spare, so
  // substream alignment is position-independent).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(kTwoPi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  uint64_t state_;
};

// ---------------------------------------------------------------------------
// Scalar Gaussian helpers.
// ---------------------------------------------------------------------------

double normal_logpdf(double x, double mean, double sd);
double normal_cdf(double x);

// Truncated normal log density on (lo, hi); -inf outside the support.
double truncnormal_logpdf(double x, double mean, double sd, double lo, double hi);

struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
  double logpdf(double x) const { return normal_logpdf(x, mean, sd); }
  double sample(Rng& rng) const { return mean + sd * rng.normal(); }
};

// ---------------------------------------------------------------------------
// log-sum-exp.
// ---------------------------------------------------------------------------

// Accumulates in the given order. All -inf yields -inf; any +inf yields +inf.
double logsumexp(std::span<const double> values);

// Sorts (descending) before accumulating, so the result is bit-identical
// under any permutation of the inputs.
double logsumexp_sorted(std::vector<double> values);

// ---------------------------------------------------------------------------
// Worker pool. RIESZ_SMC_THREADS caps concurrency (0 = sequential; unset =
// hardware concurrency). Items are independent; any exception is rethrown
// after all workers join.
// ---------------------------------------------------------------------------

int env_thread_cap();
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace riesz_smc

#endif  // RIESZ_SMC_COMMON_HPP
