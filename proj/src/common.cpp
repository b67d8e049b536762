// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/common.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace riesz_smc {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::singular_kernel: return "singular-kernel";
    case ErrorKind::insufficient_points: return "insufficient-points";
    case ErrorKind::degenerate_density: return "degenerate-density";
    case ErrorKind::degenerate_pool: return "degenerate-pool";
    case ErrorKind::unsupported_dimension: return "unsupported-dimension";
    case ErrorKind::contract_violation: return "contract-violation";
    case ErrorKind::filter_degeneracy: return "filter-degeneracy";
    case ErrorKind::invalid_data: return "invalid-data";
    case ErrorKind::undefined_acf: return "undefined-acf";
    case ErrorKind::internal_consistency: return "internal-consistency";
  }
  return "error";
}

double normal_logpdf(double x, double mean, double sd) {
  if (!(sd > 0.0)) throw Error(ErrorKind::invalid_input, "normal_logpdf requires sd > 0");
  double z = (x - mean) / sd;
  return -0.5 * kLogTwoPi - std::log(sd) - 0.5 * z * z;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double truncnormal_logpdf(double x, double mean, double sd, double lo, double hi) {
  if (!(sd > 0.0) || !(lo < hi)) {
    throw Error(ErrorKind::invalid_input, "truncnormal_logpdf requires sd > 0 and lo < hi");
  }
  if (!(x > lo && x < hi)) return -kInf;
  double zlo = std::isinf(lo) ? 0.0 : normal_cdf((lo - mean) / sd);
  double zhi = std::isinf(hi) ? 1.0 : normal_cdf((hi - mean) / sd);
  double z = zhi - zlo;
  if (!(z > 0.0)) return -kInf;  // support has no mass under this scale
  return normal_logpdf(x, mean, sd) - std::log(z);
}

double logsumexp(std::span<const double> values) {
  if (values.empty()) return -kInf;
  double mx = -kInf;
  for (double v : values) {
    if (std::isnan(v)) return kNaN;
    if (v > mx) mx = v;
  }
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : values) s += std::exp(v - mx);
  return mx + std::log(s);
}

double logsumexp_sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<double>());
  return logsumexp(values);
}

int env_thread_cap() {
  const char* env = std::getenv("RIESZ_SMC_THREADS");
  if (env == nullptr || *env == '\0') {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
  long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return 1;
  return static_cast<int>(v);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = std::min(env_thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace riesz_smc
