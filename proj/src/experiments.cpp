// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"

namespace riesz_smc {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kExperimentNames[5] = {"qq-uniformity", "lgss-filter-table", "lgss-pmh",
                                         "sv-real-data", "cheb-generate"};

namespace {

constexpr uint64_t kTagSim = 0x5e;
constexpr uint64_t kTagCheb = 0xcb;
constexpr uint64_t kTagFilter = 0xfe;
constexpr uint64_t kTagPmh = 0x97;
constexpr uint64_t kTagVolFilter = 0x7a;

json energy_defaults() {
  return json{{"m", 40.0}, {"d", 1}, {"alpha", -1.0}, {"beta", 1.0}, {"base_floor", 1e-8}};
}

json generator_defaults(double lo, double hi, const std::string& pool_mode, int pool_size) {
  return json{{"n_points", 200},    {"pool_size", pool_size}, {"pool_mode", pool_mode},
              {"max_retries", 32},  {"seed", 1},              {"domain_lo", json::array({lo})},
              {"domain_hi", json::array({hi})}, {"refit_interval", 0},
              {"refit_bandwidth", 0.0}, {"denom_epsilon", 1e-6}};
}

std::vector<double> doubles_from(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

std::vector<uint64_t> seeds_from(const json& cfg) {
  std::vector<uint64_t> out;
  for (const auto& v : cfg.at("seeds")) out.push_back(v.get<uint64_t>());
  if (out.empty()) throw Error(ErrorKind::invalid_config, "seeds list must be non-empty");
  return out;
}

std::string out_path(const json& cfg, const std::string& file) {
  return (fs::path(cfg.at("out_dir").get<std::string>()) / file).string();
}

std::string format_trimmed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

LgssParams lgss_from_json(const json& j) {
  LgssParams p;
  p.phi = j.at("phi").get<double>();
  p.sigma_v = j.at("sigma_v").get<double>();
  p.sigma_o = j.at("sigma_o").get<double>();
  p.validate();
  return p;
}

SvParams sv_from_json(const json& j) {
  SvParams p;
  p.mu = j.at("mu").get<double>();
  p.persistence = j.at("persistence").get<double>();
  p.sigma_v = j.at("sigma_v").get<double>();
  p.tau = j.at("tau").get<double>();
  p.validate();
  return p;
}

PriorSpec prior_from_json(const json& j) {
  PriorSpec p;
  p.mean = j.at("mean").get<double>();
  p.sd = j.at("sd").get<double>();
  if (j.contains("lo") && !j.at("lo").is_null()) p.lo = j.at("lo").get<double>();
  if (j.contains("hi") && !j.at("hi").is_null()) p.hi = j.at("hi").get<double>();
  return p;
}

ProposalMode proposal_mode_from(const std::string& s) {
  if (s == "bootstrap") return ProposalMode::bootstrap;
  if (s == "optimal") return ProposalMode::optimal;
  if (s == "chebyshev") return ProposalMode::chebyshev;
  throw Error(ErrorKind::invalid_config, "unknown proposal_mode '" + s + "'");
}

ChebyshevMap cheb_map_from(const std::string& s) {
  if (s == "optimal") return ChebyshevMap::optimal;
  if (s == "prior") return ChebyshevMap::prior;
  throw Error(ErrorKind::invalid_config, "unknown chebyshev_map '" + s + "'");
}

DensityOracle density_from_json(const json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "uniform") return DensityOracle::uniform();
  if (type == "gaussian") {
    return DensityOracle::gaussian(doubles_from(j.at("mean")), j.at("sd").get<double>());
  }
  throw Error(ErrorKind::invalid_config, "unknown density type '" + type + "'");
}

// Numerical CDF of a one-dimensional density over [lo, hi] via trapezoid
// integration of exp(logpdf) on a fine grid.
std::function<double(double)> numeric_cdf_1d(const DensityOracle& density, double lo, double hi,
                                             int grid_n) {
  std::vector<double> xs(static_cast<size_t>(grid_n));
  std::vector<double> pdf(static_cast<size_t>(grid_n));
  double max_lp = -kInf;
  for (int i = 0; i < grid_n; ++i) {
    xs[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (grid_n - 1);
    Point x{xs[static_cast<size_t>(i)]};
    double lp = density.logpdf(x);
    pdf[static_cast<size_t>(i)] = lp;
    max_lp = std::max(max_lp, lp);
  }
  for (double& v : pdf) v = std::exp(v - max_lp);
  std::vector<double> cum(static_cast<size_t>(grid_n), 0.0);
  for (int i = 1; i < grid_n; ++i) {
    double h = xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(i - 1)];
    cum[static_cast<size_t>(i)] =
        cum[static_cast<size_t>(i - 1)] + 0.5 * h * (pdf[static_cast<size_t>(i)] + pdf[static_cast<size_t>(i - 1)]);
  }
  double total = cum.back();
  if (!(total > 0.0)) throw Error(ErrorKind::degenerate_density, "density integrates to zero on the box");
  return [xs = std::move(xs), cum = std::move(cum), total](double x) {
    if (x <= xs.front()) return 0.0;
    if (x >= xs.back()) return 1.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = static_cast<size_t>(it - xs.begin());
    double x0 = xs[i - 1], x1 = xs[i];
    double c0 = cum[i - 1], c1 = cum[i];
    return (c0 + (c1 - c0) * (x - x0) / (x1 - x0)) / total;
  };
}

struct QqData {
  std::vector<double> theoretical;
  std::vector<double> sample;
  double slope;
};

QqData qq_against_uniform(const Configuration& config, double lo, double hi) {
  std::vector<double> sorted = config.coordinate(0);
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  QqData out;
  out.theoretical.resize(n);
  out.sample = sorted;
  for (size_t i = 0; i < n; ++i) {
    out.theoretical[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += out.theoretical[i];
    my += out.sample[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (out.theoretical[i] - mx) * (out.theoretical[i] - mx);
    sxy += (out.theoretical[i] - mx) * (out.sample[i] - my);
  }
  out.slope = sxy / sxx;
  return out;
}

void log_cell_failure(const std::string& what, const std::exception& e) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[riesz-smc] " << what << " failed: " << e.what() << "\n";
}

}  // namespace

EnergyParams energy_from_json(const json& j) {
  EnergyParams p;
  p.m = j.at("m").get<double>();
  p.d = j.at("d").get<int>();
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.base_floor = j.at("base_floor").get<double>();
  p.validate();
  return p;
}

GeneratorConfig generator_from_json(const json& j) {
  GeneratorConfig cfg;
  cfg.n_points = j.at("n_points").get<int>();
  cfg.pool_size = j.at("pool_size").get<int>();
  std::string mode = j.at("pool_mode").get<std::string>();
  if (mode == "uniform") {
    cfg.pool_mode = PoolMode::uniform;
  } else if (mode == "grid") {
    cfg.pool_mode = PoolMode::grid;
  } else {
    throw Error(ErrorKind::invalid_config, "unknown pool_mode '" + mode + "'");
  }
  cfg.max_retries = j.at("max_retries").get<int>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.domain_lo = doubles_from(j.at("domain_lo"));
  cfg.domain_hi = doubles_from(j.at("domain_hi"));
  cfg.refit_interval = j.at("refit_interval").get<int>();
  cfg.refit_bandwidth = j.at("refit_bandwidth").get<double>();
  cfg.denom_epsilon = j.at("denom_epsilon").get<double>();
  cfg.validate();
  return cfg;
}

Configuration build_normal_base_set(int n_cheb, uint64_t seed, const json& cfg) {
  json gj = cfg.at("generator");
  gj["n_points"] = n_cheb;
  gj["seed"] = seed;
  GeneratorConfig gen = generator_from_json(gj);
  EnergyParams energy = energy_from_json(cfg.at("energy"));
  GenerationResult res = generate(DensityOracle::gaussian1d(0.0, 1.0), energy, gen);
  return res.config;
}

void json_merge(json& base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      json_merge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

json default_experiment_config(const std::string& name) {
  json cfg;
  cfg["out_dir"] = "out/" + name;
  cfg["seeds"] = json::array({1});
  cfg["energy"] = energy_defaults();
  if (name == "qq-uniformity") {
    cfg["sizes"] = json::array({40, 120, 200});
    cfg["generator"] = generator_defaults(0.0, 1.0, "uniform", 512);
  } else if (name == "lgss-filter-table") {
    cfg["seeds"] = json::array({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    cfg["model"] = json{{"phi", 0.75}, {"sigma_v", 1.0}, {"sigma_o", 0.1}, {"x0", 0.0}};
    cfg["sim_T"] = 250;
    cfg["n_cheb"] = 200;
    cfg["particle_counts"] = json::array({10, 20, 50, 100, 200, 500, 1000});
    cfg["generator"] = generator_defaults(-4.0, 4.0, "uniform", 512);
    cfg["filter"] = json{{"proposal_mode", "chebyshev"}, {"chebyshev_map", "optimal"}};
  } else if (name == "lgss-pmh") {
    cfg["model"] = json{{"phi", 0.75}, {"sigma_v", 1.0}, {"sigma_o", 0.1}, {"x0", 0.0}};
    cfg["sim_T"] = 250;
    cfg["n_cheb"] = 100;
    cfg["generator"] = generator_defaults(-4.0, 4.0, "uniform", 512);
    cfg["filter"] = json{{"proposal_mode", "chebyshev"}, {"chebyshev_map", "prior"}};
    cfg["pmh"] = json{{"iterations", 5000}, {"burn_in", 1000}, {"step_size", 0.1},
                      {"init_phi", 0.75}};
    cfg["table2_particle_counts"] = json::array({10, 20, 50, 100, 200, 500});
    cfg["acf_step_sizes"] = json::array({0.05, 0.1, 0.5});
    cfg["acf_n_particles"] = 100;
    cfg["acf_max_lag"] = 100;
  } else if (name == "sv-real-data") {
    cfg["data_path"] = "data/omxs30_synthetic.csv";
    cfg["return_scale"] = 100.0;
    cfg["model"] = json{{"mu", 0.0}, {"persistence", 0.95}, {"sigma_v", 0.2}, {"tau", 1.0}};
    cfg["priors"] = json{{"mu", {{"mean", 0.0}, {"sd", 1.0}}},
                         {"persistence", {{"mean", 0.95}, {"sd", 0.05}, {"lo", -1.0}, {"hi", 1.0}}},
                         {"sigma_v", {{"mean", 0.2}, {"sd", 0.03}, {"lo", 0.0}}}};
    cfg["n_cheb"] = 200;
    cfg["generator"] = generator_defaults(-4.0, 4.0, "uniform", 512);
    cfg["filter"] = json{{"n_particles", 500}, {"proposal_mode", "chebyshev"},
                         {"chebyshev_map", "prior"}};
    cfg["pmh"] = json{{"iterations", 2500}, {"burn_in", 500},
                      {"step_sizes", json::array({0.1, 0.01, 0.01})},
                      {"init_params", json::array({0.0, 0.95, 0.2})}};
    cfg["acf_max_lag"] = 100;
  } else if (name == "cheb-generate") {
    cfg["density"] = json{{"type", "uniform"}};
    cfg["generator"] = generator_defaults(0.0, 1.0, "uniform", 512);
    cfg["mesh_points"] = 2001;
  } else {
    throw Error(ErrorKind::invalid_config, "unknown experiment '" + name + "'");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Output writers.
// ---------------------------------------------------------------------------

void write_configuration_csv(const std::string& path, const GenerationResult& result) {
  const Configuration& c = result.config;
  std::ostringstream out;
  out << "index";
  for (int d = 0; d < c.dim(); ++d) out << ",coord_" << d;
  out << ",potential_at_selection\n";
  for (int i = 0; i < c.size(); ++i) {
    out << i;
    for (int d = 0; d < c.dim(); ++d) out << "," << format_g17(c.coord(i, d));
    out << "," << format_g17(result.diagnostics[static_cast<size_t>(i)].log_potential) << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_sim_csv(const std::string& path, const SimRecord& record) {
  std::ostringstream out;
  out << "t,x_true,y\n";
  for (size_t t = 0; t < record.states.size(); ++t) {
    out << t << "," << format_g17(record.states[t]) << "," << format_g17(record.obs[t]) << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_filter_csv(const std::string& path, const FilterResult& result) {
  std::ostringstream out;
  out << "t,state_mean,loglik_increment,ess\n";
  for (size_t t = 0; t < result.state_means.size(); ++t) {
    out << t << "," << format_g17(result.state_means[t]) << ","
        << format_g17(result.system.loglik_increments[t]) << "," << format_g17(result.ess[t])
        << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_trace_csv(const std::string& path, const PmhTrace& trace) {
  std::ostringstream out;
  out << "iter,accepted,loglik";
  for (int j = 0; j < trace.dim; ++j) out << ",param_" << j;
  out << "\n";
  for (int k = 0; k < trace.iterations; ++k) {
    out << k << "," << static_cast<int>(trace.accepted[static_cast<size_t>(k)]) << ","
        << format_g17(trace.logliks[static_cast<size_t>(k)]);
    for (int j = 0; j < trace.dim; ++j) out << "," << format_g17(trace.param(k, j));
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_summary_json(const std::string& path, const PosteriorSummary& summary,
                        const std::vector<double>& acf_values) {
  json j;
  j["posterior_mean"] = summary.mean;
  j["posterior_variance"] = summary.variance;
  j["acceptance_rate"] = summary.acceptance_rate;
  json acf_obj = json::object();
  for (size_t l = 0; l < acf_values.size(); ++l) acf_obj[std::to_string(l)] = acf_values[l];
  j["acf"] = acf_obj;
  write_text_atomic(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Experiments.
// ---------------------------------------------------------------------------

void run_qq_uniformity(const json& cfg) {
  EnergyParams energy = energy_from_json(cfg.at("energy"));
  if (energy.d != 1) throw Error(ErrorKind::invalid_config, "qq-uniformity requires d = 1");
  uint64_t seed = seeds_from(cfg)[0];
  json report = json::object();
  for (const auto& size_v : cfg.at("sizes")) {
    int n = size_v.get<int>();
    json gj = cfg.at("generator");
    gj["n_points"] = n;
    gj["seed"] = mix_seed(seed, kTagCheb, static_cast<uint64_t>(n));
    GeneratorConfig gen = generator_from_json(gj);
    double lo = gen.domain_lo[0];
    double hi = gen.domain_hi[0];
    GenerationResult res = generate(DensityOracle::uniform(), energy, gen);

    QqData qq = qq_against_uniform(res.config, lo, hi);
    std::ostringstream out;
    out << "theoretical_quantile,sample_quantile\n";
    for (size_t i = 0; i < qq.sample.size(); ++i) {
      out << format_g17(qq.theoretical[i]) << "," << format_g17(qq.sample[i]) << "\n";
    }
    write_text_atomic(out_path(cfg, "qq_" + std::to_string(n) + ".csv"), out.str());

    KsResult ks = ks_uniformity_test(res.config, [lo, hi](double x) {
      return std::min(1.0, std::max(0.0, (x - lo) / (hi - lo)));
    });
    report[std::to_string(n)] = json{{"n", n},
                                     {"ks_statistic", ks.statistic},
                                     {"ks_pass", ks.pass},
                                     {"qq_slope", qq.slope}};
  }
  write_text_atomic(out_path(cfg, "uniformity.json"), report.dump(2) + "\n");
}

void run_lgss_filter_table(const json& cfg) {
  LgssParams model_params = lgss_from_json(cfg.at("model"));
  double x0 = cfg.at("model").at("x0").get<double>();
  int sim_T = cfg.at("sim_T").get<int>();
  int n_cheb = cfg.at("n_cheb").get<int>();
  std::vector<uint64_t> seeds = seeds_from(cfg);
  std::vector<int> particle_counts;
  for (const auto& v : cfg.at("particle_counts")) particle_counts.push_back(v.get<int>());
  ProposalMode mode = proposal_mode_from(cfg.at("filter").at("proposal_mode").get<std::string>());
  ChebyshevMap map = cheb_map_from(cfg.at("filter").at("chebyshev_map").get<std::string>());

  size_t n_seeds = seeds.size();
  size_t n_cells = particle_counts.size();
  std::vector<double> bias(n_seeds * n_cells, kNaN);
  std::vector<double> mse(n_seeds * n_cells, kNaN);

  parallel_for(static_cast<int>(n_seeds), [&](int si) {
    uint64_t seed = seeds[static_cast<size_t>(si)];
    SimRecord rec = lgss_simulate(sim_T, model_params, x0, mix_seed(seed, kTagSim));
    if (si == 0) write_sim_csv(out_path(cfg, "sim_data_seed" + std::to_string(seed) + ".csv"), rec);
    KalmanResult kalman = kalman_filter(rec.obs, model_params, x0, 0.0);
    Configuration cheb = build_normal_base_set(n_cheb, mix_seed(seed, kTagCheb), cfg);
    LgssModel model(model_params, x0);
    for (size_t ci = 0; ci < n_cells; ++ci) {
      int N = particle_counts[ci];
      FilterConfig fc;
      fc.n_particles = N;
      fc.proposal_mode = mode;
      fc.chebyshev_map = map;
      fc.cheb_set = cheb;
      fc.seed = mix_seed(seed, kTagFilter, static_cast<uint64_t>(N));
      try {
        FilterResult fr = filter_run(model, rec.obs, fc);
        FilterMetrics m = filtering_metrics(fr.state_means, kalman.filtered_means);
        bias[static_cast<size_t>(si) * n_cells + ci] = m.log_bias;
        mse[static_cast<size_t>(si) * n_cells + ci] = m.log_mse;
      } catch (const Error& e) {
        log_cell_failure("lgss-filter-table cell N=" + std::to_string(N), e);
      }
    }
  });

  std::ostringstream out;
  out << "N,log_bias_mean,log_bias_sd,log_mse_mean,log_mse_sd\n";
  for (size_t ci = 0; ci < n_cells; ++ci) {
    double bm = 0.0, mm = 0.0;
    int valid = 0;
    for (size_t si = 0; si < n_seeds; ++si) {
      double b = bias[si * n_cells + ci];
      if (std::isnan(b)) continue;
      bm += b;
      mm += mse[si * n_cells + ci];
      ++valid;
    }
    double bias_mean = kNaN, bias_sd = kNaN, mse_mean = kNaN, mse_sd = kNaN;
    if (valid > 0) {
      bias_mean = bm / valid;
      mse_mean = mm / valid;
      if (valid > 1) {
        double bv = 0.0, mv = 0.0;
        for (size_t si = 0; si < n_seeds; ++si) {
          double b = bias[si * n_cells + ci];
          if (std::isnan(b)) continue;
          bv += (b - bias_mean) * (b - bias_mean);
          mv += (mse[si * n_cells + ci] - mse_mean) * (mse[si * n_cells + ci] - mse_mean);
        }
        bias_sd = std::sqrt(bv / (valid - 1));
        mse_sd = std::sqrt(mv / (valid - 1));
      }
    }
    out << particle_counts[ci] << "," << format_g17(bias_mean) << "," << format_g17(bias_sd)
        << "," << format_g17(mse_mean) << "," << format_g17(mse_sd) << "\n";
  }
  write_text_atomic(out_path(cfg, "table1.csv"), out.str());
}

void run_lgss_pmh(const json& cfg) {
  LgssParams model_params = lgss_from_json(cfg.at("model"));
  double x0 = cfg.at("model").at("x0").get<double>();
  int sim_T = cfg.at("sim_T").get<int>();
  int n_cheb = cfg.at("n_cheb").get<int>();
  uint64_t seed = seeds_from(cfg)[0];
  ProposalMode mode = proposal_mode_from(cfg.at("filter").at("proposal_mode").get<std::string>());
  ChebyshevMap map = cheb_map_from(cfg.at("filter").at("chebyshev_map").get<std::string>());
  const json& pj = cfg.at("pmh");
  int iterations = pj.at("iterations").get<int>();
  int burn_in = pj.at("burn_in").get<int>();
  double base_h = pj.at("step_size").get<double>();
  double init_phi = pj.at("init_phi").get<double>();

  SimRecord rec = lgss_simulate(sim_T, model_params, x0, mix_seed(seed, kTagSim));
  write_sim_csv(out_path(cfg, "sim_data.csv"), rec);
  Configuration cheb = build_normal_base_set(n_cheb, mix_seed(seed, kTagCheb), cfg);
  LgssModel model(model_params, x0);

  auto make_chain = [&](int N, double h, uint64_t chain_seed) {
    PmhConfig pc;
    pc.iterations = iterations;
    pc.burn_in = burn_in;
    pc.step_sizes = {h};
    pc.init_params = {init_phi};
    pc.seed = chain_seed;
    pc.filter.n_particles = N;
    pc.filter.proposal_mode = mode;
    pc.filter.chebyshev_map = map;
    pc.filter.cheb_set = cheb;
    return run_chain(model, rec.obs, pc);
  };

  // Posterior table cells at the base step size.
  std::vector<int> counts;
  for (const auto& v : cfg.at("table2_particle_counts")) counts.push_back(v.get<int>());
  std::vector<double> post_mean(counts.size(), kNaN);
  std::vector<double> post_var(counts.size(), kNaN);
  parallel_for(static_cast<int>(counts.size()), [&](int i) {
    int N = counts[static_cast<size_t>(i)];
    try {
      PmhTrace trace = make_chain(N, base_h, mix_seed(seed, kTagPmh, static_cast<uint64_t>(N)));
      write_trace_csv(out_path(cfg, "trace_N" + std::to_string(N) + ".csv"), trace);
      PosteriorSummary s = posterior_summary(trace, burn_in);
      post_mean[static_cast<size_t>(i)] = s.mean[0];
      post_var[static_cast<size_t>(i)] = s.variance[0];
    } catch (const std::exception& e) {
      log_cell_failure("lgss-pmh chain N=" + std::to_string(N), e);
    }
  });
  std::ostringstream t2;
  t2 << "N,posterior_mean,posterior_variance\n";
  for (size_t i = 0; i < counts.size(); ++i) {
    t2 << counts[i] << "," << format_g17(post_mean[i]) << "," << format_g17(post_var[i]) << "\n";
  }
  write_text_atomic(out_path(cfg, "table2.csv"), t2.str());

  // Mixing diagnostics across step sizes at a fixed particle count.
  std::vector<double> hs = doubles_from(cfg.at("acf_step_sizes"));
  int acf_N = cfg.at("acf_n_particles").get<int>();
  int max_lag = cfg.at("acf_max_lag").get<int>();
  parallel_for(static_cast<int>(hs.size()), [&](int i) {
    double h = hs[static_cast<size_t>(i)];
    std::string tag = "h" + format_trimmed(h);
    try {
      PmhTrace trace = make_chain(acf_N, h, mix_seed(seed, kTagPmh, 0x5a, static_cast<uint64_t>(i)));
      write_trace_csv(out_path(cfg, "trace_" + tag + ".csv"), trace);
      std::vector<double> series = trace.param_series(0, burn_in);
      std::vector<double> a = acf(series, std::min(max_lag, static_cast<int>(series.size()) - 1));
      std::ostringstream out;
      out << "lag,acf\n";
      for (size_t l = 0; l < a.size(); ++l) out << l << "," << format_g17(a[l]) << "\n";
      write_text_atomic(out_path(cfg, "acf_" + tag + ".csv"), out.str());
      PosteriorSummary s = posterior_summary(trace, burn_in);
      write_summary_json(out_path(cfg, "summary_" + tag + ".json"), s, a);
    } catch (const std::exception& e) {
      log_cell_failure("lgss-pmh acf run " + tag, e);
    }
  });
}

void run_sv_real_data(const json& cfg) {
  std::string data_path = cfg.at("data_path").get<std::string>();
  PriceSeries prices = read_price_csv(data_path);
  std::vector<double> returns = log_returns(prices.close);
  double scale = cfg.at("return_scale").get<double>();
  for (double& r : returns) r *= scale;

  SvParams sv = sv_from_json(cfg.at("model"));
  const json& priors = cfg.at("priors");
  SvModel model(sv, prior_from_json(priors.at("mu")), prior_from_json(priors.at("persistence")),
                prior_from_json(priors.at("sigma_v")));

  uint64_t seed = seeds_from(cfg)[0];
  Configuration cheb = build_normal_base_set(cfg.at("n_cheb").get<int>(),
                                             mix_seed(seed, kTagCheb), cfg);

  const json& pj = cfg.at("pmh");
  PmhConfig pc;
  pc.iterations = pj.at("iterations").get<int>();
  pc.burn_in = pj.at("burn_in").get<int>();
  pc.step_sizes = doubles_from(pj.at("step_sizes"));
  pc.init_params = doubles_from(pj.at("init_params"));
  pc.seed = mix_seed(seed, kTagPmh);
  pc.filter.n_particles = cfg.at("filter").at("n_particles").get<int>();
  pc.filter.proposal_mode = proposal_mode_from(cfg.at("filter").at("proposal_mode").get<std::string>());
  pc.filter.chebyshev_map = cheb_map_from(cfg.at("filter").at("chebyshev_map").get<std::string>());
  pc.filter.cheb_set = cheb;

  PmhTrace trace = run_chain(model, returns, pc);
  write_trace_csv(out_path(cfg, "trace.csv"), trace);
  PosteriorSummary summary = posterior_summary(trace, pc.burn_in);

  int max_lag = cfg.at("acf_max_lag").get<int>();
  const char* names[3] = {"mu", "persistence", "sigma_v"};
  std::vector<double> acf_first;
  for (int j = 0; j < 3; ++j) {
    try {
      std::vector<double> series = trace.param_series(j, pc.burn_in);
      std::vector<double> a = acf(series, std::min(max_lag, static_cast<int>(series.size()) - 1));
      if (j == 0) acf_first = a;
      std::ostringstream out;
      out << "lag,acf\n";
      for (size_t l = 0; l < a.size(); ++l) out << l << "," << format_g17(a[l]) << "\n";
      write_text_atomic(out_path(cfg, std::string("acf_") + names[j] + ".csv"), out.str());
    } catch (const Error& e) {
      log_cell_failure(std::string("sv acf for ") + names[j], e);
    }
  }
  write_summary_json(out_path(cfg, "summary.json"), summary, acf_first);

  // Log-volatility track at the posterior mean, with 95% bands from the
  // weighted particle spread.
  std::unique_ptr<HmmModel> fitted = model.with_params(summary.mean);
  FilterConfig fc = pc.filter;
  fc.seed = mix_seed(seed, kTagVolFilter);
  FilterResult fr = filter_run(*fitted, returns, fc);
  write_filter_csv(out_path(cfg, "filter.csv"), fr);

  std::ostringstream vol;
  vol << "t,y,logvol_mean,logvol_lo,logvol_hi\n";
  for (int t = 0; t < fr.system.T; ++t) {
    auto xs = fr.system.particles_at(t);
    auto ws = fr.system.weights_at(t);
    double mean = 0.0;
    for (int i = 0; i < fr.system.N; ++i) mean += ws[static_cast<size_t>(i)] * xs[static_cast<size_t>(i)];
    double var = 0.0;
    for (int i = 0; i < fr.system.N; ++i) {
      double d = xs[static_cast<size_t>(i)] - mean;
      var += ws[static_cast<size_t>(i)] * d * d;
    }
    double sd = std::sqrt(var);
    vol << t << "," << format_g17(returns[static_cast<size_t>(t)]) << "," << format_g17(mean)
        << "," << format_g17(mean - 1.959963984540054 * sd) << ","
        << format_g17(mean + 1.959963984540054 * sd) << "\n";
  }
  write_text_atomic(out_path(cfg, "volatility.csv"), vol.str());
}

void run_cheb_generate(const json& cfg) {
  EnergyParams energy = energy_from_json(cfg.at("energy"));
  uint64_t seed = seeds_from(cfg)[0];
  json gj = cfg.at("generator");
  gj["seed"] = mix_seed(seed, kTagCheb);
  GeneratorConfig gen = generator_from_json(gj);
  DensityOracle density = density_from_json(cfg.at("density"));

  GenerationResult res = generate(density, energy, gen);
  write_configuration_csv(out_path(cfg, "configuration.csv"), res);

  json diag;
  diag["n"] = res.config.size();
  diag["d"] = res.config.dim();
  diag["min_separation"] = min_separation(res.config);
  diag["log_energy"] = log_total_energy(res.config, density, energy);
  double lin_energy = total_energy(res.config, density, energy);
  if (std::isfinite(lin_energy)) {
    diag["energy"] = lin_energy;
  } else {
    diag["energy"] = nullptr;  // out of double range; see log_energy
  }
  diag["energy_lower_bound_holds"] = energy_lower_bound(res.config, density, energy).holds;
  UniformityStat u = uniformity_statistic(res.config);
  diag["uniformity_raw"] = u.raw;
  diag["uniformity_mean_pairwise"] = u.mean_pairwise;
  if (res.config.dim() == 1) {
    int mesh_points = cfg.at("mesh_points").get<int>();
    std::vector<Point> mesh = linspace_mesh(gen.domain_lo[0], gen.domain_hi[0], mesh_points);
    diag["covering_radius"] = covering_radius(res.config, mesh);
    diag["covering_mesh_points"] = mesh_points;
    auto cdf = numeric_cdf_1d(density, gen.domain_lo[0], gen.domain_hi[0], 4001);
    KsResult ks = ks_uniformity_test(res.config, cdf);
    diag["ks_statistic"] = ks.statistic;
    diag["ks_pass"] = ks.pass;
  } else {
    diag["covering_radius"] = nullptr;
    diag["ks_statistic"] = nullptr;
  }
  write_text_atomic(out_path(cfg, "diagnostics.json"), diag.dump(2) + "\n");
}

void run_experiment(const std::string& name, const json& cfg) {
  if (name == "qq-uniformity") {
    run_qq_uniformity(cfg);
  } else if (name == "lgss-filter-table") {
    run_lgss_filter_table(cfg);
  } else if (name == "lgss-pmh") {
    run_lgss_pmh(cfg);
  } else if (name == "sv-real-data") {
    run_sv_real_data(cfg);
  } else if (name == "cheb-generate") {
    run_cheb_generate(cfg);
  } else {
    throw Error(ErrorKind::invalid_config, "unknown experiment '" + name + "'");
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Chebyshev-particle configurations and particle inference for state-space models"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config_path;
    std::string out_dir;
    std::string seeds;
  };
  std::vector<SubArgs> args(5);
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(kExperimentNames[i]);
    sub->add_option("--config", args[static_cast<size_t>(i)].config_path,
                    "JSON config file merged over the built-in defaults");
    sub->add_option("--out", args[static_cast<size_t>(i)].out_dir, "Output directory");
    sub->add_option("--seeds", args[static_cast<size_t>(i)].seeds,
                    "Comma-separated list of master seeds");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (int i = 0; i < 5; ++i) {
      if (!subs[static_cast<size_t>(i)]->parsed()) continue;
      const SubArgs& a = args[static_cast<size_t>(i)];
      json cfg = default_experiment_config(kExperimentNames[i]);
      if (!a.config_path.empty()) {
        json file_cfg = json::parse(read_text(a.config_path));
        json_merge(cfg, file_cfg);
      }
      if (!a.out_dir.empty()) cfg["out_dir"] = a.out_dir;
      if (!a.seeds.empty()) {
        json seeds = json::array();
        std::stringstream ss(a.seeds);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          if (tok.empty()) continue;
          seeds.push_back(std::stoull(tok));
        }
        cfg["seeds"] = seeds;
      }
      run_experiment(kExperimentNames[i], cfg);
    }
    return 0;
  } catch (const json::exception& e) {
    std::cerr << "riesz-smc: invalid config: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "riesz-smc: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "riesz-smc: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace riesz_smc
