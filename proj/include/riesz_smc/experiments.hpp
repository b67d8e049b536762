// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_EXPERIMENTS_HPP
#define RIESZ_SMC_EXPERIMENTS_HPP

#include <string>

#include "json.hpp"
#include "riesz_smc/csv.hpp"
#include "riesz_smc/generator.hpp"
#include "riesz_smc/pmh.hpp"

namespace riesz_smc {

// ---------------------------------------------------------------------------
// Experiment drivers behind the `riesz-smc` CLI. Each driver takes a JSON
// config (defaults merged with a config file and CLI flags), writes its
// output files atomically under out_dir, and is byte-reproducible from
// (config, seeds). Independent cells run on the worker pool; RIESZ_SMC_THREADS
// caps the concurrency.
// ---------------------------------------------------------------------------

extern const char* const kExperimentNames[5];

nlohmann::json default_experiment_config(const std::string& name);

// Recursive object merge: scalars/arrays in `overlay` replace `base`.
void json_merge(nlohmann::json& base, const nlohmann::json& overlay);

void run_experiment(const std::string& name, const nlohmann::json& cfg);

void run_qq_uniformity(const nlohmann::json& cfg);
void run_lgss_filter_table(const nlohmann::json& cfg);
void run_lgss_pmh(const nlohmann::json& cfg);
void run_sv_real_data(const nlohmann::json& cfg);
void run_cheb_generate(const nlohmann::json& cfg);

// Shared builders (exposed for tests).
EnergyParams energy_from_json(const nlohmann::json& j);
GeneratorConfig generator_from_json(const nlohmann::json& j);
Configuration build_normal_base_set(int n_cheb, uint64_t seed, const nlohmann::json& cfg);

// Configuration CSV: index,coord_0,...,coord_{d-1},potential_at_selection
// (selection potential in log scale; nan for the seed point).
void write_configuration_csv(const std::string& path, const GenerationResult& result);
void write_sim_csv(const std::string& path, const SimRecord& record);
void write_filter_csv(const std::string& path, const FilterResult& result);
void write_trace_csv(const std::string& path, const PmhTrace& trace);
void write_summary_json(const std::string& path, const PosteriorSummary& summary,
                        const std::vector<double>& acf_values);

// CLI entry point: riesz-smc <experiment> --config <path> [--out <dir>]
// [--seeds s1,s2,...]. Returns a process exit code.
int cli_main(int argc, char** argv);

}  // namespace riesz_smc

#endif  // RIESZ_SMC_EXPERIMENTS_HPP
