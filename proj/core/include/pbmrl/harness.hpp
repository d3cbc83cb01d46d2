#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pbmrl/baselines.hpp"
#include "pbmrl/filter.hpp"
#include "pbmrl/rl.hpp"

namespace pbmrl {

struct RffSettings {
    int d_f = 300;
    double bandwidth = 1.0;
};

struct ExperimentConfig {
    ScenarioConfig scenario;  // per-trial seed is overwritten by derivation
    ApiConfig api;
    RffSettings rff;
    double rho = 1e-3;  // LMP learning rate shared by all methods
    bool include_api = true;
    std::vector<BaselineSpec> baselines;
    int trials = 100;
    std::uint64_t master_seed = 0;
    int workers = 1;
    int decimation = 10;
    std::filesystem::path out_dir;

    void validate() const;
};

/// Shipped defaults: every experiment parameter at its reference value
/// (sparse outliers, SNR 30 dB, 100-tap filter, full baseline sweep).
ExperimentConfig default_experiment_config();

/// Load a JSON file whose keys mirror ExperimentConfig; absent keys keep
/// their defaults.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentResult {
    std::vector<std::string> method_names;
    std::vector<std::vector<double>> averaged_curves;  // one per method
    std::vector<std::uint64_t> trial_seeds;
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
};

/// Run every method over trials, average uniformly, and write
/// <out>/curves.csv plus <out>/manifest.json. Deterministic in
/// (config, master seed) and independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Write the decimated curve table: header "n,<method>...", first data row at
/// step 1 then every decimation-th step, values with 6 significant digits.
void emit_csv(const std::filesystem::path& path,
              const std::vector<std::string>& names,
              const std::vector<std::vector<double>>& curves, int decimation);

/// git-describe-style identifier baked in at configure time.
std::string build_identifier();

}  // namespace pbmrl
