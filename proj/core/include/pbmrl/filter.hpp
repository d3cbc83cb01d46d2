#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace pbmrl {

/// Least-mean-p-power recursion state.
struct LmpState {
    Eigen::VectorXd theta;
    double rho = 1e-3;  // learning rate, > 0
};

/// theta <- theta + rho p |e|^{p-2} e x with e = y - theta.x; p in [1, 2].
/// |e| below 1e-30 with p < 2 contributes no update (singularity guard).
LmpState lmp_update(const LmpState& state, const Eigen::VectorXd& x, double y,
                    double p);

struct OutlierModel {
    enum class Kind { none, alpha_stable, sparse };
    Kind kind = Kind::none;
    // alpha-stable parameters
    double alpha_s = 1.0;
    double beta_s = 0.5;
    double sigma_s = 1.0;
    // sparse parameters: uniform values on [low, high] at exactly
    // round(rate * n_total) distinct time indices
    double rate = 0.1;
    double low = -100.0;
    double high = 100.0;
};

struct ScenarioConfig {
    int dim = 100;              // L
    long n_total = 40000;
    double snr_db = 30.0;       // +inf means noiseless
    OutlierModel outliers;
    long change_time = 0;       // 0 = no system change
    std::uint64_t seed = 0;
};

/// Materialized synthetic stream; deterministic per seed.
struct Scenario {
    ScenarioConfig cfg;
    std::vector<Eigen::VectorXd> x;
    std::vector<double> y;
    Eigen::VectorXd theta_star_initial;
    Eigen::VectorXd theta_star_changed;  // valid when cfg.change_time > 0

    long steps() const { return static_cast<long>(y.size()); }
    // n is the 0-based step index
    const Eigen::VectorXd& theta_star_at(long n) const {
        return (cfg.change_time > 0 && n >= cfg.change_time) ? theta_star_changed
                                                             : theta_star_initial;
    }
};

Scenario generate_scenario(const ScenarioConfig& cfg);

/// One draw from the alpha-stable law (Chambers-Mallows-Stuck, S1
/// parameterization, location 0), scaled by sigma_s.
double alpha_stable_sample(double alpha_s, double beta_s, double sigma_s,
                           std::mt19937_64& rng);

/// 10 log10(||theta - theta*||^2 / ||theta*||^2), floored at -300 dB.
double normalized_deviation_db(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& theta_star);

}  // namespace pbmrl
