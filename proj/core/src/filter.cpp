#include "pbmrl/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "pbmrl/seeding.hpp"

namespace pbmrl {

LmpState lmp_update(const LmpState& state, const Eigen::VectorXd& x, double y,
                    double p) {
    if (x.size() != state.theta.size())
        throw std::invalid_argument("lmp_update: dimension mismatch");
    if (p < 1.0 || p > 2.0)
        throw std::invalid_argument("lmp_update: p must be in [1,2]");
    if (!(state.rho > 0.0))
        throw std::invalid_argument("lmp_update: rho must be positive");
    const double e = y - state.theta.dot(x);
    LmpState next = state;
    const double abs_e = std::abs(e);
    if (abs_e < 1e-30 && p < 2.0) return next;  // |e|^{p-2} singular at 0
    next.theta.noalias() += state.rho * p * std::pow(abs_e, p - 2.0) * e * x;
    return next;
}

double alpha_stable_sample(double alpha_s, double beta_s, double sigma_s,
                           std::mt19937_64& rng) {
    if (alpha_s <= 0.0 || alpha_s > 2.0)
        throw std::invalid_argument("alpha_stable_sample: alpha_s in (0,2]");
    if (beta_s < -1.0 || beta_s > 1.0)
        throw std::invalid_argument("alpha_stable_sample: beta_s in [-1,1]");
    if (!(sigma_s > 0.0))
        throw std::invalid_argument("alpha_stable_sample: sigma_s > 0");

    constexpr double half_pi = std::numbers::pi / 2.0;
    std::uniform_real_distribution<double> unif(-half_pi, half_pi);
    std::exponential_distribution<double> expo(1.0);
    const double u = unif(rng);
    const double w = expo(rng);

    if (alpha_s == 1.0) {
        const double a = half_pi + beta_s * u;
        const double x =
            (1.0 / half_pi) *
            (a * std::tan(u) -
             beta_s * std::log((half_pi * w * std::cos(u)) / a));
        // S1 location shift for the alpha = 1 scale change
        return sigma_s * x + (2.0 / std::numbers::pi) * beta_s * sigma_s *
                                 std::log(sigma_s);
    }

    const double tan_term = beta_s * std::tan(half_pi * alpha_s);
    const double b = std::atan(tan_term) / alpha_s;
    const double s = std::pow(1.0 + tan_term * tan_term, 0.5 / alpha_s);
    const double x =
        s * std::sin(alpha_s * (u + b)) /
        std::pow(std::cos(u), 1.0 / alpha_s) *
        std::pow(std::cos(u - alpha_s * (u + b)) / w, (1.0 - alpha_s) / alpha_s);
    return sigma_s * x;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
    if (cfg.dim < 1)
        throw std::invalid_argument("generate_scenario: dim must be >= 1");
    if (cfg.n_total < 1)
        throw std::invalid_argument("generate_scenario: n_total must be >= 1");
    if (cfg.change_time > cfg.n_total)
        throw std::invalid_argument("generate_scenario: change_time > n_total");
    if (cfg.outliers.kind == OutlierModel::Kind::sparse &&
        (cfg.outliers.rate < 0.0 || cfg.outliers.rate > 1.0))
        throw std::invalid_argument("generate_scenario: rate must be in [0,1]");

    Scenario sc;
    sc.cfg = cfg;
    const long n = cfg.n_total;
    const int L = cfg.dim;

    std::mt19937_64 rng_theta(derive_seed(cfg.seed, 0));
    std::mt19937_64 rng_x(derive_seed(cfg.seed, 1));
    std::mt19937_64 rng_noise(derive_seed(cfg.seed, 2));
    std::mt19937_64 rng_outlier(derive_seed(cfg.seed, 3));
    std::normal_distribution<double> gauss(0.0, 1.0);

    sc.theta_star_initial.resize(L);
    for (int k = 0; k < L; ++k) sc.theta_star_initial(k) = gauss(rng_theta);
    if (cfg.change_time > 0) {
        sc.theta_star_changed.resize(L);
        for (int k = 0; k < L; ++k) sc.theta_star_changed(k) = gauss(rng_theta);
    }

    sc.x.resize(n);
    sc.y.resize(n);
    for (long t = 0; t < n; ++t) {
        sc.x[t].resize(L);
        for (int k = 0; k < L; ++k) sc.x[t](k) = gauss(rng_x);
    }

    // Gaussian noise scaled per segment so E[(theta*.x)^2] / E[noise^2]
    // matches the requested SNR against the realized theta*.
    const bool noiseless = std::isinf(cfg.snr_db);
    for (long t = 0; t < n; ++t) {
        const Eigen::VectorXd& ts = sc.theta_star_at(t);
        double noise = 0.0;
        if (!noiseless) {
            const double noise_std =
                std::sqrt(ts.squaredNorm() * std::pow(10.0, -cfg.snr_db / 10.0));
            noise = noise_std * gauss(rng_noise);
        }
        sc.y[t] = ts.dot(sc.x[t]) + noise;
    }

    switch (cfg.outliers.kind) {
        case OutlierModel::Kind::none:
            break;
        case OutlierModel::Kind::alpha_stable:
            for (long t = 0; t < n; ++t)
                sc.y[t] += alpha_stable_sample(cfg.outliers.alpha_s,
                                               cfg.outliers.beta_s,
                                               cfg.outliers.sigma_s, rng_outlier);
            break;
        case OutlierModel::Kind::sparse: {
            const long count = std::lround(cfg.outliers.rate * n);
            std::vector<long> idx(n);
            std::iota(idx.begin(), idx.end(), 0L);
            std::shuffle(idx.begin(), idx.end(), rng_outlier);
            std::uniform_real_distribution<double> value(cfg.outliers.low,
                                                         cfg.outliers.high);
            for (long k = 0; k < count; ++k) sc.y[idx[k]] += value(rng_outlier);
            break;
        }
    }
    return sc;
}

double normalized_deviation_db(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& theta_star) {
    if (theta.size() != theta_star.size())
        throw std::invalid_argument("normalized_deviation_db: dimension mismatch");
    const double denom = theta_star.squaredNorm();
    if (denom <= 0.0)
        throw std::invalid_argument("normalized_deviation_db: zero theta_star");
    const double db = 10.0 * std::log10((theta - theta_star).squaredNorm() / denom);
    return std::max(db, -300.0);
}

}  // namespace pbmrl
