#include "pbmrl/rff.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pbmrl {

RffParams sample_rff(int dim_z, int d_f, double bandwidth, std::uint64_t seed) {
    if (dim_z < 1) throw std::invalid_argument("sample_rff: dim_z must be >= 1");
    if (d_f < 1) throw std::invalid_argument("sample_rff: d_f must be >= 1");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("sample_rff: bandwidth must be > 0");

    RffParams params;
    params.bandwidth = bandwidth;
    params.dim_z = dim_z;
    params.seed = seed;
    params.frequencies.resize(d_f, dim_z);
    params.phases.resize(d_f);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / bandwidth);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < d_f; ++k) {
        for (int j = 0; j < dim_z; ++j) params.frequencies(k, j) = gauss(rng);
        params.phases(k) = unif(rng);
    }
    return params;
}

FeatureVector feature_map(const RffParams& params, const Eigen::VectorXd& z) {
    if (z.size() != params.dim_z)
        throw std::invalid_argument("feature_map: dimension mismatch");
    const double scale = std::sqrt(2.0 / params.feature_dim());
    return (((params.frequencies * z + params.phases).array()).cos() * scale)
        .matrix();
}

double gaussian_kernel(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prime,
                       double bandwidth) {
    if (z.size() != z_prime.size())
        throw std::invalid_argument("gaussian_kernel: dimension mismatch");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("gaussian_kernel: bandwidth must be > 0");
    return std::exp(-(z - z_prime).squaredNorm() / (2.0 * bandwidth * bandwidth));
}

}  // namespace pbmrl
