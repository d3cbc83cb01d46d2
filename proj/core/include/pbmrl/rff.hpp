#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace pbmrl {

/// Finite-dimensional feature coordinates; entries bounded by sqrt(2/D_F).
using FeatureVector = Eigen::VectorXd;

/// Frozen draw of random Fourier features for the Gaussian kernel
/// exp(-||z - z'||^2 / (2 bandwidth^2)). Immutable after construction.
struct RffParams {
    Eigen::MatrixXd frequencies;  // D_F x dim_z, rows v_k
    Eigen::VectorXd phases;       // b_k in [0, 2pi)
    double bandwidth = 1.0;
    int dim_z = 0;
    std::uint64_t seed = 0;

    int feature_dim() const { return static_cast<int>(frequencies.rows()); }
};

/// Draw D_F frequency/phase pairs. Frequencies are zero-mean Gaussian with
/// component std 1/bandwidth; phases uniform on [0, 2pi). Deterministic in seed.
RffParams sample_rff(int dim_z, int d_f, double bandwidth, std::uint64_t seed);

/// phi~(z), entry k = sqrt(2/D_F) cos(v_k . z + b_k).
FeatureVector feature_map(const RffParams& params, const Eigen::VectorXd& z);

/// Exact Gaussian kernel value in (0, 1].
double gaussian_kernel(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prime,
                       double bandwidth);

}  // namespace pbmrl
