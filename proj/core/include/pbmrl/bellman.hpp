#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace pbmrl {

/// Coordinates of Q in the feature basis; Q(z) = w . phi~(z).
using QWeights = Eigen::VectorXd;

/// soft_gamma(xi): 0 on [-gamma, gamma], xi -+ gamma outside.
double soft_threshold(double xi, double gamma);

/// One hyperslab constraint |<Q, direction> - anchor'| <= tolerance acting
/// through its proximal (projection) correction.
struct Hyperslab {
    Eigen::VectorXd direction;  // h_i, nonzero
    double anchor = 0.0;        // one-step loss at the reference sample
    double tolerance = 0.0;     // eps_i >= 0
    double weight = 1.0;        // w_i in [0, 1]
};

struct BellmanConfig {
    double alpha = 0.9;  // discount factor, any positive value
    std::vector<Hyperslab> slabs;
    // false drops the 1/||h||^2 scaling (the OBR variant); firm
    // nonexpansivity is only guaranteed with scaling on.
    bool apply_scaling = true;

    void validate(Eigen::Index dim) const;  // throws std::invalid_argument
};

/// TQ = Q - sum_i w_i soft_{alpha eps_i}(<Q, h_i> - anchor_i) / ||h_i||^2 h_i.
QWeights apply_t(const BellmanConfig& cfg, const QWeights& q);

/// Krasnoselskii-Mann step (1 - lambda) Q + lambda TQ, lambda in [0, 1].
QWeights km_update(const BellmanConfig& cfg, const QWeights& q, double lambda);

/// Max over random pairs (q1, q2) of ||Tq1 - Tq2||^2 - <q1 - q2, Tq1 - Tq2>.
/// Nonpositive (up to roundoff) whenever apply_scaling is true.
double check_firm_nonexpansive(const BellmanConfig& cfg, int trials,
                               std::uint64_t seed);

}  // namespace pbmrl
