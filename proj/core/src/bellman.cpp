#include "pbmrl/bellman.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pbmrl {

double soft_threshold(double xi, double gamma) {
    if (gamma < 0.0)
        throw std::invalid_argument("soft_threshold: gamma must be >= 0");
    if (xi > gamma) return xi - gamma;
    if (xi < -gamma) return xi + gamma;
    return 0.0;
}

void BellmanConfig::validate(Eigen::Index dim) const {
    if (!(alpha > 0.0))
        throw std::invalid_argument("BellmanConfig: alpha must be > 0");
    if (slabs.empty())
        throw std::invalid_argument("BellmanConfig: at least one hyperslab");
    double weight_sum = 0.0;
    for (const Hyperslab& slab : slabs) {
        if (slab.direction.size() != dim)
            throw std::invalid_argument("BellmanConfig: dimension mismatch");
        if (slab.direction.squaredNorm() < 1e-12)
            throw std::invalid_argument("BellmanConfig: zero-norm direction");
        if (slab.tolerance < 0.0)
            throw std::invalid_argument("BellmanConfig: negative tolerance");
        if (slab.weight < 0.0 || slab.weight > 1.0)
            throw std::invalid_argument("BellmanConfig: weight outside [0,1]");
        weight_sum += slab.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12)
        throw std::invalid_argument("BellmanConfig: weights must sum to 1");
}

QWeights apply_t(const BellmanConfig& cfg, const QWeights& q) {
    cfg.validate(q.size());
    QWeights out = q;
    for (const Hyperslab& slab : cfg.slabs) {
        const double residual = q.dot(slab.direction) - slab.anchor;
        double step = soft_threshold(residual, cfg.alpha * slab.tolerance);
        if (cfg.apply_scaling) step /= slab.direction.squaredNorm();
        out.noalias() -= (slab.weight * step) * slab.direction;
    }
    return out;
}

QWeights km_update(const BellmanConfig& cfg, const QWeights& q, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("km_update: lambda must be in [0,1]");
    if (lambda == 0.0) return q;
    QWeights tq = apply_t(cfg, q);
    if (lambda == 1.0) return tq;
    return (1.0 - lambda) * q + lambda * tq;
}

double check_firm_nonexpansive(const BellmanConfig& cfg, int trials,
                               std::uint64_t seed) {
    if (trials < 1)
        throw std::invalid_argument("check_firm_nonexpansive: trials must be >= 1");
    const Eigen::Index dim = cfg.slabs.front().direction.size();
    cfg.validate(dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double max_violation = -std::numeric_limits<double>::infinity();
    QWeights q1(dim), q2(dim);
    for (int t = 0; t < trials; ++t) {
        for (Eigen::Index k = 0; k < dim; ++k) {
            q1(k) = gauss(rng);
            q2(k) = gauss(rng);
        }
        const QWeights tq1 = apply_t(cfg, q1);
        const QWeights tq2 = apply_t(cfg, q2);
        const QWeights dt = tq1 - tq2;
        const double violation = dt.squaredNorm() - (q1 - q2).dot(dt);
        if (violation > max_violation) max_violation = violation;
    }
    return max_violation;
}

}  // namespace pbmrl
