#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbmrl/filter.hpp"
#include "pbmrl/rl.hpp"

namespace pbmrl {

struct BaselineSpec {
    enum class Kind { fixed_p, random_p, obr };
    Kind kind = Kind::fixed_p;
    double p = 2.0;  // fixed_p

    std::string name() const;
};

/// Per-step normalized deviation of the LMP recursion with constant p.
std::vector<double> run_fixed_p(const Scenario& scenario, double p, double rho);

/// p_n drawn uniformly from the grid each step.
std::vector<double> run_random_p(const Scenario& scenario, const ActionGrid& grid,
                                 double rho, std::uint64_t seed);

/// Algorithm-driven run; cfg.obr_mode selects the OBR degenerate operator.
std::vector<double> run_api(const Scenario& scenario, const ApiConfig& cfg,
                            const RffParams& rff, double rho,
                            std::uint64_t seed);

/// OBR policy evaluation: run_api with the single-slab, eps = 0, unscaled
/// operator and no remote-past slab.
std::vector<double> run_obr(const Scenario& scenario, ApiConfig cfg,
                            const RffParams& rff, double rho,
                            std::uint64_t seed);

}  // namespace pbmrl
