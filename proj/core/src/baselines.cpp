#include "pbmrl/baselines.hpp"

#include <random>
#include <sstream>

namespace pbmrl {

std::string BaselineSpec::name() const {
    switch (kind) {
        case Kind::fixed_p: {
            std::ostringstream os;
            os << "fixed_p=" << p;
            return os.str();
        }
        case Kind::random_p:
            return "random_p";
        case Kind::obr:
            return "obr";
    }
    return "unknown";
}

std::vector<double> run_fixed_p(const Scenario& scenario, double p, double rho) {
    LmpState state{Eigen::VectorXd::Zero(scenario.cfg.dim), rho};
    std::vector<double> curve(scenario.steps());
    for (long n = 0; n < scenario.steps(); ++n) {
        state = lmp_update(state, scenario.x[n], scenario.y[n], p);
        curve[n] = normalized_deviation_db(state.theta, scenario.theta_star_at(n));
    }
    return curve;
}

std::vector<double> run_random_p(const Scenario& scenario, const ActionGrid& grid,
                                 double rho, std::uint64_t seed) {
    grid.validate();
    LmpState state{Eigen::VectorXd::Zero(scenario.cfg.dim), rho};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, grid.values.size() - 1);
    std::vector<double> curve(scenario.steps());
    for (long n = 0; n < scenario.steps(); ++n) {
        state = lmp_update(state, scenario.x[n], scenario.y[n],
                           grid.values[pick(rng)]);
        curve[n] = normalized_deviation_db(state.theta, scenario.theta_star_at(n));
    }
    return curve;
}

std::vector<double> run_api(const Scenario& scenario, const ApiConfig& cfg,
                            const RffParams& rff, double rho,
                            std::uint64_t seed) {
    ApiRuntime runtime(cfg, rff, scenario.cfg.dim, rho, seed);
    std::vector<double> curve(scenario.steps());
    for (long n = 0; n < scenario.steps(); ++n) {
        runtime.step(scenario.x[n], scenario.y[n]);
        curve[n] =
            normalized_deviation_db(runtime.theta(), scenario.theta_star_at(n));
    }
    return curve;
}

std::vector<double> run_obr(const Scenario& scenario, ApiConfig cfg,
                            const RffParams& rff, double rho,
                            std::uint64_t seed) {
    cfg.obr_mode = true;
    return run_api(scenario, cfg, rff, rho, seed);
}

}  // namespace pbmrl
