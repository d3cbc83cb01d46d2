// Command-line front end: `run` executes a configured experiment and writes
// CSV curves; `check` runs the built-in property suites.

#include <CLI11.hpp>
#include <cstdio>
#include <random>

#include "pbmrl/harness.hpp"
#include "pbmrl/seeding.hpp"

namespace {

using namespace pbmrl;

bool report(const char* name, bool ok, double value, const char* detail) {
    std::printf("%-24s %s  (%s = %.3g)\n", name, ok ? "PASS" : "FAIL", detail,
                value);
    return ok;
}

BellmanConfig random_bellman(int dim, int slabs, double alpha,
                             std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    BellmanConfig cfg;
    cfg.alpha = alpha;
    for (int i = 0; i < slabs; ++i) {
        Hyperslab slab;
        slab.direction.resize(dim);
        for (int k = 0; k < dim; ++k) slab.direction(k) = gauss(rng);
        slab.anchor = gauss(rng);
        slab.tolerance = 0.1 * unif(rng);
        slab.weight = 1.0 / slabs;
        cfg.slabs.push_back(std::move(slab));
    }
    return cfg;
}

int run_checks() {
    bool all_ok = true;
    std::mt19937_64 rng(20240901);

    // Firm nonexpansivity across discount factors.
    double worst = -1e300;
    for (double alpha : {0.1, 0.9, 5.0})
        for (int rep = 0; rep < 20; ++rep) {
            const BellmanConfig cfg = random_bellman(8, 1 + rep % 2, alpha, rng);
            worst = std::max(worst,
                             check_firm_nonexpansive(cfg, 100, rng()));
        }
    all_ok &= report("firm-nonexpansivity", worst <= 1e-9, worst, "max violation");

    // Operator vs analytic projection composition.
    std::normal_distribution<double> gauss(0.0, 1.0);
    double max_err = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int dim = 4 + rep % 7;
        BellmanConfig cfg = random_bellman(dim, 2, 0.9, rng);
        Eigen::VectorXd g(dim), q(dim);
        for (int k = 0; k < dim; ++k) {
            g(k) = gauss(rng);
            q(k) = gauss(rng);
        }
        std::vector<double> offsets;
        for (Hyperslab& slab : cfg.slabs) {
            const double offset = gauss(rng);
            slab.anchor = g.dot(slab.direction) + cfg.alpha * offset;
            offsets.push_back(offset);
        }
        Eigen::VectorXd expected = g;
        const Eigen::VectorXd u = (q - g) / cfg.alpha;
        for (std::size_t i = 0; i < cfg.slabs.size(); ++i) {
            const Hyperslab& slab = cfg.slabs[i];
            const double residual = u.dot(slab.direction) - offsets[i];
            const Eigen::VectorXd projected =
                u - soft_threshold(residual, slab.tolerance) /
                        slab.direction.squaredNorm() * slab.direction;
            expected += cfg.alpha * slab.weight * projected;
        }
        max_err = std::max(max_err, (apply_t(cfg, q) - expected).norm());
    }
    all_ok &= report("operator-oracle", max_err <= 1e-10, max_err, "max error");

    // RFF kernel approximation error.
    const RffParams rff = sample_rff(6, 2000, 1.0, 7);
    double mae = 0.0;
    const int pairs = 200;
    for (int rep = 0; rep < pairs; ++rep) {
        Eigen::VectorXd z1(6), z2(6);
        for (int k = 0; k < 6; ++k) {
            z1(k) = gauss(rng);
            z2(k) = gauss(rng);
        }
        mae += std::abs(feature_map(rff, z1).dot(feature_map(rff, z2)) -
                        gaussian_kernel(z1, z2, 1.0));
    }
    mae /= pairs;
    all_ok &= report("rff-approximation", mae <= 0.03, mae, "mean abs error");

    std::printf("%s\n", all_ok ? "all checks passed" : "CHECKS FAILED");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proximal Bellman mapping experiments for robust LMP filtering"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a configured experiment");
    std::string config_path;
    std::string out_dir;
    int trials = -1;
    std::int64_t seed = -1;
    int workers = -1;
    std::string scenario_kind;
    run->add_option("--config", config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--trials", trials, "override trial count");
    run->add_option("--seed", seed, "override master seed");
    run->add_option("--workers", workers, "override worker count");
    run->add_option("--scenario", scenario_kind,
                    "override outlier model: alpha-stable|sparse|none");

    auto* check = app.add_subcommand("check", "run the built-in property suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*check) return run_checks();

        ExperimentConfig cfg = load_experiment_config(config_path);
        cfg.out_dir = out_dir;
        if (trials > 0) cfg.trials = trials;
        if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
        if (workers > 0) cfg.workers = workers;
        if (!scenario_kind.empty()) {
            if (scenario_kind == "none")
                cfg.scenario.outliers.kind = OutlierModel::Kind::none;
            else if (scenario_kind == "alpha-stable")
                cfg.scenario.outliers.kind = OutlierModel::Kind::alpha_stable;
            else if (scenario_kind == "sparse")
                cfg.scenario.outliers.kind = OutlierModel::Kind::sparse;
            else
                throw std::invalid_argument("unknown scenario: " + scenario_kind);
        }
        const ExperimentResult result = run_experiment(cfg);
        std::printf("wrote %s\n", result.csv_path.string().c_str());
        std::printf("wrote %s\n", result.manifest_path.string().c_str());
        return 0;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
