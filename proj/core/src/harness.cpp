#include "pbmrl/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pbmrl/seeding.hpp"
#include <json.hpp>

#ifndef PBMRL_BUILD_ID
#define PBMRL_BUILD_ID "unknown"
#endif

namespace pbmrl {

using nlohmann::json;

std::string build_identifier() { return PBMRL_BUILD_ID; }

void ExperimentConfig::validate() const {
    if (trials < 1)
        throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (workers < 1)
        throw std::invalid_argument("ExperimentConfig: workers must be >= 1");
    if (decimation < 1)
        throw std::invalid_argument("ExperimentConfig: decimation must be >= 1");
    if (!include_api && baselines.empty())
        throw std::invalid_argument("ExperimentConfig: no methods selected");
    if (rff.d_f < 1 || !(rff.bandwidth > 0.0))
        throw std::invalid_argument("ExperimentConfig: invalid rff settings");
    api.validate();
}

ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.scenario.dim = 100;
    cfg.scenario.n_total = 40000;
    cfg.scenario.snr_db = 30.0;
    cfg.scenario.outliers.kind = OutlierModel::Kind::sparse;
    cfg.scenario.change_time = 20000;
    cfg.trials = 100;
    for (double p : cfg.api.grid.values)
        cfg.baselines.push_back({BaselineSpec::Kind::fixed_p, p});
    cfg.baselines.push_back({BaselineSpec::Kind::random_p, 0.0});
    cfg.baselines.push_back({BaselineSpec::Kind::obr, 0.0});
    return cfg;
}

namespace {

OutlierModel::Kind parse_outlier_kind(const std::string& s) {
    if (s == "none") return OutlierModel::Kind::none;
    if (s == "alpha-stable" || s == "alpha_stable")
        return OutlierModel::Kind::alpha_stable;
    if (s == "sparse") return OutlierModel::Kind::sparse;
    throw std::invalid_argument("unknown outlier model: " + s);
}

std::string outlier_kind_name(OutlierModel::Kind k) {
    switch (k) {
        case OutlierModel::Kind::none: return "none";
        case OutlierModel::Kind::alpha_stable: return "alpha-stable";
        case OutlierModel::Kind::sparse: return "sparse";
    }
    return "none";
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["scenario"] = {
        {"dim", cfg.scenario.dim},
        {"n_total", cfg.scenario.n_total},
        {"snr_db", std::isinf(cfg.scenario.snr_db) ? json("inf")
                                                   : json(cfg.scenario.snr_db)},
        {"change_time", cfg.scenario.change_time},
        {"outliers",
         {{"kind", outlier_kind_name(cfg.scenario.outliers.kind)},
          {"alpha_s", cfg.scenario.outliers.alpha_s},
          {"beta_s", cfg.scenario.outliers.beta_s},
          {"sigma_s", cfg.scenario.outliers.sigma_s},
          {"rate", cfg.scenario.outliers.rate},
          {"low", cfg.scenario.outliers.low},
          {"high", cfg.scenario.outliers.high}}}};
    j["api"] = {{"alpha", cfg.api.alpha},
                {"lambda", cfg.api.lambda},
                {"w1", cfg.api.w1},
                {"w2", cfg.api.w2},
                {"eps1", cfg.api.eps1},
                {"eps2", cfg.api.eps2},
                {"sigma1", cfg.api.sigma1},
                {"sigma2", cfg.api.sigma2},
                {"n_w", cfg.api.n_w},
                {"c", cfg.api.c},
                {"m_av", cfg.api.m_av},
                {"varpi", cfg.api.varpi},
                {"grid", cfg.api.grid.values},
                {"buffer_capacity", cfg.api.buffer_capacity},
                {"remote_horizon", cfg.api.remote_horizon},
                {"standardize", cfg.api.standardize},
                {"action_span", cfg.api.action_span},
                {"warmup", cfg.api.warmup}};
    j["rff"] = {{"d_f", cfg.rff.d_f}, {"bandwidth", cfg.rff.bandwidth}};
    j["rho"] = cfg.rho;
    j["include_api"] = cfg.include_api;
    json b = json::array();
    for (const BaselineSpec& spec : cfg.baselines) {
        switch (spec.kind) {
            case BaselineSpec::Kind::fixed_p:
                b.push_back({{"kind", "fixed_p"}, {"p", spec.p}});
                break;
            case BaselineSpec::Kind::random_p:
                b.push_back({{"kind", "random_p"}});
                break;
            case BaselineSpec::Kind::obr:
                b.push_back({{"kind", "obr"}});
                break;
        }
    }
    j["baselines"] = b;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    j["workers"] = cfg.workers;
    j["decimation"] = cfg.decimation;
    return j;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j = json::parse(in);

    ExperimentConfig cfg = default_experiment_config();
    if (j.contains("scenario")) {
        const json& s = j["scenario"];
        cfg.scenario.dim = s.value("dim", cfg.scenario.dim);
        cfg.scenario.n_total = s.value("n_total", cfg.scenario.n_total);
        if (s.contains("snr_db")) {
            if (s["snr_db"].is_string())
                cfg.scenario.snr_db = std::numeric_limits<double>::infinity();
            else
                cfg.scenario.snr_db = s["snr_db"].get<double>();
        }
        cfg.scenario.change_time = s.value("change_time", cfg.scenario.change_time);
        if (s.contains("outliers")) {
            const json& o = s["outliers"];
            OutlierModel& m = cfg.scenario.outliers;
            if (o.contains("kind"))
                m.kind = parse_outlier_kind(o["kind"].get<std::string>());
            m.alpha_s = o.value("alpha_s", m.alpha_s);
            m.beta_s = o.value("beta_s", m.beta_s);
            m.sigma_s = o.value("sigma_s", m.sigma_s);
            m.rate = o.value("rate", m.rate);
            m.low = o.value("low", m.low);
            m.high = o.value("high", m.high);
        }
    }
    if (j.contains("api")) {
        const json& a = j["api"];
        ApiConfig& c = cfg.api;
        c.alpha = a.value("alpha", c.alpha);
        c.lambda = a.value("lambda", c.lambda);
        c.w1 = a.value("w1", c.w1);
        c.w2 = a.value("w2", c.w2);
        c.eps1 = a.value("eps1", c.eps1);
        c.eps2 = a.value("eps2", c.eps2);
        c.sigma1 = a.value("sigma1", c.sigma1);
        c.sigma2 = a.value("sigma2", c.sigma2);
        c.n_w = a.value("n_w", c.n_w);
        c.c = a.value("c", c.c);
        c.m_av = a.value("m_av", c.m_av);
        c.varpi = a.value("varpi", c.varpi);
        if (a.contains("grid"))
            c.grid.values = a["grid"].get<std::vector<double>>();
        c.buffer_capacity = a.value("buffer_capacity", c.buffer_capacity);
        c.remote_horizon = a.value("remote_horizon", c.remote_horizon);
        c.standardize = a.value("standardize", c.standardize);
        c.action_span = a.value("action_span", c.action_span);
        c.warmup = a.value("warmup", c.warmup);
    }
    if (j.contains("rff")) {
        cfg.rff.d_f = j["rff"].value("d_f", cfg.rff.d_f);
        cfg.rff.bandwidth = j["rff"].value("bandwidth", cfg.rff.bandwidth);
    }
    cfg.rho = j.value("rho", cfg.rho);
    cfg.include_api = j.value("include_api", cfg.include_api);
    if (j.contains("baselines")) {
        cfg.baselines.clear();
        for (const json& b : j["baselines"]) {
            const std::string kind = b.at("kind").get<std::string>();
            BaselineSpec spec;
            if (kind == "fixed_p") {
                spec.kind = BaselineSpec::Kind::fixed_p;
                spec.p = b.at("p").get<double>();
            } else if (kind == "random_p") {
                spec.kind = BaselineSpec::Kind::random_p;
            } else if (kind == "obr") {
                spec.kind = BaselineSpec::Kind::obr;
            } else {
                throw std::invalid_argument("unknown baseline kind: " + kind);
            }
            cfg.baselines.push_back(spec);
        }
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.decimation = j.value("decimation", cfg.decimation);
    return cfg;
}

void emit_csv(const std::filesystem::path& path,
              const std::vector<std::string>& names,
              const std::vector<std::vector<double>>& curves, int decimation) {
    if (names.empty() || curves.empty() || names.size() != curves.size())
        throw std::invalid_argument("emit_csv: empty or mismatched curve set");
    const std::size_t steps = curves.front().size();
    if (steps == 0) throw std::invalid_argument("emit_csv: empty curves");
    for (const auto& c : curves)
        if (c.size() != steps)
            throw std::invalid_argument("emit_csv: curve length mismatch");
    if (decimation < 1) throw std::invalid_argument("emit_csv: decimation >= 1");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot write " + path.string());
    out << "n";
    for (const std::string& name : names) out << "," << name;
    out << "\n";
    char buf[64];
    for (std::size_t step = 1; step <= steps; ++step) {
        if (step != 1 && step % static_cast<std::size_t>(decimation) != 0)
            continue;
        out << step;
        for (const auto& c : curves) {
            std::snprintf(buf, sizeof(buf), "%.6g", c[step - 1]);
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("emit_csv: write failure " + path.string());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);

    std::vector<std::string> names;
    if (cfg.include_api) names.push_back("api");
    for (const BaselineSpec& spec : cfg.baselines) names.push_back(spec.name());

    const int trials = cfg.trials;
    std::vector<std::uint64_t> trial_seeds(trials);
    for (int t = 0; t < trials; ++t)
        trial_seeds[t] = derive_seed(cfg.master_seed, t);

    // per_trial[t][method] filled independently per trial
    std::vector<std::vector<std::vector<double>>> per_trial(trials);
    std::vector<std::string> failures(trials);

    auto run_trial = [&](int t) {
        const std::uint64_t seed = trial_seeds[t];
        ScenarioConfig sc = cfg.scenario;
        sc.seed = seed;
        const Scenario scenario = generate_scenario(sc);
        const RffParams rff =
            sample_rff(5, cfg.rff.d_f, cfg.rff.bandwidth, derive_seed(seed, 10));

        std::vector<std::vector<double>> curves;
        if (cfg.include_api)
            curves.push_back(
                run_api(scenario, cfg.api, rff, cfg.rho, derive_seed(seed, 11)));
        for (std::size_t b = 0; b < cfg.baselines.size(); ++b) {
            const BaselineSpec& spec = cfg.baselines[b];
            switch (spec.kind) {
                case BaselineSpec::Kind::fixed_p:
                    curves.push_back(run_fixed_p(scenario, spec.p, cfg.rho));
                    break;
                case BaselineSpec::Kind::random_p:
                    curves.push_back(run_random_p(scenario, cfg.api.grid, cfg.rho,
                                                  derive_seed(seed, 12)));
                    break;
                case BaselineSpec::Kind::obr:
                    curves.push_back(run_obr(scenario, cfg.api, rff, cfg.rho,
                                             derive_seed(seed, 13)));
                    break;
            }
        }
        per_trial[t] = std::move(curves);
    };

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                run_trial(t);
            } catch (const std::exception& ex) {
                failures[t] = ex.what();
            }
        }
    };
    if (cfg.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    for (int t = 0; t < trials; ++t)
        if (!failures[t].empty()) {
            std::ostringstream os;
            os << "trial " << t << " (seed " << trial_seeds[t]
               << ") failed: " << failures[t];
            throw std::runtime_error(os.str());
        }

    // Uniform average, assembled in trial order regardless of completion order.
    const std::size_t steps = per_trial[0][0].size();
    std::vector<std::vector<double>> averaged(
        names.size(), std::vector<double>(steps, 0.0));
    for (int t = 0; t < trials; ++t)
        for (std::size_t m = 0; m < names.size(); ++m)
            for (std::size_t i = 0; i < steps; ++i)
                averaged[m][i] += per_trial[t][m][i];
    for (auto& curve : averaged)
        for (double& v : curve) v /= trials;

    ExperimentResult result;
    result.method_names = names;
    result.averaged_curves = averaged;
    result.trial_seeds = trial_seeds;
    result.csv_path = cfg.out_dir / "curves.csv";
    result.manifest_path = cfg.out_dir / "manifest.json";

    emit_csv(result.csv_path, names, averaged, cfg.decimation);

    json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["trial_seeds"] = trial_seeds;
    manifest["methods"] = names;
    manifest["build"] = build_identifier();
    std::ofstream mf(result.manifest_path);
    if (!mf)
        throw std::runtime_error("run_experiment: cannot write manifest");
    mf << manifest.dump(2) << "\n";
    return result;
}

}  // namespace pbmrl
