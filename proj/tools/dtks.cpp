// Command-line front end: simulate / estimate / test / critval over CSV
// samples of doubly-truncated (x,t) pairs.
//
// Exit codes: 0 success, 2 usage error, 3 data validation error,
// 4 numerical failure.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "dtks/datagen.hpp"
#include "dtks/estimation.hpp"
#include "dtks/ksstat.hpp"
#include "dtks/parallel.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

dtks::Copula parse_copula(const std::string& name) {
    if (name == "product") return dtks::Copula::product;
    if (name == "fgm") return dtks::Copula::fgm;
    throw CLI::ValidationError("--copula", "must be 'product' or 'fgm'");
}

dtks::CovarianceMode parse_mode(const std::string& name) {
    if (name == "known-both") return dtks::CovarianceMode::known_both;
    if (name == "est-theta") return dtks::CovarianceMode::est_theta_known_n;
    if (name == "known-theta") return dtks::CovarianceMode::known_theta_est_n;
    if (name == "est-both") return dtks::CovarianceMode::est_both;
    throw CLI::ValidationError("--mode",
                               "must be one of known-both, est-theta, known-theta, est-both");
}

std::vector<dtks::Point> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,t") throw DataError(path + ":1: expected header 'x,t'");
    std::vector<dtks::Point> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 'x,t' pair");
        }
        try {
            std::size_t used = 0;
            const double x = std::stod(line.substr(0, comma), &used);
            const double t = std::stod(line.substr(comma + 1));
            (void)used;
            pts.push_back({x, t});
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": cannot parse numbers");
        }
    }
    if (pts.empty()) throw DataError(path + ": empty sample");
    return pts;
}

dtks::ObservationSet load_observations(const std::string& path, const dtks::StudyWindow& w,
                                       bool drop_invalid, std::size_t* dropped = nullptr) {
    std::vector<dtks::Point> pts = read_csv(path);
    std::vector<dtks::Point> kept;
    kept.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (dtks::in_support(w, pts[i])) {
            kept.push_back(pts[i]);
        } else if (!drop_invalid) {
            throw DataError(path + ": row " + std::to_string(i + 1) +
                            " lies outside the support (use --drop-invalid to filter)");
        }
    }
    if (dropped) *dropped = pts.size() - kept.size();
    if (kept.empty()) throw DataError(path + ": empty sample after validation");
    return dtks::ObservationSet(std::move(kept), w);
}

void write_csv(const std::string& path, const std::vector<dtks::Point>& pts) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "x,t\n";
    char buf[80];
    for (const dtks::Point& p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.t);
        out << buf;
    }
}

std::string decision_name(dtks::Decision d) {
    return d == dtks::Decision::reject ? "reject" : "accept";
}

// ---- subcommand payloads ----

struct CommonModel {
    std::string copula = "product";
    double G = 0.0;
    double s = 0.0;
};

int run_estimate(const std::string& input, const CommonModel& cm, bool drop_invalid) {
    const dtks::StudyWindow w{cm.G, cm.s};
    std::size_t dropped = 0;
    const dtks::ObservationSet obs = load_observations(input, w, drop_invalid, &dropped);
    const dtks::EstimateResult est = dtks::estimate(obs, parse_copula(cm.copula));
    const double a = dtks::alpha(est.params, w);
    std::printf("m                 %zu\n", obs.size());
    if (dropped > 0) std::printf("dropped rows      %zu\n", dropped);
    std::printf("theta_hat         %.10g\n", est.params.theta);
    if (est.params.copula == dtks::Copula::fgm) {
        std::printf("vartheta_hat      %.10g\n", est.params.vartheta);
        std::printf("kendall_tau       %.6g\n", dtks::kendall_tau(est.params.vartheta));
    }
    std::printf("alpha             %.10g\n", a);
    std::printf("latent_n_hat      %.10g\n", est.latent_n);
    std::printf("score_norm        %.3e\n", est.score_norm);
    std::printf("iterations        %d\n", est.iterations);
    return kExitOk;
}

int run_test(const std::string& input, const CommonModel& cm, double grid_step, int reps,
             std::uint64_t seed, std::vector<double> levels, const std::string& mode_name,
             const std::string& out_path, bool drop_invalid) {
    const dtks::StudyWindow w{cm.G, cm.s};
    const dtks::CovarianceMode mode = parse_mode(mode_name);
    std::size_t dropped = 0;
    const dtks::ObservationSet obs = load_observations(input, w, drop_invalid, &dropped);

    const double t0 = now_ms();
    const dtks::EstimateResult est = dtks::estimate(obs, parse_copula(cm.copula));
    const double t1 = now_ms();
    const dtks::StatisticBreakdown stat = dtks::ks_statistic(obs, est.params);
    const double t2 = now_ms();
    const dtks::GridSpec grid{grid_step, 20000};
    const dtks::CriticalValueResult cv =
        dtks::critical_value(est.params, w, grid, mode, levels, reps, seed);
    const double t3 = now_ms();

    const double a = dtks::alpha(est.params, w);
    std::printf("m                 %zu\n", obs.size());
    std::printf("copula            %s\n", cm.copula.c_str());
    std::printf("theta_hat         %.10g\n", est.params.theta);
    if (est.params.copula == dtks::Copula::fgm) {
        std::printf("vartheta_hat      %.10g\n", est.params.vartheta);
    }
    std::printf("alpha             %.10g\n", a);
    std::printf("latent_n_hat      %.10g\n", est.latent_n);
    std::printf("delta_1..5        %.6e %.6e %.6e %.6e %.6e\n", stat.delta1, stat.delta2,
                stat.delta3, stat.delta4, stat.delta5);
    std::printf("statistic         %.8g\n", stat.statistic);
    std::printf("evaluations       %zu\n", stat.evaluation_count);
    std::printf("grid_step         %g   reps %d   seed %llu   jitter %.3e\n", grid_step, reps,
                static_cast<unsigned long long>(seed), cv.jitter_used);
    for (const auto& [level, q] : cv.quantiles) {
        std::printf("level %.4g        critical %.8g   -> %s\n", level, q,
                    decision_name(dtks::decide(stat.statistic, q)).c_str());
    }

    if (!out_path.empty()) {
        json j;
        j["schema_version"] = 1;
        j["copula"] = cm.copula;
        j["window"] = {{"G", cm.G}, {"s", cm.s}};
        j["m"] = obs.size();
        j["dropped_rows"] = dropped;
        j["theta_hat"] = est.params.theta;
        if (est.params.copula == dtks::Copula::fgm) j["vartheta_hat"] = est.params.vartheta;
        j["alpha"] = a;
        j["latent_n_hat"] = est.latent_n;
        j["deltas"] = {stat.delta1, stat.delta2, stat.delta3, stat.delta4, stat.delta5};
        j["statistic"] = stat.statistic;
        j["evaluation_count"] = stat.evaluation_count;
        j["grid_step"] = grid_step;
        j["reps"] = reps;
        j["seed"] = seed;
        j["jitter"] = cv.jitter_used;
        j["mode"] = mode_name;
        json cvj = json::object(), dj = json::object();
        for (const auto& [level, q] : cv.quantiles) {
            std::ostringstream key;
            key << level;
            cvj[key.str()] = q;
            dj[key.str()] = decision_name(dtks::decide(stat.statistic, q));
        }
        j["critical_values"] = cvj;
        j["decisions"] = dj;
        j["timings_ms"] = {{"estimate", t1 - t0},
                           {"statistic", t2 - t1},
                           {"critical_value", t3 - t2}};
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

int run_simulate(const CommonModel& cm, double theta, double vartheta, long latent_n,
                 std::uint64_t seed, const std::string& lifetime, const std::string& out_path) {
    dtks::SimulationConfig cfg;
    cfg.params.copula = parse_copula(cm.copula);
    cfg.params.theta = theta;
    cfg.params.vartheta = cfg.params.copula == dtks::Copula::fgm ? vartheta : 0.0;
    cfg.window = {cm.G, cm.s};
    cfg.latent_n = latent_n;
    cfg.seed = seed;
    if (lifetime == "exponential") {
        cfg.lifetime = dtks::LifetimeFamily::exponential;
    } else if (lifetime == "weibull2") {
        cfg.lifetime = dtks::LifetimeFamily::weibull_shape2;
    } else {
        throw CLI::ValidationError("--lifetime", "must be 'exponential' or 'weibull2'");
    }
    const auto latent = dtks::sample_latent(cfg);
    const dtks::ObservationSet obs = dtks::truncate(latent, cfg.window);
    write_csv(out_path, obs.points());
    json meta;
    meta["schema_version"] = 1;
    meta["copula"] = cm.copula;
    meta["theta"] = theta;
    if (cfg.params.copula == dtks::Copula::fgm) meta["vartheta"] = vartheta;
    meta["G"] = cm.G;
    meta["s"] = cm.s;
    meta["latent_n"] = latent_n;
    meta["seed"] = seed;
    meta["lifetime"] = lifetime;
    meta["m"] = obs.size();
    std::ofstream mo(out_path + ".meta.json");
    if (!mo) throw DataError("cannot write " + out_path + ".meta.json");
    mo << meta.dump(2) << "\n";
    std::printf("wrote %zu observations (latent %ld) to %s\n", obs.size(), latent_n,
                out_path.c_str());
    return kExitOk;
}

int run_critval(const CommonModel& cm, double theta, double vartheta, double grid_step,
                int reps, std::uint64_t seed, std::vector<double> levels,
                const std::string& mode_name) {
    dtks::ModelParams params;
    params.copula = parse_copula(cm.copula);
    params.theta = theta;
    params.vartheta = params.copula == dtks::Copula::fgm ? vartheta : 0.0;
    const dtks::StudyWindow w{cm.G, cm.s};
    const dtks::GridSpec grid{grid_step, 20000};
    const dtks::CriticalValueResult cv = dtks::critical_value(
        params, w, grid, parse_mode(mode_name), levels, reps, seed);
    std::printf("grid_step %g   reps %d   seed %llu   jitter %.3e\n", grid_step, reps,
                static_cast<unsigned long long>(seed), cv.jitter_used);
    for (const auto& [level, q] : cv.quantiles) {
        std::printf("level %.4g        critical %.8g\n", level, q);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goodness-of-fit testing for dependently doubly-truncated lifetimes"};
    app.require_subcommand(1);

    CommonModel cm;
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: hardware)");

    auto add_model_flags = [&](CLI::App* sub) {
        sub->add_option("--copula", cm.copula, "hypothesis copula: product | fgm")
            ->default_val("product");
        sub->add_option("--G", cm.G, "birth window length")->required();
        sub->add_option("--s", cm.s, "study duration")->required();
    };

    // estimate
    std::string input, out_path, mode_name = "est-both", lifetime = "exponential";
    bool drop_invalid = false;
    double grid_step = 0.25, theta = 0.0, vartheta = 0.0;
    int reps = 1000;
    std::uint64_t seed = 0;
    long latent_n = 0;
    std::vector<double> levels = {0.90, 0.95, 0.99};

    CLI::App* cest = app.add_subcommand("estimate", "fit the model to a CSV sample");
    add_model_flags(cest);
    cest->add_option("--input", input, "CSV file with header x,t")->required();
    cest->add_flag("--drop-invalid", drop_invalid, "drop rows outside the support");

    CLI::App* ctest = app.add_subcommand("test", "run the full goodness-of-fit test");
    add_model_flags(ctest);
    ctest->add_option("--input", input)->required();
    ctest->add_option("--grid-step", grid_step, "critical-value grid step")->default_val(0.25);
    ctest->add_option("--reps", reps, "critical-value replications")->default_val(1000);
    ctest->add_option("--seed", seed, "RNG seed (required for reproducibility)")->required();
    ctest->add_option("--levels", levels, "confidence levels")->delimiter(',');
    ctest->add_option("--mode", mode_name,
                      "limit process: known-both | est-theta | known-theta | est-both");
    ctest->add_option("--out", out_path, "write a JSON report here");
    ctest->add_flag("--drop-invalid", drop_invalid);

    CLI::App* csim = app.add_subcommand("simulate", "write a synthetic truncated sample");
    add_model_flags(csim);
    csim->add_option("--theta", theta)->required();
    csim->add_option("--vartheta", vartheta)->default_val(0.0);
    csim->add_option("--latent-n", latent_n)->required()->check(CLI::PositiveNumber);
    csim->add_option("--seed", seed)->required();
    csim->add_option("--lifetime", lifetime, "exponential | weibull2");
    csim->add_option("--out", out_path, "CSV output path")->required();

    CLI::App* ccv = app.add_subcommand("critval", "critical values without data");
    add_model_flags(ccv);
    ccv->add_option("--theta", theta)->required();
    ccv->add_option("--vartheta", vartheta)->default_val(0.0);
    ccv->add_option("--grid-step", grid_step)->default_val(0.25);
    ccv->add_option("--reps", reps)->default_val(1000);
    ccv->add_option("--seed", seed)->required();
    ccv->add_option("--levels", levels)->delimiter(',');
    ccv->add_option("--mode", mode_name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (threads > 0) dtks::set_thread_count(threads);

    try {
        if (app.got_subcommand(cest)) return run_estimate(input, cm, drop_invalid);
        if (app.got_subcommand(ctest)) {
            return run_test(input, cm, grid_step, reps, seed, levels, mode_name, out_path,
                            drop_invalid);
        }
        if (app.got_subcommand(csim)) {
            return run_simulate(cm, theta, vartheta, latent_n, seed, lifetime, out_path);
        }
        if (app.got_subcommand(ccv)) {
            return run_critval(cm, theta, vartheta, grid_step, reps, seed, levels, mode_name);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
