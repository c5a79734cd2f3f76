#include "mdx/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdx/assumptions.hpp"
#include "mdx/config.hpp"
#include "mdx/report.hpp"

namespace mdx {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::string format = "json";
};

struct SaddleFlags {
    std::string matrix;
    std::vector<double> q;
    std::optional<int> trials;
};

void add_common(CLI::App* sub, CommonFlags& f, bool mc_flags) {
    sub->add_option("--config", f.config, "Run configuration (JSON)");
    sub->add_option("--out", f.out_dir, "Directory for result files");
    sub->add_option("--format", f.format, "Standard output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", f.seed, mc_flags ? "Master seed" : "Seed");
    if (mc_flags) sub->add_option("--samples", f.samples, "Monte Carlo sample count");
}

RunConfig load(const CommonFlags& f) {
    if (f.config.empty()) throw ConfigError("--config", "a configuration file is required");
    RunConfig cfg = load_config_file(f.config);
    if (f.seed) {
        cfg.mc.seed = *f.seed;
        cfg.raw["mc"]["seed"] = *f.seed;
    }
    if (f.samples) {
        if (*f.samples < 1) throw ConfigError("--samples", "must be at least 1");
        cfg.mc.samples = *f.samples;
        cfg.raw["mc"]["samples"] = *f.samples;
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream o(path);
    if (!o) throw ConfigError("--out", "cannot write " + path.string());
    o << text;
}

void emit(const CommonFlags& f, std::ostream& out, const std::string& name, const json& summary,
          const std::string& csv_name = "", const std::string& csv = "") {
    if (!f.out_dir.empty()) {
        fs::create_directories(f.out_dir);
        write_file(fs::path(f.out_dir) / (name + ".json"), summary.dump(2) + "\n");
        if (!csv_name.empty()) write_file(fs::path(f.out_dir) / csv_name, csv);
    }
    if (f.format == "csv" && !csv_name.empty()) {
        out << csv;
    } else {
        out << summary.dump(2) << '\n';
    }
}

json grid_summary(const RunConfig& cfg) {
    const DomainGrid& g = *cfg.grid;
    Point lo = g.points().front();
    Point hi = lo;
    for (const Point& p : g.points()) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    return json{{"size", g.size()}, {"lo", lo}, {"hi", hi}, {"description", g.description()},
                {"excluded_degenerate_points", cfg.excluded_points}};
}

int cmd_rate(const CommonFlags& f, std::ostream& out) {
    const RunConfig cfg = load(f);
    validate_for_rate(cfg, false);
    const RateResult r = rate_over_domain(*cfg.model, *cfg.drift, cfg.q, *cfg.u, *cfg.grid, cfg.rate);
    json summary{{"command", "rate"}, {"result", to_json(r)}, {"grid", grid_summary(cfg)},
                 {"config", cfg.raw}};
    emit(f, out, "rate", summary, "rate_points.csv", per_point_csv(r));
    return kOk;
}

int cmd_check(const CommonFlags& f, std::ostream& out) {
    const RunConfig cfg = load(f);
    if (!cfg.model) throw ConfigError("model", "missing required section");
    if (!cfg.grid) throw ConfigError("grid", "missing required section");
    const A1Report a1 = check_a1(*cfg.model, *cfg.grid, cfg.delta);
    bool pass = a1.pass;
    json summary{{"command", "check"},
                 {"a1", to_json(a1)},
                 {"a2", to_json(a2_tail_heuristic(*cfg.model, *cfg.drift, *cfg.grid))},
                 {"grid", grid_summary(cfg)},
                 {"config", cfg.raw}};
    if (cfg.q.size() > 0) {
        const double u0 = threshold_u0(*cfg.drift, cfg.q, *cfg.grid);
        json thr{{"u0", u0}};
        if (cfg.u) {
            const bool ok = check_threshold(*cfg.drift, cfg.q, *cfg.u, *cfg.grid);
            thr["u"] = *cfg.u;
            thr["pass"] = ok;
            pass = pass && ok;
        }
        summary["threshold"] = thr;
    }
    summary["pass"] = pass;
    emit(f, out, "check", summary);
    return pass ? kOk : kCheckFailed;
}

int cmd_saddle(const CommonFlags& f, const SaddleFlags& s, std::ostream& out) {
    SaddleConfig sc;
    json raw;
    if (!f.config.empty()) {
        const RunConfig cfg = load(f);
        if (!cfg.saddle) throw ConfigError("saddle", "missing required section");
        sc = *cfg.saddle;
        raw = cfg.raw;
    }
    if (!s.matrix.empty()) {
        std::ifstream in(s.matrix);
        if (!in) throw ConfigError("--matrix", "cannot open " + s.matrix);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ConfigError("--matrix", std::string("malformed JSON: ") + e.what());
        }
        if (j.is_object()) {
            sc.A = SymMatrix(parse_matrix(j.at("A"), "--matrix.A"));
            if (j.contains("q")) sc.q = parse_vector(j.at("q"), "--matrix.q");
        } else {
            sc.A = SymMatrix(parse_matrix(j, "--matrix"));
        }
    }
    if (!s.q.empty()) sc.q = Eigen::Map<const Vector>(s.q.data(), static_cast<Eigen::Index>(s.q.size()));
    if (s.trials) sc.trials = *s.trials;
    if (f.seed) sc.seed = *f.seed;
    if (sc.A.dim() == 0) throw ConfigError("--matrix", "a matrix is required (--matrix or saddle.A)");
    if (sc.q.size() != sc.A.dim()) throw ConfigError("--q", "length must match the matrix dimension");
    if ((sc.q.array() <= 0.0).any()) throw ConfigError("--q", "entries must be strictly positive");
    if (sc.trials < 0) throw ConfigError("--trials", "must be nonnegative");

    const SaddleReport r = verify_saddle(sc.A, sc.q, sc.trials, sc.seed);
    raw["saddle"] = json{{"A", json::array()}, {"q", to_json(sc.q)}, {"trials", sc.trials}, {"seed", sc.seed}};
    for (Eigen::Index i = 0; i < sc.A.dim(); ++i) raw["saddle"]["A"].push_back(to_json(Vector(sc.A.matrix().row(i).transpose())));
    json summary{{"command", "saddle"}, {"result", to_json(r)}, {"holds", r.holds()}, {"config", raw}};
    emit(f, out, "saddle", summary);
    return r.holds() ? kOk : kNumericalFailure;
}

int cmd_simulate(const CommonFlags& f, std::ostream& out) {
    const RunConfig cfg = load(f);
    validate_for_rate(cfg, false);
    RateOptions ro = cfg.rate;
    ro.per_point = false;
    ro.refine = false;
    const RateResult rate = rate_over_domain(*cfg.model, *cfg.drift, cfg.q, *cfg.u, *cfg.grid, ro);
    const McEstimate e = cfg.estimator == Estimator::Crude
                             ? estimate_crude(*cfg.model, *cfg.drift, cfg.q, *cfg.u, *cfg.grid, cfg.mc)
                             : estimate_is(*cfg.model, *cfg.drift, cfg.q, *cfg.u, *cfg.grid, cfg.mc, rate);
    json summary{{"command", "simulate"},
                 {"estimate", to_json(e)},
                 {"u", *cfg.u},
                 {"m_of_u_T", rate.m_of_u_T},
                 {"argmin", rate.argmin_t},
                 {"grid", grid_summary(cfg)},
                 {"config", cfg.raw}};
    if (e.p_hat > 0.0) {
        summary["neg_log_p"] = -std::log(e.p_hat);
        summary["ratio"] = -std::log(e.p_hat) / rate.m_of_u_T;
    } else {
        summary["neg_log_p"] = nullptr;
        summary["ratio"] = nullptr;
    }
    emit(f, out, "simulate", summary);
    return kOk;
}

int cmd_sweep(const CommonFlags& f, std::ostream& out) {
    const RunConfig cfg = load(f);
    validate_for_rate(cfg, true);
    const auto rows = sweep(*cfg.model, *cfg.drift, cfg.q, cfg.u_list, *cfg.grid, cfg.mc, cfg.estimator);
    json jrows = json::array();
    for (const SweepRow& r : rows) jrows.push_back(to_json(r));
    json summary{{"command", "sweep"},
                 {"estimator", to_string(cfg.estimator)},
                 {"seed", cfg.mc.seed},
                 {"samples", cfg.mc.samples},
                 {"rows", jrows},
                 {"grid", grid_summary(cfg)},
                 {"config", cfg.raw}};
    emit(f, out, "sweep", summary, "sweep.csv", sweep_csv(rows));
    return kOk;
}

int cmd_regvar(const CommonFlags& f, std::ostream& out) {
    const RunConfig cfg = load(f);
    if (!cfg.regvar) throw ConfigError("regvar", "missing required section");
    const RegVarResult r = regvar_J(*cfg.regvar, cfg.t_search);

    std::function<double(double)> sigma1_sq;
    std::string sigma_source;
    if (cfg.raw.at("regvar").contains("sigma1")) {
        const ScalarKernel k = parse_kernel(cfg.raw.at("regvar").at("sigma1"), "regvar.sigma1");
        sigma1_sq = [k](double u) { return k.variance(u); };
        sigma_source = k.describe();
    } else if (cfg.model && !cfg.model->components().empty()) {
        const ScalarKernel k = cfg.model->components().front();
        sigma1_sq = [k](double u) { return k.variance(u); };
        sigma_source = k.describe() + " (model component 1)";
    } else {
        const double a = cfg.regvar->alpha(0);
        sigma1_sq = [a](double u) { return std::pow(u, a); };
        sigma_source = "u^alpha_1";
    }
    std::vector<double> us = cfg.u_list;
    if (cfg.u) us.insert(us.begin(), *cfg.u);
    json asym = json::array();
    for (double u : us) {
        asym.push_back({{"u", u}, {"value", regvar_asymptotic(u, sigma1_sq, r.J)}});
    }
    json summary{{"command", "regvar"}, {"result", to_json(r)}, {"J", r.J}, {"t_star", r.t_star},
                 {"sigma1_sq", sigma_source}, {"asymptotic", asym}, {"config", cfg.raw}};
    emit(f, out, "regvar", summary);
    return r.attained ? kOk : kNumericalFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Logarithmic decay rates of multidimensional Gaussian exceedance probabilities", "mdx"};
    app.require_subcommand(1);

    CommonFlags flags;
    SaddleFlags saddle;
    auto* rate = app.add_subcommand("rate", "Decay rate M(u;T) over the configured grid");
    auto* check = app.add_subcommand("check", "Partial-correlation and threshold checks");
    auto* sad = app.add_subcommand("saddle", "Verify the quadrant saddle-point equality for a matrix");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the exceedance probability");
    auto* swp = app.add_subcommand("sweep", "Monte Carlo ratio -log P / M(u;T) over u_list");
    auto* reg = app.add_subcommand("regvar", "Constant J of the regularly varying case");
    add_common(rate, flags, false);
    add_common(check, flags, false);
    add_common(sad, flags, false);
    add_common(sim, flags, true);
    add_common(swp, flags, true);
    add_common(reg, flags, false);
    sad->add_option("--matrix", saddle.matrix, "JSON file with a matrix or {\"A\": ..., \"q\": ...}");
    sad->add_option("--q", saddle.q, "Threshold vector")->delimiter(',');
    sad->add_option("--trials", saddle.trials, "Random dual weights to sample");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (rate->parsed()) return cmd_rate(flags, out);
        if (check->parsed()) return cmd_check(flags, out);
        if (sad->parsed()) return cmd_saddle(flags, saddle, out);
        if (sim->parsed()) return cmd_simulate(flags, out);
        if (swp->parsed()) return cmd_sweep(flags, out);
        if (reg->parsed()) return cmd_regvar(flags, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}

}  // namespace mdx
