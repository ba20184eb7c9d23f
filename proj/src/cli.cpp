#include "cac/cli.hpp"

#include "cac/io.hpp"
#include "cac/logspace.hpp"
#include "cac/rank.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

namespace cac {

namespace {

struct ExperimentFlags {
    std::string config_path;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    bool shared = false;
    std::string out;
    std::string format;
    std::optional<double> rel_tol;
    std::string distribution;
    std::string rank_method;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> n, m, l1, l2, z, p, r, lemma;
    std::vector<std::size_t> ranks;
};

struct InputFlags {
    std::string config_path;
    std::string out;
    std::optional<std::size_t> y;
    bool log_space = false;
};

void add_experiment_flags(CLI::App* sub, ExperimentFlags& f, std::string_view kind) {
    sub->add_option("--config", f.config_path, "JSON experiment config");
    sub->add_option("--trials", f.trials, "number of trials");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_flag("--shared", f.shared, "use the shared variant");
    sub->add_option("--out", f.out, "report path (without --format: <out>.json and <out>.csv)");
    sub->add_option("--format", f.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--rel-tol", f.rel_tol, "relative rank tolerance");
    sub->add_option("--distribution", f.distribution, "weight distribution")
        ->check(CLI::IsMember({"normal", "uniform", "uniform_positive"}));
    if (kind == "rank" || kind == "generalized") {
        sub->add_option("--rank-method", f.rank_method, "numerical (SVD) or exact (modular row reduction)")
            ->check(CLI::IsMember({"numerical", "exact"}));
    }
    sub->add_option("--threads", f.threads, "worker threads (0 = hardware concurrency)");
    sub->add_option("-N,--modes", f.n, kind == "lemma" ? "matrix columns" : "tensor order N");
    sub->add_option("-M,--mode-dim", f.m, kind == "lemma" ? "matrix rows" : "mode dimension M");
    if (kind != "lemma") sub->add_option("--ranks", f.ranks, "ranks r_0 ..")->delimiter(',');
    if (kind == "generalized") {
        sub->add_option("--l1", f.l1, "levels of the generating decomposition");
        sub->add_option("--l2", f.l2, "levels of the competing decomposition");
    }
    if (kind == "approx") sub->add_option("--z", f.z, "rank of the CP competitor");
    if (kind == "lemma") {
        sub->add_option("--lemma", f.lemma, "1 or 2")->check(CLI::IsMember({1, 2}));
        sub->add_option("--p", f.p, "lemma 2: number of fixed matrices");
        sub->add_option("--r", f.r, "lemma 2: rank of each fixed matrix");
    }
}

ExperimentConfig build_config(const ExperimentFlags& f, ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    if (!f.config_path.empty()) {
        const json j = read_json_file(f.config_path);
        cfg = config_from_json(j, cfg);
        const bool lemma_cmd = kind == ExperimentKind::lemma1 || kind == ExperimentKind::lemma2;
        const bool lemma_cfg = cfg.kind == ExperimentKind::lemma1 || cfg.kind == ExperimentKind::lemma2;
        if (cfg.kind != kind && !(lemma_cmd && lemma_cfg)) {
            throw ConfigError("experiment", "'" + std::string(to_string(cfg.kind)) +
                                                "' does not match the subcommand");
        }
    }
    if (f.lemma) cfg.kind = *f.lemma == 1 ? ExperimentKind::lemma1 : ExperimentKind::lemma2;
    if (f.trials) cfg.trials = *f.trials;
    if (f.seed) cfg.seed = *f.seed;
    if (f.shared) cfg.shared = true;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.format.empty()) cfg.format = f.format;
    if (f.rel_tol) cfg.rank_policy.rel_tol = *f.rel_tol;
    if (!f.distribution.empty()) cfg.distribution = parse_distribution(f.distribution);
    if (!f.rank_method.empty()) cfg.rank_method = parse_rank_method(f.rank_method);
    if (f.threads) cfg.threads = *f.threads;
    if (f.n) cfg.n = *f.n;
    if (f.m) cfg.m = *f.m;
    if (!f.ranks.empty()) cfg.ranks = f.ranks;
    if (f.l1) cfg.l1 = *f.l1;
    if (f.l2) cfg.l2 = *f.l2;
    if (f.z) cfg.z = *f.z;
    if (f.p) cfg.mixtures = *f.p;
    if (f.r) cfg.target_rank = *f.r;
    validate(cfg);
    return cfg;
}

std::string strip_extension(const std::string& path) {
    for (const char* ext : {".json", ".csv"}) {
        const std::string e(ext);
        if (path.size() > e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0) {
            return path.substr(0, path.size() - e.size());
        }
    }
    return path;
}

int run_experiment_command(const ExperimentFlags& f, ExperimentKind kind, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = build_config(f, kind);
    const ExperimentReport report = run_experiment(cfg);
    const std::string json_text = report_to_json(report).dump(2) + "\n";

    if (cfg.out.empty()) {
        if (cfg.format == "csv") {
            out << report_to_csv(report);
        } else {
            out << json_text;
        }
    } else if (cfg.format == "json") {
        write_text_file(cfg.out, json_text);
    } else if (cfg.format == "csv") {
        write_text_file(cfg.out, report_to_csv(report));
    } else {
        const std::string base = strip_extension(cfg.out);
        write_text_file(base + ".json", json_text);
        write_text_file(base + ".csv", report_to_csv(report));
    }

    for (const auto& r : report.records) {
        if (!r.pass) {
            err << "trial " << r.trial << " failed: seed " << r.seed << ", observed rank " << r.observed_rank
                << ", bound " << r.bound << "\n";
        }
    }
    err << to_string(cfg.kind) << ": " << report.records.size() << " trials, " << report.failures << " failures (allowed "
        << cfg.failure_allowance() << "), " << report.vacuous << " vacuous, observed rank "
        << report.min_observed_rank << ".." << report.max_observed_rank << ", bound " << theoretical_bound(cfg)
        << "\n";
    return report.within_allowance() ? kExitOk : kExitFailures;
}

void emit(const json& j, const std::string& path, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        out << text;
    } else {
        write_text_file(path, text);
    }
}

json load_input(const InputFlags& f) {
    if (f.config_path.empty()) throw ConfigError("", "--config is required");
    const json j = read_json_file(f.config_path);
    if (!j.is_object()) throw ConfigError("", "input must be a JSON object");
    if (!j.contains("decomposition")) throw ConfigError("decomposition", "missing");
    return j;
}

int run_reconstruct(const InputFlags& f, std::ostream& out) {
    const json input = load_input(f);
    const Decomposition d = decomposition_from_json(input["decomposition"]);
    std::vector<std::size_t> classes;
    if (f.y) {
        if (*f.y >= n_classes(d)) {
            throw ConfigError("class", "class " + std::to_string(*f.y) + " out of range (" +
                                           std::to_string(n_classes(d)) + " classes)");
        }
        classes.push_back(*f.y);
    } else {
        for (std::size_t y = 0; y < n_classes(d); ++y) classes.push_back(y);
    }
    json tensors = json::array();
    for (std::size_t y : classes) {
        const DenseTensor t = reconstruct(d, y);
        json entry{{"class", y}, {"tensor", tensor_to_json(t)}};
        if (t.order() % 2 == 0) entry["matricization_rank"] = cp_rank_lower_bound(t);
        tensors.push_back(std::move(entry));
    }
    emit(json{{"schema_version", kSchemaVersion}, {"param_count", param_count(d)}, {"tensors", tensors}}, f.out, out);
    return kExitOk;
}

int run_forward(const InputFlags& f, std::ostream& out) {
    const json input = load_input(f);
    const Decomposition d = decomposition_from_json(input["decomposition"]);
    std::optional<RepGrid> grid;
    if (input.contains("grid")) {
        grid = grid_from_json(input["grid"]);
    } else if (input.contains("representation") && input.contains("instance")) {
        const auto family = family_from_json(input["representation"]);
        const auto instance = instance_from_json(input["instance"]);
        try {
            grid = representation_layer(instance, family);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("instance", e.what());
        }
    } else {
        throw ConfigError("grid", "missing (give \"grid\" or \"representation\" and \"instance\")");
    }

    json result{{"schema_version", kSchemaVersion}};
    if (f.log_space) {
        const auto scores = logspace_forward(d, *grid);
        result["log_scores"] = scores;
        result["predicted_class"] = classify(scores);
    } else {
        const auto scores = forward(d, *grid);
        result["scores"] = scores;
        result["predicted_class"] = classify(scores);
    }
    emit(result, f.out, out);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tensor decompositions, arithmetic circuits and depth-separation experiments", "cac-harness"};
    app.require_subcommand(1);

    InputFlags recon_flags;
    auto* recon = app.add_subcommand("reconstruct", "reconstruct the class tensors of a decomposition");
    recon->add_option("--config", recon_flags.config_path, "JSON file with a \"decomposition\" entry")->required();
    recon->add_option("--class", recon_flags.y, "class index (0-based); default all");
    recon->add_option("--out", recon_flags.out, "output path; default stdout");

    InputFlags fwd_flags;
    auto* fwd = app.add_subcommand("forward", "evaluate the network scores of a decomposition");
    fwd->add_option("--config", fwd_flags.config_path,
                    "JSON file with \"decomposition\" and \"grid\" or \"representation\" + \"instance\"")
        ->required();
    fwd->add_flag("--log-space", fwd_flags.log_space, "evaluate in log-space");
    fwd->add_option("--out", fwd_flags.out, "output path; default stdout");

    ExperimentFlags rank_flags, gen_flags, gap_flags, lemma_flags;
    auto* rank_cmd = app.add_subcommand("rank-experiment", "HT tensors vs the CP rank bound");
    add_experiment_flags(rank_cmd, rank_flags, "rank");
    auto* gen_cmd = app.add_subcommand("generalized-experiment", "L1-level vs L2-level truncated HT");
    add_experiment_flags(gen_cmd, gen_flags, "generalized");
    auto* gap_cmd = app.add_subcommand("approx-gap", "distance from HT matricizations to rank-Z matrices");
    add_experiment_flags(gap_cmd, gap_flags, "approx");
    auto* lemma_cmd = app.add_subcommand("lemma-check", "rank of random matrix products and mixtures");
    add_experiment_flags(lemma_cmd, lemma_flags, "lemma");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*recon) return run_reconstruct(recon_flags, out);
        if (*fwd) return run_forward(fwd_flags, out);
        if (*rank_cmd) return run_experiment_command(rank_flags, ExperimentKind::rank_separation, out, err);
        if (*gen_cmd) return run_experiment_command(gen_flags, ExperimentKind::generalized, out, err);
        if (*gap_cmd) return run_experiment_command(gap_flags, ExperimentKind::approx_gap, out, err);
        if (*lemma_cmd) return run_experiment_command(lemma_flags, ExperimentKind::lemma1, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace cac
