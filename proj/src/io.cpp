#include "cac/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cac {

namespace {

std::string sub(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(sub(where, key), "missing");
    return *it;
}

std::size_t as_size(const json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() >= 0) return static_cast<std::size_t>(j.get<std::int64_t>());
        throw ConfigError(field, "must be non-negative, got " + j.dump());
    }
    throw ConfigError(field, "expected a non-negative integer, got " + j.dump());
}

std::uint64_t as_u64(const json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    throw ConfigError(field, "expected an unsigned 64-bit integer, got " + j.dump());
}

double as_double(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    throw ConfigError(field, "expected a number, got " + j.dump());
}

bool as_bool(const json& j, const std::string& field) {
    if (j.is_boolean()) return j.get<bool>();
    throw ConfigError(field, "expected true or false, got " + j.dump());
}

std::string as_string(const json& j, const std::string& field) {
    if (j.is_string()) return j.get<std::string>();
    throw ConfigError(field, "expected a string, got " + j.dump());
}

std::vector<double> as_doubles(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_double(j[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

std::vector<std::size_t> as_sizes(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "expected an array of non-negative integers");
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_size(j[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

// Runs `build`, turning constructor argument errors into ConfigError at `where`.
template <class F>
auto checked(const std::string& where, F&& build) {
    try {
        return build();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(where, e.what());
    }
}

}  // namespace

Activation parse_activation(std::string_view name) {
    if (name == "threshold") return Activation::threshold;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("unknown activation '" + std::string(name) +
                                "' (expected threshold, relu or sigmoid)");
}

// ---------------------------------------------------------------- tensors

json tensor_to_json(const DenseTensor& t) {
    const auto data = t.data();
    return json{{"shape", t.shape().dims()}, {"data", std::vector<double>(data.begin(), data.end())}};
}

DenseTensor tensor_from_json(const json& j, const std::string& where) {
    auto dims = as_sizes(require(j, "shape", where), sub(where, "shape"));
    auto data = as_doubles(require(j, "data", where), sub(where, "data"));
    return checked(where, [&] { return DenseTensor(Shape(std::move(dims)), std::move(data)); });
}

// ---------------------------------------------------------------- decompositions

json decomposition_to_json(const Decomposition& d) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (const auto* cp = std::get_if<CpDecomposition>(&d)) {
        j["kind"] = "cp";
        j["n_modes"] = cp->n_modes();
        j["mode_dim"] = cp->mode_dim();
        j["n_classes"] = cp->n_classes();
        j["n_terms"] = cp->n_terms();
        j["shared"] = cp->shared();
        j["class_weights"] = cp->class_weight_data();
        j["factors"] = cp->factor_data();
        return j;
    }
    const auto& ht = std::get<HtDecomposition>(d);
    j["kind"] = "ht";
    j["n_modes"] = ht.n_modes();
    j["mode_dim"] = ht.mode_dim();
    j["n_classes"] = ht.n_classes();
    j["ranks"] = ht.ranks();
    j["shared"] = ht.shared();
    j["leaves"] = ht.leaf_data();
    j["level_weights"] = ht.level_data();
    j["top_weights"] = ht.top_data();
    return j;
}

Decomposition decomposition_from_json(const json& j, const std::string& where) {
    const std::string kind = as_string(require(j, "kind", where), sub(where, "kind"));
    const std::size_t n = as_size(require(j, "n_modes", where), sub(where, "n_modes"));
    const std::size_t m = as_size(require(j, "mode_dim", where), sub(where, "mode_dim"));
    const std::size_t y = j.contains("n_classes") ? as_size(j["n_classes"], sub(where, "n_classes")) : 1;
    const bool shared = j.contains("shared") ? as_bool(j["shared"], sub(where, "shared")) : false;

    if (j.contains("random")) {
        const std::string rw = sub(where, "random");
        const json& r = j["random"];
        const std::uint64_t seed = as_u64(require(r, "seed", rw), sub(rw, "seed"));
        Distribution dist = Distribution::normal;
        if (r.contains("distribution")) {
            dist = checked(sub(rw, "distribution"),
                           [&] { return parse_distribution(as_string(r["distribution"], sub(rw, "distribution"))); });
        }
        if (kind == "cp") {
            const std::size_t z = as_size(require(j, "n_terms", where), sub(where, "n_terms"));
            return checked(where, [&] { return Decomposition(sample_cp(CpSizes{n, m, z, y}, shared, seed, dist)); });
        }
        if (kind == "ht") {
            auto ranks = as_sizes(require(j, "ranks", where), sub(where, "ranks"));
            return checked(where,
                           [&] { return Decomposition(sample_ht(HtSizes{n, m, ranks, y}, shared, seed, dist)); });
        }
        throw ConfigError(sub(where, "kind"), "expected \"cp\" or \"ht\", got \"" + kind + "\"");
    }

    if (kind == "cp") {
        const std::size_t z = as_size(require(j, "n_terms", where), sub(where, "n_terms"));
        auto weights = as_doubles(require(j, "class_weights", where), sub(where, "class_weights"));
        auto factors = as_doubles(require(j, "factors", where), sub(where, "factors"));
        return checked(where, [&] {
            return Decomposition(CpDecomposition(CpSizes{n, m, z, y}, shared, std::move(weights), std::move(factors)));
        });
    }
    if (kind == "ht") {
        auto ranks = as_sizes(require(j, "ranks", where), sub(where, "ranks"));
        auto leaves = as_doubles(require(j, "leaves", where), sub(where, "leaves"));
        const json& lw = require(j, "level_weights", where);
        if (!lw.is_array()) throw ConfigError(sub(where, "level_weights"), "expected an array of arrays");
        std::vector<std::vector<double>> levels;
        for (std::size_t k = 0; k < lw.size(); ++k) {
            levels.push_back(as_doubles(lw[k], sub(where, "level_weights") + "[" + std::to_string(k) + "]"));
        }
        auto top = as_doubles(require(j, "top_weights", where), sub(where, "top_weights"));
        return checked(where, [&] {
            return Decomposition(HtDecomposition(HtSizes{n, m, std::move(ranks), y}, shared, std::move(leaves),
                                                 std::move(levels), std::move(top)));
        });
    }
    throw ConfigError(sub(where, "kind"), "expected \"cp\" or \"ht\", got \"" + kind + "\"");
}

// ---------------------------------------------------------------- grids and representations

json grid_to_json(const RepGrid& g) {
    json values = json::array();
    for (std::size_t d = 0; d < g.channels(); ++d) {
        std::vector<double> row(g.positions());
        for (std::size_t i = 0; i < g.positions(); ++i) row[i] = g(d, i);
        values.push_back(row);
    }
    return json{{"channels", g.channels()}, {"positions", g.positions()}, {"values", values}};
}

RepGrid grid_from_json(const json& j, const std::string& where) {
    const json& values = require(j, "values", where);
    if (!values.is_array() || values.empty()) throw ConfigError(sub(where, "values"), "expected a non-empty array of rows");
    const std::size_t channels = values.size();
    std::vector<double> flat;
    std::size_t positions = 0;
    for (std::size_t d = 0; d < channels; ++d) {
        const std::string field = sub(where, "values") + "[" + std::to_string(d) + "]";
        auto row = as_doubles(values[d], field);
        if (d == 0) positions = row.size();
        if (row.size() != positions) throw ConfigError(field, "every channel row must have the same length");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    if (j.contains("channels") && as_size(j["channels"], sub(where, "channels")) != channels) {
        throw ConfigError(sub(where, "channels"), "does not match the number of value rows");
    }
    if (j.contains("positions") && as_size(j["positions"], sub(where, "positions")) != positions) {
        throw ConfigError(sub(where, "positions"), "does not match the row length");
    }
    return checked(where, [&] { return RepGrid(channels, positions, std::move(flat)); });
}

RepresentationFamily family_from_json(const json& j, const std::string& where) {
    const std::string kind = as_string(require(j, "kind", where), sub(where, "kind"));
    const json& channels = require(j, "channels", where);
    if (!channels.is_array()) throw ConfigError(sub(where, "channels"), "expected an array");
    if (kind == "gaussian") {
        std::vector<GaussianChannel> out;
        for (std::size_t d = 0; d < channels.size(); ++d) {
            const std::string w = sub(where, "channels") + "[" + std::to_string(d) + "]";
            out.push_back(GaussianChannel{as_doubles(require(channels[d], "mean", w), sub(w, "mean")),
                                          as_doubles(require(channels[d], "variance", w), sub(w, "variance"))});
        }
        return checked(where, [&] { return RepresentationFamily::gaussian(std::move(out)); });
    }
    if (kind == "neuron") {
        const Activation act = checked(sub(where, "activation"), [&] {
            return parse_activation(as_string(require(j, "activation", where), sub(where, "activation")));
        });
        std::vector<NeuronChannel> out;
        for (std::size_t d = 0; d < channels.size(); ++d) {
            const std::string w = sub(where, "channels") + "[" + std::to_string(d) + "]";
            const double bias = channels[d].contains("bias") ? as_double(channels[d]["bias"], sub(w, "bias")) : 0.0;
            out.push_back(NeuronChannel{as_doubles(require(channels[d], "weights", w), sub(w, "weights")), bias});
        }
        return checked(where, [&] { return RepresentationFamily::neuron(std::move(out), act); });
    }
    throw ConfigError(sub(where, "kind"), "expected \"gaussian\" or \"neuron\", got \"" + kind + "\"");
}

Instance instance_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where, "expected an array of vectors");
    std::vector<std::vector<double>> vectors;
    for (std::size_t i = 0; i < j.size(); ++i) vectors.push_back(as_doubles(j[i], where + "[" + std::to_string(i) + "]"));
    return checked(where, [&] { return Instance(std::move(vectors)); });
}

// ---------------------------------------------------------------- configs

ExperimentConfig config_from_json(const json& j, ExperimentConfig cfg) {
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    static const std::set<std::string> known = {
        "schema_version", "experiment", "sizes",            "shared",  "trials",      "seed",
        "distribution",   "rel_tol",    "gap_floor_rel",    "allowed_failures", "threads", "max_entries",
        "out",            "format",     "rank_method"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError(key, "unknown field");
    }
    if (j.contains("schema_version")) {
        const std::size_t v = as_size(j["schema_version"], "schema_version");
        if (v != static_cast<std::size_t>(kSchemaVersion)) {
            throw ConfigError("schema_version", "unsupported version " + std::to_string(v) + " (expected " +
                                                    std::to_string(kSchemaVersion) + ")");
        }
    }
    if (j.contains("experiment")) cfg.kind = parse_experiment_kind(as_string(j["experiment"], "experiment"));
    if (j.contains("sizes")) {
        const json& s = j["sizes"];
        if (!s.is_object()) throw ConfigError("sizes", "expected an object");
        static const std::set<std::string> size_keys = {"N", "M", "ranks", "L1", "L2", "Z", "p", "r"};
        for (const auto& [key, value] : s.items()) {
            if (!size_keys.contains(key)) throw ConfigError("sizes." + key, "unknown field");
        }
        if (s.contains("N")) cfg.n = as_size(s["N"], "sizes.N");
        if (s.contains("M")) cfg.m = as_size(s["M"], "sizes.M");
        if (s.contains("ranks")) cfg.ranks = as_sizes(s["ranks"], "sizes.ranks");
        if (s.contains("L1")) cfg.l1 = as_size(s["L1"], "sizes.L1");
        if (s.contains("L2")) cfg.l2 = as_size(s["L2"], "sizes.L2");
        if (s.contains("Z")) cfg.z = as_size(s["Z"], "sizes.Z");
        if (s.contains("p")) cfg.mixtures = as_size(s["p"], "sizes.p");
        if (s.contains("r")) cfg.target_rank = as_size(s["r"], "sizes.r");
    }
    if (j.contains("shared")) cfg.shared = as_bool(j["shared"], "shared");
    if (j.contains("trials")) cfg.trials = as_size(j["trials"], "trials");
    if (j.contains("seed")) cfg.seed = as_u64(j["seed"], "seed");
    if (j.contains("distribution")) {
        cfg.distribution =
            checked("distribution", [&] { return parse_distribution(as_string(j["distribution"], "distribution")); });
    }
    if (j.contains("rel_tol")) cfg.rank_policy.rel_tol = as_double(j["rel_tol"], "rel_tol");
    if (j.contains("rank_method")) cfg.rank_method = parse_rank_method(as_string(j["rank_method"], "rank_method"));
    if (j.contains("gap_floor_rel")) cfg.gap_floor_rel = as_double(j["gap_floor_rel"], "gap_floor_rel");
    if (j.contains("allowed_failures")) {
        if (j["allowed_failures"].is_null()) {
            cfg.allowed_failures.reset();
        } else {
            cfg.allowed_failures = as_size(j["allowed_failures"], "allowed_failures");
        }
    }
    if (j.contains("threads")) cfg.threads = as_size(j["threads"], "threads");
    if (j.contains("max_entries")) cfg.max_entries = as_size(j["max_entries"], "max_entries");
    if (j.contains("out")) cfg.out = as_string(j["out"], "out");
    if (j.contains("format")) {
        cfg.format = as_string(j["format"], "format");
        if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format", "expected \"csv\" or \"json\"");
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json sizes;
    sizes["N"] = cfg.n;
    sizes["M"] = cfg.m;
    switch (cfg.kind) {
        case ExperimentKind::rank_separation: sizes["ranks"] = cfg.ranks; break;
        case ExperimentKind::generalized:
            sizes["ranks"] = cfg.ranks;
            sizes["L1"] = cfg.l1;
            sizes["L2"] = cfg.l2;
            break;
        case ExperimentKind::approx_gap:
            sizes["ranks"] = cfg.ranks;
            sizes["Z"] = cfg.z;
            break;
        case ExperimentKind::lemma1: break;
        case ExperimentKind::lemma2:
            sizes["p"] = cfg.mixtures;
            sizes["r"] = cfg.target_rank;
            break;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["experiment"] = std::string(to_string(cfg.kind));
    j["sizes"] = sizes;
    j["shared"] = cfg.shared;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["distribution"] = std::string(to_string(cfg.distribution));
    j["rel_tol"] = cfg.rank_policy.rel_tol;
    j["rank_method"] = std::string(to_string(cfg.rank_method));
    j["gap_floor_rel"] = cfg.gap_floor_rel;
    j["allowed_failures"] = cfg.failure_allowance();
    j["max_entries"] = cfg.max_entries;
    return j;
}

// ---------------------------------------------------------------- reports

json report_to_json(const ExperimentReport& report) {
    json records = json::array();
    json failed_seeds = json::array();
    for (const auto& r : report.records) {
        json rec;
        rec["trial"] = r.trial;
        rec["seed"] = r.seed;
        rec["observed_rank"] = r.observed_rank;
        rec["bound"] = r.bound;
        rec["residual"] = r.residual ? json(*r.residual) : json(nullptr);
        rec["sigma_next"] = r.sigma_next ? json(*r.sigma_next) : json(nullptr);
        rec["pass"] = r.pass;
        rec["vacuous"] = r.vacuous;
        records.push_back(std::move(rec));
        if (!r.pass) failed_seeds.push_back(json{{"trial", r.trial}, {"seed", r.seed}});
    }
    json aggregate;
    aggregate["trials"] = report.records.size();
    aggregate["failures"] = report.failures;
    aggregate["allowed_failures"] = report.config.failure_allowance();
    aggregate["within_allowance"] = report.within_allowance();
    aggregate["vacuous"] = report.vacuous;
    aggregate["bound"] = report.records.empty() ? 0 : report.records.front().bound;
    aggregate["min_observed_rank"] = report.min_observed_rank;
    aggregate["max_observed_rank"] = report.max_observed_rank;
    aggregate["failed_trials"] = failed_seeds;
    aggregate["wall_time_seconds"] = report.wall_time_seconds;

    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config_to_json(report.config);
    j["aggregate"] = aggregate;
    j["records"] = records;
    return j;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "trial,seed,observed_rank,bound,residual,pass\n";
    char buf[64];
    for (const auto& r : report.records) {
        os << r.trial << ',' << r.seed << ',' << r.observed_rank << ',' << r.bound << ',';
        if (r.residual) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.residual);
            os << buf;
        }
        os << ',' << (r.pass ? "true" : "false") << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------- files

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace cac
