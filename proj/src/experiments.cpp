#include "cac/experiments.hpp"

#include "cac/decompositions.hpp"
#include "cac/exact_rank.hpp"
#include "cac/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace cac {

ExperimentKind parse_experiment_kind(std::string_view name) {
    if (name == "rank-separation") return ExperimentKind::rank_separation;
    if (name == "generalized") return ExperimentKind::generalized;
    if (name == "approx-gap") return ExperimentKind::approx_gap;
    if (name == "lemma1") return ExperimentKind::lemma1;
    if (name == "lemma2") return ExperimentKind::lemma2;
    throw ConfigError("experiment", "unknown experiment kind '" + std::string(name) +
                                        "' (expected rank-separation, generalized, approx-gap, lemma1 or lemma2)");
}

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::rank_separation: return "rank-separation";
        case ExperimentKind::generalized: return "generalized";
        case ExperimentKind::approx_gap: return "approx-gap";
        case ExperimentKind::lemma1: return "lemma1";
        case ExperimentKind::lemma2: return "lemma2";
    }
    return "rank-separation";
}

RankMethod parse_rank_method(std::string_view name) {
    if (name == "numerical") return RankMethod::numerical;
    if (name == "exact") return RankMethod::exact;
    throw ConfigError("rank_method", "unknown rank method '" + std::string(name) + "' (expected numerical or exact)");
}

std::string_view to_string(RankMethod method) {
    return method == RankMethod::exact ? "exact" : "numerical";
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t out = 1;
    for (std::size_t k = 0; k < exp; ++k) out *= base;
    return out;
}

std::size_t log2_or_throw(std::size_t n) {
    try {
        return checked_log2(n);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("sizes.N", e.what());
    }
}

void check_ranks(const ExperimentConfig& cfg, std::size_t expected) {
    if (cfg.ranks.size() != expected) {
        throw ConfigError("sizes.ranks", "expected " + std::to_string(expected) + " ranks, got " +
                                             std::to_string(cfg.ranks.size()));
    }
    for (std::size_t r : cfg.ranks) {
        if (r == 0) throw ConfigError("sizes.ranks", "every rank must be at least 1");
    }
}

void check_capacity(const ExperimentConfig& cfg) {
    double entries = 1.0;
    for (std::size_t k = 0; k < cfg.n; ++k) entries *= static_cast<double>(cfg.m);
    if (entries > static_cast<double>(cfg.max_entries)) {
        throw ConfigError("sizes", "reconstructed tensor would have " + std::to_string(cfg.m) + "^" +
                                       std::to_string(cfg.n) + " = " + std::to_string(entries) +
                                       " entries, above the cap of " + std::to_string(cfg.max_entries));
    }
}

HtSizes ht_sizes(const ExperimentConfig& cfg) { return HtSizes{cfg.n, cfg.m, cfg.ranks, 1}; }

// Row-major M x N matrix of i.i.d. draws.
Matrix random_matrix(std::size_t rows, std::size_t cols, Sampler& draw) {
    Matrix out(rows, cols);
    for (double& v : out.data()) v = draw();
    return out;
}

ExperimentReport assemble(const ExperimentConfig& cfg, std::vector<TrialRecord> records,
                          std::chrono::steady_clock::time_point start) {
    ExperimentReport report;
    report.config = cfg;
    report.records = std::move(records);
    for (const auto& r : report.records) {
        if (!r.pass) ++report.failures;
        if (r.vacuous) ++report.vacuous;
    }
    if (!report.records.empty()) {
        const auto [lo, hi] = std::minmax_element(
            report.records.begin(), report.records.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.observed_rank < b.observed_rank; });
        report.min_observed_rank = lo->observed_rank;
        report.max_observed_rank = hi->observed_rank;
    }
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void require_kind(const ExperimentConfig& cfg, std::initializer_list<ExperimentKind> kinds, const char* who) {
    if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end()) {
        throw ConfigError("experiment", std::string(who) + " cannot run experiment kind '" +
                                            std::string(to_string(cfg.kind)) + "'");
    }
}

}  // namespace

std::size_t theoretical_bound(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::rank_separation:
        case ExperimentKind::approx_gap:
            return ipow(std::min(cfg.ranks.at(0), cfg.m), cfg.n / 2);
        case ExperimentKind::generalized: {
            std::size_t r = cfg.m;
            for (std::size_t l = 0; l < cfg.l2; ++l) r = std::min(r, cfg.ranks.at(l));
            const std::size_t depth = checked_log2(cfg.n);
            return ipow(r, std::size_t{1} << (depth - cfg.l2));
        }
        case ExperimentKind::lemma1: return std::min(cfg.m, cfg.n);
        case ExperimentKind::lemma2: return cfg.target_rank;
    }
    return 0;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("trials", "must be at least 1");
    if (!(cfg.rank_policy.rel_tol > 0.0)) throw ConfigError("rel_tol", "must be positive");
    if (cfg.m == 0) throw ConfigError("sizes.M", "must be at least 1");
    if (cfg.n == 0) throw ConfigError("sizes.N", "must be at least 1");
    if (cfg.rank_method == RankMethod::exact && cfg.kind != ExperimentKind::rank_separation &&
        cfg.kind != ExperimentKind::generalized) {
        throw ConfigError("rank_method", "exact ranks are available for rank-separation and generalized only");
    }
    switch (cfg.kind) {
        case ExperimentKind::rank_separation: {
            check_ranks(cfg, log2_or_throw(cfg.n));
            check_capacity(cfg);
            break;
        }
        case ExperimentKind::approx_gap: {
            check_ranks(cfg, log2_or_throw(cfg.n));
            check_capacity(cfg);
            if (!(cfg.gap_floor_rel >= 0.0)) throw ConfigError("gap_floor_rel", "must be non-negative");
            const std::size_t bound = theoretical_bound(cfg);
            if (cfg.z >= bound) {
                throw ConfigError("sizes.Z", "Z = " + std::to_string(cfg.z) + " is not below the rank bound " +
                                                 std::to_string(bound) + "; the experiment would be vacuous");
            }
            break;
        }
        case ExperimentKind::generalized: {
            const std::size_t depth = log2_or_throw(cfg.n);
            if (cfg.l2 < 1) throw ConfigError("sizes.L2", "must be at least 1");
            if (cfg.l1 <= cfg.l2 || cfg.l1 > depth) {
                throw ConfigError("sizes.L1", "need L2 < L1 <= log2(N) = " + std::to_string(depth) + ", got L1 = " +
                                                  std::to_string(cfg.l1) + ", L2 = " + std::to_string(cfg.l2));
            }
            check_ranks(cfg, cfg.l1);
            check_capacity(cfg);
            break;
        }
        case ExperimentKind::lemma1: break;
        case ExperimentKind::lemma2: {
            if (cfg.mixtures == 0) throw ConfigError("sizes.p", "must be at least 1");
            if (cfg.target_rank == 0 || cfg.target_rank > std::min(cfg.m, cfg.n)) {
                throw ConfigError("sizes.r", "must be in [1, min(M, N)]");
            }
            break;
        }
    }
}

std::vector<TrialRecord> run_trials(std::size_t trials, std::size_t threads,
                                    const std::function<TrialRecord(std::size_t)>& trial) {
    std::vector<TrialRecord> out(trials);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
            try {
                out[t] = trial(t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

ExperimentReport run_rank_separation(const ExperimentConfig& cfg) {
    require_kind(cfg, {ExperimentKind::rank_separation}, "run_rank_separation");
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t bound = theoretical_bound(cfg);
    auto records = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        TrialRecord rec;
        rec.trial = t;
        rec.seed = derive_seed(cfg.seed, t);
        const auto ht = sample_ht(ht_sizes(cfg), cfg.shared, rec.seed, cfg.distribution);
        rec.observed_rank = cfg.rank_method == RankMethod::exact
                                ? exact_matricization_rank(ht, 0, 1, cfg.max_entries)
                                : cp_rank_lower_bound(ht_reconstruct(ht, 0, cfg.max_entries), cfg.rank_policy);
        rec.bound = bound;
        rec.pass = rec.observed_rank >= bound;
        return rec;
    });
    return assemble(cfg, std::move(records), start);
}

ExperimentReport run_generalized(const ExperimentConfig& cfg) {
    require_kind(cfg, {ExperimentKind::generalized}, "run_generalized");
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t bound = theoretical_bound(cfg);
    const std::size_t group = std::size_t{1} << (cfg.l2 - 1);
    auto records = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        TrialRecord rec;
        rec.trial = t;
        rec.seed = derive_seed(cfg.seed, t);
        const auto ht = sample_ht(ht_sizes(cfg), cfg.shared, rec.seed, cfg.distribution);
        if (cfg.rank_method == RankMethod::exact) {
            rec.observed_rank = exact_matricization_rank(ht, 0, group, cfg.max_entries);
        } else {
            const auto squeezed = squeeze(ht_reconstruct(ht, 0, cfg.max_entries), group);
            rec.observed_rank = numerical_rank(matricize(squeezed), cfg.rank_policy);
        }
        rec.bound = bound;
        rec.pass = rec.observed_rank >= bound;
        return rec;
    });
    return assemble(cfg, std::move(records), start);
}

ExperimentReport run_approx_gap(const ExperimentConfig& cfg) {
    require_kind(cfg, {ExperimentKind::approx_gap}, "run_approx_gap");
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t bound = theoretical_bound(cfg);
    auto records = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        TrialRecord rec;
        rec.trial = t;
        rec.seed = derive_seed(cfg.seed, t);
        const auto ht = sample_ht(ht_sizes(cfg), cfg.shared, rec.seed, cfg.distribution);
        const Matrix mat = matricize(ht_reconstruct(ht, 0, cfg.max_entries));
        const auto sigma = singular_values(mat);
        const double tau = rank_threshold(mat, sigma, cfg.rank_policy);
        rec.observed_rank = sigma.empty() || sigma.front() == 0.0
                                ? 0
                                : static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(),
                                                                         [tau](double s) { return s > tau; }));
        rec.bound = bound;
        rec.residual = low_rank_residual(sigma, cfg.z);
        rec.sigma_next = cfg.z < sigma.size() ? sigma[cfg.z] : 0.0;
        rec.vacuous = cfg.z >= rec.observed_rank;
        const double floor = cfg.gap_floor_rel * (sigma.empty() ? 0.0 : sigma.front());
        rec.pass = rec.vacuous || *rec.residual > floor;
        return rec;
    });
    return assemble(cfg, std::move(records), start);
}

ExperimentReport run_lemma_checks(const ExperimentConfig& cfg) {
    require_kind(cfg, {ExperimentKind::lemma1, ExperimentKind::lemma2}, "run_lemma_checks");
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t bound = theoretical_bound(cfg);

    if (cfg.kind == ExperimentKind::lemma1) {
        auto records = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
            TrialRecord rec;
            rec.trial = t;
            rec.seed = derive_seed(cfg.seed, t);
            Sampler draw(rec.seed, cfg.distribution);
            const Matrix a = random_matrix(cfg.m, cfg.n, draw);
            const Matrix b = cfg.shared ? a : random_matrix(cfg.m, cfg.n, draw);
            Matrix d(cfg.n, cfg.n);
            for (std::size_t k = 0; k < cfg.n; ++k) d(k, k) = draw();
            rec.observed_rank = numerical_rank(a * d * transpose(b), cfg.rank_policy);
            rec.bound = bound;
            rec.pass = rec.observed_rank == bound;
            return rec;
        });
        return assemble(cfg, std::move(records), start);
    }

    // The p matrices stay fixed across trials; only the mixing vector varies.
    Sampler fixed_draw(mix64(cfg.seed ^ 0x6C656D6D61320000ULL), cfg.distribution);
    std::vector<Matrix> fixed;
    for (std::size_t i = 0; i < cfg.mixtures; ++i) {
        const Matrix u = random_matrix(cfg.m, cfg.target_rank, fixed_draw);
        const Matrix v = random_matrix(cfg.n, cfg.target_rank, fixed_draw);
        fixed.push_back(u * transpose(v));
    }
    auto records = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        TrialRecord rec;
        rec.trial = t;
        rec.seed = derive_seed(cfg.seed, t);
        Sampler draw(rec.seed, cfg.distribution);
        Matrix mix(cfg.m, cfg.n);
        for (const auto& a : fixed) {
            Matrix term = a;
            term *= draw();
            mix += term;
        }
        rec.observed_rank = numerical_rank(mix, cfg.rank_policy);
        rec.bound = bound;
        rec.pass = rec.observed_rank >= bound;
        return rec;
    });
    return assemble(cfg, std::move(records), start);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::rank_separation: return run_rank_separation(cfg);
        case ExperimentKind::generalized: return run_generalized(cfg);
        case ExperimentKind::approx_gap: return run_approx_gap(cfg);
        case ExperimentKind::lemma1:
        case ExperimentKind::lemma2: return run_lemma_checks(cfg);
    }
    throw ConfigError("experiment", "unsupported experiment kind");
}

}  // namespace cac
