#pragma once

#include "cac/random.hpp"
#include "cac/rank.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cac {

/// Invalid or infeasible experiment configuration. `field()` names the
/// offending config entry (dotted path) when one applies.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : "config field '" + field + "': " + message),
          field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class ExperimentKind {
    rank_separation,  ///< HT tensor vs CP: matricization rank >= min(r_0, M)^(N/2)
    generalized,      ///< L1-level vs L2-level truncated HT via squeezed matricization
    approx_gap,       ///< distance from the HT matricization to rank-Z matrices
    lemma1,           ///< rank(A D B^T) = min(M, N)
    lemma2,           ///< rank(sum_i x_i A_i) >= r
};

[[nodiscard]] ExperimentKind parse_experiment_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(ExperimentKind kind);

/// How rank-separation and generalized trials measure the matricization rank.
enum class RankMethod {
    numerical,  ///< singular values of the double-precision reconstruction against RankPolicy
    exact,      ///< exact reconstruction and row reduction modulo a prime (certified lower bound)
};

[[nodiscard]] RankMethod parse_rank_method(std::string_view name);
[[nodiscard]] std::string_view to_string(RankMethod method);

struct ExperimentConfig {
    static constexpr int kSchemaVersion = 1;

    ExperimentKind kind = ExperimentKind::rank_separation;

    // Tensor experiments: order N and mode dimension M.
    // Lemma experiments: the matrices are M x N (lemma1: A, B in R^{M x N},
    // D in R^{N x N}; lemma2: each A_i in R^{M x N}).
    std::size_t n = 8;
    std::size_t m = 3;
    /// r_0..r_{L-1} (rank-separation, approx-gap) or r_0..r_{L1-1} (generalized).
    std::vector<std::size_t> ranks;
    std::size_t l1 = 0;            // generalized: levels of the generating decomposition
    std::size_t l2 = 0;            // generalized: levels of the competing decomposition
    std::size_t z = 0;             // approx-gap: rank of the CP competitor
    std::size_t mixtures = 2;      // lemma2: p
    std::size_t target_rank = 2;   // lemma2: r

    bool shared = false;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    Distribution distribution = Distribution::normal;
    RankPolicy rank_policy;
    RankMethod rank_method = RankMethod::numerical;
    /// approx-gap: a trial passes iff residual > gap_floor_rel * sigma_1.
    double gap_floor_rel = 1e-8;
    /// Failures tolerated before the run counts as failed; default trials / 500.
    std::optional<std::size_t> allowed_failures;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t threads = 0;
    /// Cap on reconstructed tensor entries.
    std::size_t max_entries = 10'000'000;

    /// Report destination; empty writes JSON to stdout.
    std::string out;
    /// "csv", "json", or empty for both.
    std::string format;

    [[nodiscard]] std::size_t failure_allowance() const { return allowed_failures.value_or(trials / 500); }
};

/// Throws ConfigError when sizes are invalid for the chosen experiment or the
/// reconstruction would exceed `max_entries`.
void validate(const ExperimentConfig& cfg);

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t observed_rank = 0;
    std::size_t bound = 0;
    std::optional<double> residual;    // approx-gap only
    std::optional<double> sigma_next;  // approx-gap only: sigma_{Z+1}
    bool pass = false;
    bool vacuous = false;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRecord> records;
    std::size_t failures = 0;
    std::size_t vacuous = 0;
    std::size_t min_observed_rank = 0;
    std::size_t max_observed_rank = 0;
    double wall_time_seconds = 0.0;

    [[nodiscard]] bool within_allowance() const { return failures <= config.failure_allowance(); }
};

/// Theoretical rank bound of the experiment (r^(N/2), r^(2^(L-L2)), min(M,N), r).
[[nodiscard]] std::size_t theoretical_bound(const ExperimentConfig& cfg);

[[nodiscard]] ExperimentReport run_rank_separation(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_generalized(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_approx_gap(const ExperimentConfig& cfg);
/// lemma1 or lemma2, per cfg.kind.
[[nodiscard]] ExperimentReport run_lemma_checks(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Evaluates trial(t) for t in [0, trials) on a worker pool and returns the
/// results ordered by t.
[[nodiscard]] std::vector<TrialRecord> run_trials(std::size_t trials, std::size_t threads,
                                                  const std::function<TrialRecord(std::size_t)>& trial);

}  // namespace cac
