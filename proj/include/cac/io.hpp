#pragma once

#include "cac/circuits.hpp"
#include "cac/decompositions.hpp"
#include "cac/experiments.hpp"
#include "cac/tensor.hpp"

#include <json.hpp>

#include <string>

namespace cac {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Every *_from_json throws ConfigError naming the offending field as a dotted
// path below `where`.

/// {"shape": [...], "data": [...]}, data row-major.
[[nodiscard]] json tensor_to_json(const DenseTensor& t);
[[nodiscard]] DenseTensor tensor_from_json(const json& j, const std::string& where = "tensor");

/// CP: {"kind": "cp", n_modes, mode_dim, n_classes, n_terms, shared,
///      class_weights, factors}
/// HT: {"kind": "ht", n_modes, mode_dim, n_classes, ranks, shared,
///      leaves, level_weights: [[...], ...], top_weights}
/// Instead of the weight arrays a decomposition may carry
/// "random": {"seed": s, "distribution": "normal"} to be sampled.
[[nodiscard]] json decomposition_to_json(const Decomposition& d);
[[nodiscard]] Decomposition decomposition_from_json(const json& j, const std::string& where = "decomposition");

/// {"channels": M, "positions": N, "values": [[f_1(x_1) .. f_1(x_N)], ...]}
[[nodiscard]] json grid_to_json(const RepGrid& g);
[[nodiscard]] RepGrid grid_from_json(const json& j, const std::string& where = "grid");

/// {"kind": "gaussian", "channels": [{"mean": [...], "variance": [...]}, ...]}
/// {"kind": "neuron", "activation": "relu", "channels": [{"weights": [...], "bias": b}, ...]}
[[nodiscard]] RepresentationFamily family_from_json(const json& j, const std::string& where = "representation");
/// [[x_1], [x_2], ...]
[[nodiscard]] Instance instance_from_json(const json& j, const std::string& where = "instance");

[[nodiscard]] Activation parse_activation(std::string_view name);

/// Experiment config document. Keys: schema_version, experiment,
/// sizes {N, M, ranks, L1, L2, Z, p, r}, shared, trials, seed, distribution,
/// rel_tol, gap_floor_rel, allowed_failures, threads, max_entries, out, format.
/// Absent keys keep the values already in `base`.
[[nodiscard]] ExperimentConfig config_from_json(const json& j, ExperimentConfig base = {});
/// Everything that affects results; threads and output settings are left out.
[[nodiscard]] json config_to_json(const ExperimentConfig& cfg);

[[nodiscard]] json report_to_json(const ExperimentReport& report);
/// trial,seed,observed_rank,bound,residual,pass
[[nodiscard]] std::string report_to_csv(const ExperimentReport& report);

/// Parses a file; syntax errors become ConfigError with the file name.
[[nodiscard]] json read_json_file(const std::string& path);
/// Throws std::runtime_error if the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cac
