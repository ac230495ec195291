#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "decbench/config.hpp"
#include "decbench/mauve.hpp"
#include "decbench/metrics.hpp"
#include "decbench/registry.hpp"

namespace decbench {

// Cartesian experiment plan: backends x datasets x strategy grids
// (x replicas for stochastic strategies).
struct SweepGrid {
    std::vector<std::string> backends;
    std::vector<std::string> datasets;
    std::vector<StrategyAxis> strategies;
    int replicas = 1;  // stochastic strategies only; deterministic ones run once
    int max_new_tokens = kDefaultMaxNewTokens;
    uint64_t run_seed = 0;
};

SweepGrid grid_from_config(const RunConfig& config);

// The reproduction grid: beam {3,5,10,15,20,50}; contrastive search
// k {1,3,5,10,15,20,50} x alpha {0.2,0.4,0.6,0.8,1.0}; adaptive contrastive
// search (restricted to `acs_backend` when non-empty); temperature
// {0.1,0.3,0.5,0.7,0.9,1.0}; top-k {1,3,5,10,15,20,50};
// top-p {0.6,0.7,0.8,0.9,0.95}.
std::vector<StrategyAxis> reproduction_strategy_axes(const std::string& acs_backend = "");

struct ExperimentKey {
    std::string backend;
    std::string dataset;
    DecodingConfig config;
    uint64_t seed = 0;  // 0 for deterministic strategies
    int replica = 0;

    std::string strategy_key() const { return config.key(); }
    // Identity hashed for seed derivation: backend|dataset|strategy|replica.
    std::string cell_id() const;
    // Persisted key: backend|dataset|strategy|seed.
    std::string to_string() const;
};

// Full Cartesian product in canonical order (backend, dataset, strategy,
// hyperparameters ascending, replica). Deterministic: re-expansion of the
// same grid yields the identical ordered list.
std::vector<ExperimentKey> expand_grid(const SweepGrid& grid);

enum class RowStatus { ok, degenerate, failed };
const char* row_status_name(RowStatus status);
RowStatus parse_row_status(std::string_view name);

struct ResultRow {
    ExperimentKey key;
    MetricReport metrics;
    RowStatus status = RowStatus::ok;
    std::string fail_reason;
    long wall_ms = 0;
};

struct SweepOptions {
    int workers = 1;
    std::string evaluator;  // empty = the generating backend
    std::string embedder;   // empty = the evaluator
    int mauve_bins = kMauveDefaultBins;
    double mauve_c = kMauveDefaultScalingC;
    uint64_t config_digest = 0;  // recorded in the manifest
    int stop_after_rows = -1;    // >=0: stop early (resumability testing)
    std::function<void(size_t done, size_t total)> progress;
};

// One experiment cell: decodes every prompt of the dataset under the key's
// config and evaluates DIV, coherence and MAUVE (COH and QText are filled
// in at pool finalization). Capability mismatches produce a failed row, not
// an exception.
struct CellResult {
    ExperimentKey key;
    RowStatus status = RowStatus::ok;
    std::string fail_reason;
    double div = 0;
    double coherence_raw = 0;
    double mauve = 0;
    long n_generations = 0;
    long wall_ms = 0;
    std::vector<GenerationText> generations;
};

CellResult run_experiment(const Registry& registry, const ExperimentKey& key, const Dataset& dataset,
                          int max_new_tokens, const SweepOptions& options);

// COH pool construction over all finite coherence values, then COH/QText
// per row. Row order follows `plan`.
std::vector<ResultRow> finalize_rows(std::span<const ExperimentKey> plan,
                                     const std::map<std::string, CellResult>& cells, const std::string& scope_id);

struct SweepOutcome {
    std::vector<ResultRow> rows;  // empty when stopped early
    std::filesystem::path out_dir;
    size_t plan_size = 0;
    size_t executed = 0;  // cells run in this invocation
    size_t resumed = 0;   // cells taken from an existing journal
    bool complete = false;
};

// Executes the plan with a bounded worker pool, journaling each finished
// cell to <out_dir>/journal.jsonl so interrupted runs resume idempotently.
// On completion writes results.csv, generations.jsonl and manifest.
SweepOutcome run_sweep(const Registry& registry, const SweepGrid& grid, const SweepOptions& options,
                       const std::filesystem::path& out_dir);

inline constexpr const char* kResultsCsvHeader =
    "experiment_key,div,coherence_raw,coh,mauve,qtext,n_generations,backend,dataset,strategy,seed,status,wall_ms";

void write_results_csv(const std::string& path, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Digest of a results.csv with the wall_ms column masked, so that reruns
// and different worker counts compare equal.
uint64_t results_digest(const std::string& path);
uint64_t file_digest(const std::string& path);

}  // namespace decbench
