#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "decbench/sweep.hpp"

namespace decbench {

enum class GroupBy { strategy, backend, dataset };
enum class RankMetric { div, coh, mauve, qtext };

GroupBy parse_group_by(std::string_view name);      // throws ConfigError
RankMetric parse_rank_metric(std::string_view name);  // throws ConfigError
const char* rank_metric_name(RankMetric metric);

struct MetricMeans {
    double div = 0;
    double coherence_raw = 0;
    double coh = 0;
    double mauve = 0;
    double qtext = 0;
};

struct AggregateRow {
    std::string strategy_key;
    std::string group;  // backend name, dataset id, or empty for GroupBy::strategy
    MetricMeans mean;
    MetricMeans stddev;  // weighted population stddev; 0 for single rows
    long n_rows = 0;
    long n_generations = 0;
};

// Weighted averages per (strategy key [, group]): sum(w_d * m) / sum(w_d)
// with dataset weights `weights` (missing weights are a config error).
// Failed rows are skipped; the aggregate QText is recomputed from the
// aggregated DIV/MAUVE/COH rather than averaged. Output in canonical order
// (strategy, hyperparameters ascending, group).
std::vector<AggregateRow> aggregate_weighted(std::span<const ResultRow> rows,
                                             const std::map<std::string, double>& weights, GroupBy group_by);

// Descending sort by `metric`, ties by canonical order; returns the first
// and last n rows (bottom list worst-first). When n exceeds the row count,
// returns everything and sets *flagged.
std::pair<std::vector<AggregateRow>, std::vector<AggregateRow>> rank_strategies(std::span<const AggregateRow> rows,
                                                                                RankMetric metric, int n,
                                                                                bool* flagged = nullptr);

double metric_value(const AggregateRow& row, RankMetric metric);

}  // namespace decbench
