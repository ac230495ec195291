#pragma once

#include <span>
#include <string>

#include "decbench/aggregate.hpp"

namespace decbench {

enum class ReportFormat { markdown, csv };

ReportFormat parse_report_format(std::string_view name);  // throws ConfigError

struct ReportSpec {
    std::string results_path;
    GroupBy group_by = GroupBy::strategy;
    RankMetric metric = RankMetric::qtext;
    int top_n = 5;
    ReportFormat format = ReportFormat::markdown;
};

// Aggregate table. Markdown displays DIV/MAUVE/COH/QText x100 with the
// per-strategy-family maximum of each metric in bold; coherence stays raw.
// CSV emits the raw unit-scale values with shortest round-trip decimals.
std::string render_aggregate_table(std::span<const AggregateRow> rows, ReportFormat format, GroupBy group_by);

// Top-n / bottom-n tables by one metric.
std::string render_ranking_tables(std::span<const AggregateRow> top, std::span<const AggregateRow> bottom,
                                  RankMetric metric, ReportFormat format, bool flagged);

inline constexpr const char* kAggregateCsvHeader =
    "strategy,group,div,coherence_raw,coh,mauve,qtext,div_std,coherence_raw_std,coh_std,mauve_std,qtext_std,"
    "n_rows,n_generations";

std::vector<AggregateRow> read_aggregate_csv_text(const std::string& text);

// Human-readable strategy family label (Beam search, Top-k, ...).
std::string strategy_family_label(Strategy strategy);
// The bracketed configuration of a key ("w=3"), "-" when none.
std::string strategy_configuration(const std::string& strategy_key);

}  // namespace decbench
