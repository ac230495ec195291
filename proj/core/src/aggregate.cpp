#include "decbench/aggregate.hpp"

#include <algorithm>
#include <cmath>

#include "decbench/errors.hpp"

namespace decbench {

GroupBy parse_group_by(std::string_view name) {
    if (name == "strategy") return GroupBy::strategy;
    if (name == "backend") return GroupBy::backend;
    if (name == "dataset") return GroupBy::dataset;
    throw ConfigError("unknown group-by '" + std::string(name) + "' (expected strategy, backend or dataset)");
}

RankMetric parse_rank_metric(std::string_view name) {
    if (name == "div") return RankMetric::div;
    if (name == "coh") return RankMetric::coh;
    if (name == "mauve") return RankMetric::mauve;
    if (name == "qtext") return RankMetric::qtext;
    throw ConfigError("unknown metric '" + std::string(name) + "' (expected div, coh, mauve or qtext)");
}

const char* rank_metric_name(RankMetric metric) {
    switch (metric) {
        case RankMetric::div: return "div";
        case RankMetric::coh: return "coh";
        case RankMetric::mauve: return "mauve";
        case RankMetric::qtext: return "qtext";
    }
    return "?";
}

double metric_value(const AggregateRow& row, RankMetric metric) {
    switch (metric) {
        case RankMetric::div: return row.mean.div;
        case RankMetric::coh: return row.mean.coh;
        case RankMetric::mauve: return row.mean.mauve;
        case RankMetric::qtext: return row.mean.qtext;
    }
    return 0;
}

namespace {

// Sort token for canonical row order: strategy enum, then hyperparameter
// values in key order, then group.
struct SortKey {
    int strategy;
    std::vector<double> params;
    std::string amateur;
    std::string group;

    bool operator<(const SortKey& other) const {
        if (strategy != other.strategy) return strategy < other.strategy;
        if (params != other.params) return params < other.params;
        if (amateur != other.amateur) return amateur < other.amateur;
        return group < other.group;
    }
};

SortKey sort_key_for(const std::string& strategy_key, const std::string& group) {
    DecodingConfig cfg = DecodingConfig::parse_key(strategy_key);
    SortKey key;
    key.strategy = static_cast<int>(cfg.strategy);
    key.group = group;
    switch (cfg.strategy) {
        case Strategy::beam: key.params = {static_cast<double>(*cfg.w)}; break;
        case Strategy::temperature: key.params = {*cfg.t}; break;
        case Strategy::top_k: key.params = {static_cast<double>(*cfg.k)}; break;
        case Strategy::top_p: key.params = {*cfg.p}; break;
        case Strategy::typical: key.params = {*cfg.tau}; break;
        case Strategy::contrastive_search: key.params = {*cfg.alpha, static_cast<double>(*cfg.k)}; break;
        case Strategy::fsd: key.params = {static_cast<double>(*cfg.k), *cfg.beta}; break;
        case Strategy::contrastive_decoding:
            key.params = {static_cast<double>(*cfg.k)};
            key.amateur = *cfg.amateur;
            break;
        default: break;
    }
    return key;
}

struct Accumulator {
    double weight_sum = 0;
    long n_rows = 0;
    long n_generations = 0;
    // First pass sums; second pass computes the spread.
    MetricMeans sum;
    std::vector<std::pair<double, MetricMeans>> samples;  // (weight, values)
};

void accumulate(MetricMeans& into, const MetricMeans& values, double w) {
    into.div += w * values.div;
    into.coherence_raw += w * values.coherence_raw;
    into.coh += w * values.coh;
    into.mauve += w * values.mauve;
    into.qtext += w * values.qtext;
}

}  // namespace

std::vector<AggregateRow> aggregate_weighted(std::span<const ResultRow> rows,
                                             const std::map<std::string, double>& weights, GroupBy group_by) {
    std::map<std::pair<std::string, std::string>, Accumulator> groups;
    for (const ResultRow& row : rows) {
        if (row.status == RowStatus::failed) {
            continue;
        }
        auto wit = weights.find(row.key.dataset);
        if (wit == weights.end()) {
            throw ConfigError("no weight for dataset '" + row.key.dataset + "'");
        }
        if (!(wit->second > 0)) {
            throw ConfigError("weight for dataset '" + row.key.dataset + "' must be positive");
        }
        std::string group;
        if (group_by == GroupBy::backend) {
            group = row.key.backend;
        } else if (group_by == GroupBy::dataset) {
            group = row.key.dataset;
        }
        Accumulator& acc = groups[{row.key.strategy_key(), group}];
        MetricMeans values{row.metrics.div, row.metrics.coherence_raw, row.metrics.coh, row.metrics.mauve,
                           row.metrics.qtext};
        accumulate(acc.sum, values, wit->second);
        acc.weight_sum += wit->second;
        acc.n_rows += 1;
        acc.n_generations += row.metrics.n_generations;
        acc.samples.emplace_back(wit->second, values);
    }

    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (auto& [key, acc] : groups) {
        AggregateRow row;
        row.strategy_key = key.first;
        row.group = key.second;
        row.n_rows = acc.n_rows;
        row.n_generations = acc.n_generations;
        double w = acc.weight_sum;
        row.mean.div = acc.sum.div / w;
        row.mean.coherence_raw = acc.sum.coherence_raw / w;
        row.mean.coh = acc.sum.coh / w;
        row.mean.mauve = acc.sum.mauve / w;
        // The aggregate QText is recomputed from the aggregated components
        // so the harmonic-mean identity holds at this level too.
        row.mean.qtext = qtext(std::clamp(row.mean.div, 0.0, 1.0), std::clamp(row.mean.mauve, 0.0, 1.0),
                               std::clamp(row.mean.coh, 0.0, 1.0));
        for (const auto& [sw, values] : acc.samples) {
            row.stddev.div += sw * (values.div - row.mean.div) * (values.div - row.mean.div);
            row.stddev.coherence_raw +=
                sw * (values.coherence_raw - row.mean.coherence_raw) * (values.coherence_raw - row.mean.coherence_raw);
            row.stddev.coh += sw * (values.coh - row.mean.coh) * (values.coh - row.mean.coh);
            row.stddev.mauve += sw * (values.mauve - row.mean.mauve) * (values.mauve - row.mean.mauve);
            row.stddev.qtext += sw * (values.qtext - row.mean.qtext) * (values.qtext - row.mean.qtext);
        }
        row.stddev.div = std::sqrt(row.stddev.div / w);
        row.stddev.coherence_raw = std::sqrt(row.stddev.coherence_raw / w);
        row.stddev.coh = std::sqrt(row.stddev.coh / w);
        row.stddev.mauve = std::sqrt(row.stddev.mauve / w);
        row.stddev.qtext = std::sqrt(row.stddev.qtext / w);
        out.push_back(std::move(row));
    }

    std::sort(out.begin(), out.end(), [](const AggregateRow& a, const AggregateRow& b) {
        return sort_key_for(a.strategy_key, a.group) < sort_key_for(b.strategy_key, b.group);
    });
    return out;
}

std::pair<std::vector<AggregateRow>, std::vector<AggregateRow>> rank_strategies(std::span<const AggregateRow> rows,
                                                                                RankMetric metric, int n,
                                                                                bool* flagged) {
    if (n < 1) {
        throw InputError("ranking needs n >= 1");
    }
    if (flagged != nullptr) {
        *flagged = false;
    }
    std::vector<AggregateRow> sorted(rows.begin(), rows.end());
    // rows arrive in canonical order; stable sort keeps it as the tie rule.
    std::stable_sort(sorted.begin(), sorted.end(), [&](const AggregateRow& a, const AggregateRow& b) {
        return metric_value(a, metric) > metric_value(b, metric);
    });
    size_t take = static_cast<size_t>(n);
    if (take > sorted.size()) {
        take = sorted.size();
        if (flagged != nullptr) {
            *flagged = true;
        }
    }
    std::vector<AggregateRow> top(sorted.begin(), sorted.begin() + static_cast<long>(take));
    std::vector<AggregateRow> bottom(sorted.end() - static_cast<long>(take), sorted.end());
    std::reverse(bottom.begin(), bottom.end());  // worst first
    return {std::move(top), std::move(bottom)};
}

}  // namespace decbench
