#include "decbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

ReportFormat parse_report_format(std::string_view name) {
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "csv") return ReportFormat::csv;
    throw ConfigError("unknown report format '" + std::string(name) + "' (expected markdown or csv)");
}

std::string strategy_family_label(Strategy strategy) {
    switch (strategy) {
        case Strategy::greedy: return "Greedy";
        case Strategy::beam: return "Beam search";
        case Strategy::temperature: return "Sampling with temperature";
        case Strategy::top_k: return "Top-k";
        case Strategy::top_p: return "Top-p (nucleus)";
        case Strategy::typical: return "Typical";
        case Strategy::contrastive_search: return "Contrastive search";
        case Strategy::adaptive_contrastive_search: return "Adaptive contrastive search";
        case Strategy::fsd: return "FSD";
        case Strategy::contrastive_decoding: return "Contrastive decoding";
    }
    return "?";
}

std::string strategy_configuration(const std::string& strategy_key) {
    size_t bracket = strategy_key.find('[');
    if (bracket == std::string::npos) {
        return "-";
    }
    return strategy_key.substr(bracket + 1, strategy_key.size() - bracket - 2);
}

namespace {

// Display formatting: two decimals, scaled x100 for unit metrics.
std::string display_scaled(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value * 100.0);
    return buf;
}

std::string display_raw(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value < 0 ? "-inf" : "inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

Strategy family_of(const std::string& strategy_key) {
    return DecodingConfig::parse_key(strategy_key).strategy;
}

// Per-family maxima of each displayed metric; Table-2-style bolding.
struct FamilyMax {
    double coherence_raw = -std::numeric_limits<double>::infinity();
    double div = -1, mauve = -1, qtext = -1, coh = -1;
};

std::string bold_if(const std::string& text, bool bold) {
    return bold ? "**" + text + "**" : text;
}

}  // namespace

std::string render_aggregate_table(std::span<const AggregateRow> rows, ReportFormat format, GroupBy group_by) {
    std::ostringstream out;
    bool grouped = group_by != GroupBy::strategy;
    const char* group_header = group_by == GroupBy::backend ? "Backend" : "Dataset";

    if (format == ReportFormat::csv) {
        out << kAggregateCsvHeader << "\n";
        for (const auto& row : rows) {
            out << csv_quote(row.strategy_key) << ',' << csv_quote(row.group) << ','
                << format_double(row.mean.div) << ',' << format_double(row.mean.coherence_raw) << ','
                << format_double(row.mean.coh) << ',' << format_double(row.mean.mauve) << ','
                << format_double(row.mean.qtext) << ',' << format_double(row.stddev.div) << ','
                << format_double(row.stddev.coherence_raw) << ',' << format_double(row.stddev.coh) << ','
                << format_double(row.stddev.mauve) << ',' << format_double(row.stddev.qtext) << ',' << row.n_rows
                << ',' << row.n_generations << "\n";
        }
        return out.str();
    }

    std::map<Strategy, FamilyMax> maxima;
    for (const auto& row : rows) {
        FamilyMax& fm = maxima[family_of(row.strategy_key)];
        fm.coherence_raw = std::max(fm.coherence_raw, row.mean.coherence_raw);
        fm.div = std::max(fm.div, row.mean.div);
        fm.mauve = std::max(fm.mauve, row.mean.mauve);
        fm.qtext = std::max(fm.qtext, row.mean.qtext);
        fm.coh = std::max(fm.coh, row.mean.coh);
    }

    out << "| Strategy | Configuration |";
    if (grouped) {
        out << ' ' << group_header << " |";
    }
    out << " Coherence | Diversity | MAUVE | QText |\n";
    out << "|---|---|";
    if (grouped) {
        out << "---|";
    }
    out << "---|---|---|---|\n";
    for (const auto& row : rows) {
        Strategy family = family_of(row.strategy_key);
        const FamilyMax& fm = maxima[family];
        out << "| " << strategy_family_label(family) << " | " << strategy_configuration(row.strategy_key) << " |";
        if (grouped) {
            out << ' ' << row.group << " |";
        }
        out << ' ' << bold_if(display_raw(row.mean.coherence_raw), row.mean.coherence_raw == fm.coherence_raw)
            << " | " << bold_if(display_scaled(row.mean.div), row.mean.div == fm.div) << " | "
            << bold_if(display_scaled(row.mean.mauve), row.mean.mauve == fm.mauve) << " | "
            << bold_if(display_scaled(row.mean.qtext), row.mean.qtext == fm.qtext) << " |\n";
    }
    return out.str();
}

std::string render_ranking_tables(std::span<const AggregateRow> top, std::span<const AggregateRow> bottom,
                                  RankMetric metric, ReportFormat format, bool flagged) {
    std::ostringstream out;
    const char* metric_name = rank_metric_name(metric);

    if (format == ReportFormat::csv) {
        out << "rank,side,strategy,group," << metric_name << "\n";
        for (size_t i = 0; i < top.size(); ++i) {
            out << (i + 1) << ",top," << csv_quote(top[i].strategy_key) << ',' << csv_quote(top[i].group) << ','
                << format_double(metric_value(top[i], metric)) << "\n";
        }
        for (size_t i = 0; i < bottom.size(); ++i) {
            out << (i + 1) << ",bottom," << csv_quote(bottom[i].strategy_key) << ','
                << csv_quote(bottom[i].group) << ',' << format_double(metric_value(bottom[i], metric)) << "\n";
        }
        return out.str();
    }

    auto emit = [&](std::span<const AggregateRow> rows, const char* title) {
        out << "### " << title << " " << rows.size() << " by " << metric_name << "\n\n";
        out << "| Rank | Strategy | Configuration | Group | " << metric_name << " |\n";
        out << "|---|---|---|---|---|\n";
        for (size_t i = 0; i < rows.size(); ++i) {
            Strategy family = family_of(rows[i].strategy_key);
            double v = metric_value(rows[i], metric);
            out << "| " << (i + 1) << " | " << strategy_family_label(family) << " | "
                << strategy_configuration(rows[i].strategy_key) << " | "
                << (rows[i].group.empty() ? "-" : rows[i].group) << " | " << display_scaled(v) << " |\n";
        }
        out << "\n";
    };
    emit(top, "Top");
    emit(bottom, "Bottom");
    if (flagged) {
        out << "_n exceeded the number of rows; all rows shown._\n";
    }
    return out.str();
}

std::vector<AggregateRow> read_aggregate_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kAggregateCsvHeader) {
        throw InputError("not a decbench aggregate csv");
    }
    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        auto fields = csv_split_line(std::string(trim(line)));
        if (fields.size() != 14) {
            throw InputError("aggregate csv row needs 14 fields");
        }
        AggregateRow row;
        row.strategy_key = fields[0];
        row.group = fields[1];
        row.mean.div = parse_double(fields[2]);
        row.mean.coherence_raw = parse_double(fields[3]);
        row.mean.coh = parse_double(fields[4]);
        row.mean.mauve = parse_double(fields[5]);
        row.mean.qtext = parse_double(fields[6]);
        row.stddev.div = parse_double(fields[7]);
        row.stddev.coherence_raw = parse_double(fields[8]);
        row.stddev.coh = parse_double(fields[9]);
        row.stddev.mauve = parse_double(fields[10]);
        row.stddev.qtext = parse_double(fields[11]);
        row.n_rows = parse_long(fields[12]);
        row.n_generations = parse_long(fields[13]);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace decbench
