// decbench CLI: generate / evaluate / sweep / report / backends train.
// Exit codes: 0 ok, 2 usage or config, 3 capability, 4 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "decbench/aggregate.hpp"
#include "decbench/errors.hpp"
#include "decbench/hash.hpp"
#include "decbench/ngram.hpp"
#include "decbench/report.hpp"
#include "decbench/strconv.hpp"
#include "decbench/sweep.hpp"
#include "decbench/version.hpp"

namespace fs = std::filesystem;
using namespace decbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;
constexpr int kExitRuntime = 4;

struct GlobalArgs {
    std::string config_path;
    std::string out;
    int workers = 0;  // 0 = take the config's value
    std::optional<uint64_t> run_seed;
};

RunConfig require_config(const GlobalArgs& args) {
    if (args.config_path.empty()) {
        throw ConfigError("--config <path> is required for this subcommand");
    }
    RunConfig cfg = load_run_config(args.config_path);
    if (args.workers > 0) {
        cfg.workers = args.workers;
    }
    if (args.run_seed) {
        cfg.run_seed = *args.run_seed;
    }
    return cfg;
}

std::string config_dir(const GlobalArgs& args) {
    return fs::path(args.config_path).parent_path().string();
}

// Writes through a temp file so failures never leave partial outputs.
void write_file_atomically(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!out.good()) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target);
}

struct StrategyFlags {
    std::string strategy;
    std::optional<int> w, k;
    std::optional<double> p, t, alpha, tau, beta;
    std::string amateur;

    DecodingConfig to_config() const {
        if (strategy.find('[') != std::string::npos) {
            return DecodingConfig::parse_key(strategy);
        }
        DecodingConfig cfg;
        cfg.strategy = parse_strategy_name(strategy);
        cfg.w = w;
        cfg.k = k;
        cfg.p = p;
        cfg.t = t;
        cfg.alpha = alpha;
        cfg.tau = tau;
        cfg.beta = beta;
        if (!amateur.empty()) {
            cfg.amateur = amateur;
        }
        cfg.validate();
        return cfg;
    }
};

void add_strategy_flags(CLI::App* cmd, StrategyFlags& flags) {
    cmd->add_option("--strategy", flags.strategy,
                    "Strategy: greedy, beam, temp, topk, topp, typical, cs, acs, fsd, cd, or a full key like "
                    "cs[alpha=0.6,k=10]")
        ->required();
    cmd->add_option("--w", [&flags](const CLI::results_t& r) { flags.w = std::stoi(r[0]); return true; },
                    "Beam width");
    cmd->add_option("--k", [&flags](const CLI::results_t& r) { flags.k = std::stoi(r[0]); return true; },
                    "Candidate count");
    cmd->add_option("--p", [&flags](const CLI::results_t& r) { flags.p = std::stod(r[0]); return true; },
                    "Nucleus mass");
    cmd->add_option("--t", [&flags](const CLI::results_t& r) { flags.t = std::stod(r[0]); return true; },
                    "Temperature");
    cmd->add_option("--alpha", [&flags](const CLI::results_t& r) { flags.alpha = std::stod(r[0]); return true; },
                    "Contrastive penalty weight");
    cmd->add_option("--tau", [&flags](const CLI::results_t& r) { flags.tau = std::stod(r[0]); return true; },
                    "Typical mass");
    cmd->add_option("--beta", [&flags](const CLI::results_t& r) { flags.beta = std::stod(r[0]); return true; },
                    "FSD contrast weight");
    cmd->add_option("--amateur", flags.amateur, "Amateur backend (contrastive decoding)");
}

// --- generate ---------------------------------------------------------------

int cmd_generate(const GlobalArgs& globals, const std::string& backend_name, const std::string& dataset_id,
                 const StrategyFlags& flags, uint64_t seed, int max_new_tokens, const std::string& out_path) {
    RunConfig cfg = require_config(globals);
    Registry registry = Registry::from_run_config(cfg, config_dir(globals));
    const LmBackend& backend = registry.backend(backend_name);
    const Dataset& dataset = registry.dataset(dataset_id);
    DecodingConfig config = flags.to_config();
    if (max_new_tokens < 0) {
        max_new_tokens = cfg.max_new_tokens;
    }

    if (strategy_needs_representation(config.strategy) && !backend.supports_representation()) {
        throw CapabilityError("strategy '" + config.key() + "' needs representations; backend '" + backend_name +
                              "' has none");
    }
    const LmBackend* amateur = nullptr;
    if (config.strategy == Strategy::contrastive_decoding) {
        amateur = &registry.backend(*config.amateur);
    }

    std::ostringstream lines;
    for (const PromptRecord& prompt : dataset.records) {
        std::vector<int> ids = backend.vocab().encode(prompt.prompt);
        GenerationRecord rec =
            run_decoding(backend, ids, config, seed ^ fnv1a64(prompt.prompt_id), max_new_tokens, amateur);
        rec.dataset_id = dataset.id;
        rec.prompt_id = prompt.prompt_id;
        lines << generation_to_jsonl(to_text(rec, backend.vocab())) << "\n";
    }
    write_file_atomically(out_path, lines.str());
    std::cerr << "wrote " << dataset.records.size() << " generations to " << out_path << "\n";
    return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

int cmd_evaluate(const GlobalArgs& globals, const std::string& generations_path, const std::string& evaluator_name,
                 const std::string& embedder_name, const std::string& format, const std::string& out_path) {
    if (format != "csv" && format != "jsonl") {
        throw ConfigError("evaluate --format must be csv or jsonl");
    }
    RunConfig cfg = require_config(globals);
    Registry registry = Registry::from_run_config(cfg, config_dir(globals));

    std::ifstream in(generations_path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + generations_path + "'");
    }
    std::vector<GenerationText> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            records.push_back(generation_from_jsonl(line));
        } catch (const Error& e) {
            throw InputError(generations_path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (records.empty()) {
        throw InputError("'" + generations_path + "' holds no generation records");
    }

    // One metric row per experiment cell present in the file.
    std::map<std::string, std::vector<const GenerationText*>> cells;
    for (const auto& rec : records) {
        std::string key = rec.backend_name + "|" + rec.dataset_id + "|" + rec.strategy_key + "|" +
                          format_u64(rec.seed);
        cells[key].push_back(&rec);
    }

    struct CellMetrics {
        double div = 0, coherence = 0, mauve = 0;
        long n = 0;
    };
    std::map<std::string, CellMetrics> computed;
    NormalizationPool pool;
    for (const auto& [key, gens] : cells) {
        const GenerationText& first = *gens.front();
        const LmBackend& generator = registry.backend(first.backend_name);
        const LmBackend& evaluator =
            evaluator_name.empty()
                ? (cfg.evaluator.empty() ? generator : registry.backend(cfg.evaluator))
                : registry.backend(evaluator_name);
        const LmBackend& embedder = embedder_name.empty()
                                        ? (cfg.embedder.empty() ? evaluator : registry.backend(cfg.embedder))
                                        : registry.backend(embedder_name);
        const Dataset& dataset = registry.dataset(first.dataset_id);

        CellMetrics m;
        std::vector<Embedding> gen_emb;
        double coh_sum = 0;
        long coh_n = 0;
        for (const GenerationText* g : gens) {
            m.div += diversity(g->continuation).value;
            if (!g->continuation.empty()) {
                coh_sum += coherence_raw(evaluator, g->prompt, g->continuation);
                ++coh_n;
                gen_emb.push_back(embed_tokens(embedder, g->continuation));
            }
        }
        std::vector<Embedding> ref_emb;
        for (const PromptRecord& prompt : dataset.records) {
            ref_emb.push_back(embed_tokens(embedder, prompt.gold));
        }
        m.n = static_cast<long>(gens.size());
        m.div /= static_cast<double>(m.n);
        m.coherence = coh_n > 0 ? coh_sum / static_cast<double>(coh_n) : -std::numeric_limits<double>::infinity();
        m.mauve = gen_emb.empty() ? 0.0 : mauve_lite(gen_emb, ref_emb, cfg.mauve_bins, cfg.mauve_c);
        pool.add(m.coherence);
        computed[key] = m;
    }
    if (pool.size() > 0) {
        pool.finalize(generations_path);
    }

    std::ostringstream out;
    if (format == "csv") {
        out << kMetricCsvHeader << "\n";
    }
    for (const auto& [key, m] : computed) {
        MetricReport report;
        report.experiment_key = key;
        report.div = m.div;
        report.coherence_raw = m.coherence;
        report.coh = (pool.size() > 0 && std::isfinite(m.coherence)) ? pool.normalize(m.coherence) : 0.0;
        report.mauve = m.mauve;
        report.qtext = qtext(report.div, report.mauve, report.coh);
        report.n_generations = m.n;
        if (format == "csv") {
            out << csv_quote(report.experiment_key) << ',' << format_double(report.div) << ','
                << format_double(report.coherence_raw) << ',' << format_double(report.coh) << ','
                << format_double(report.mauve) << ',' << format_double(report.qtext) << ','
                << report.n_generations << "\n";
        } else {
            out << metric_report_jsonl(report) << "\n";
        }
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        write_file_atomically(out_path, out.str());
        std::cerr << "wrote " << computed.size() << " metric rows to " << out_path << "\n";
    }
    return kExitOk;
}

// --- sweep --------------------------------------------------------------------

int cmd_sweep(const GlobalArgs& globals) {
    RunConfig cfg = require_config(globals);
    if (globals.out.empty()) {
        throw ConfigError("--out <dir> is required for sweep");
    }
    Registry registry = Registry::from_run_config(cfg, config_dir(globals));
    SweepGrid grid = grid_from_config(cfg);
    SweepOptions options;
    options.workers = cfg.workers;
    options.evaluator = cfg.evaluator;
    options.embedder = cfg.embedder;
    options.mauve_bins = cfg.mauve_bins;
    options.mauve_c = cfg.mauve_c;
    options.config_digest = fnv1a64(cfg.source_text);
    options.progress = [](size_t done, size_t total) {
        if (done == total || done % 25 == 0) {
            std::cerr << "\r" << done << "/" << total << " cells" << (done == total ? "\n" : "") << std::flush;
        }
    };
    SweepOutcome outcome = run_sweep(registry, grid, options, globals.out);
    size_t failed = 0, degenerate = 0;
    for (const auto& row : outcome.rows) {
        failed += row.status == RowStatus::failed;
        degenerate += row.status == RowStatus::degenerate;
    }
    std::cerr << "sweep " << (outcome.complete ? "complete" : "interrupted") << ": " << outcome.plan_size
              << " cells (" << outcome.resumed << " resumed, " << failed << " failed, " << degenerate
              << " degenerate) -> " << outcome.out_dir.string() << "\n";
    return kExitOk;
}

// --- report --------------------------------------------------------------------

std::map<std::string, double> weights_from_rows(const std::vector<ResultRow>& rows) {
    // Default weights mirror record counts per dataset; n_generations of any
    // non-failed row carries exactly that count.
    std::map<std::string, double> weights;
    for (const auto& row : rows) {
        double& w = weights[row.key.dataset];
        w = std::max(w, static_cast<double>(row.metrics.n_generations));
    }
    for (auto& [id, w] : weights) {
        if (w <= 0) {
            w = 1;
        }
    }
    return weights;
}

int cmd_report(const GlobalArgs& globals, const ReportSpec& spec, const std::string& out_path) {
    std::vector<ResultRow> rows = read_results_csv(spec.results_path);
    if (rows.empty()) {
        throw InputError("'" + spec.results_path + "' holds no result rows");
    }
    auto weights = weights_from_rows(rows);
    auto aggregated = aggregate_weighted(rows, weights, spec.group_by);
    bool flagged = false;
    auto [top, bottom] = rank_strategies(aggregated, spec.metric, spec.top_n, &flagged);

    std::ostringstream out;
    out << render_aggregate_table(aggregated, spec.format, spec.group_by);
    out << "\n";
    out << render_ranking_tables(top, bottom, spec.metric, spec.format, flagged);
    size_t failed = 0;
    for (const auto& row : rows) {
        failed += row.status == RowStatus::failed;
    }
    if (failed > 0 && spec.format == ReportFormat::markdown) {
        out << "\n_" << failed << " failed cell" << (failed == 1 ? "" : "s") << " excluded._\n";
    }

    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        write_file_atomically(out_path, out.str());
    }
    return kExitOk;
}

// --- backends train ---------------------------------------------------------------

int cmd_backends_train(const std::string& corpus_path, int order, double smoothing, const std::string& name,
                       const std::string& scheme, int repr_dim, const std::string& out_path) {
    Tokenizer tokenizer(parse_tokenizer_scheme(scheme));
    auto sequences = load_corpus_sequences(corpus_path, tokenizer);
    auto backend = train_ngram_backend(sequences, order, smoothing, name, repr_dim);
    if (fs::path(out_path).has_parent_path()) {
        fs::create_directories(fs::path(out_path).parent_path());
    }
    save_ngram_backend(*backend, out_path);
    std::cerr << "trained '" << name << "' (order " << order << ", |V| " << backend->vocab().size() << ") -> "
              << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decbench: decoding strategies, metrics and sweep harness over toy language models"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GlobalArgs globals;
    app.add_option("--config", globals.config_path, "Run config (backends, datasets, grid)");
    app.add_option("--out", globals.out, "Output file or directory");
    app.add_option("--workers", globals.workers, "Worker threads for sweep");
    app.add_option("--run-seed", [&globals](const CLI::results_t& r) {
        globals.run_seed = parse_u64(r[0]);
        return true;
    }, "Run seed override");

    // generate
    auto* generate = app.add_subcommand("generate", "Decode every prompt of a dataset into a generations file");
    std::string gen_backend, gen_dataset;
    StrategyFlags gen_flags;
    uint64_t gen_seed = 0;
    int gen_max_new = -1;
    generate->add_option("--backend", gen_backend, "Backend name")->required();
    generate->add_option("--dataset", gen_dataset, "Dataset id")->required();
    add_strategy_flags(generate, gen_flags);
    generate->add_option("--seed", gen_seed, "Sampling seed");
    generate->add_option("--max-new-tokens", gen_max_new, "Continuation budget (default from config)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score a generations file (DIV, COH, MAUVE, QText)");
    std::string eval_generations, eval_evaluator, eval_embedder, eval_format = "csv";
    evaluate->add_option("--generations", eval_generations, "generations.jsonl path")->required();
    evaluate->add_option("--evaluator", eval_evaluator, "Coherence evaluator backend (default from config)");
    evaluate->add_option("--embedder", eval_embedder, "MAUVE embedder backend (default: evaluator)");
    evaluate->add_option("--format", eval_format, "csv | jsonl");

    // sweep
    app.add_subcommand("sweep", "Run the configured grid and persist results");

    // report
    auto* report = app.add_subcommand("report", "Render aggregate and ranking tables from results.csv");
    ReportSpec spec;
    std::string report_group = "strategy", report_metric = "qtext", report_format = "markdown";
    report->add_option("--results", spec.results_path, "results.csv path")->required();
    report->add_option("--group-by", report_group, "strategy | backend | dataset");
    report->add_option("--metric", report_metric, "Ranking metric: div | coh | mauve | qtext");
    report->add_option("--top", spec.top_n, "Rows in the top/bottom tables");
    report->add_option("--format", report_format, "markdown | csv");

    // backends train
    auto* backends = app.add_subcommand("backends", "Backend management");
    auto* train = backends->add_subcommand("train", "Train and serialize an n-gram backend");
    std::string train_corpus, train_name = "ngram", train_scheme = "whitespace";
    int train_order = 2, train_repr = kDefaultReprDim;
    double train_smoothing = 0.5;
    train->add_option("--corpus", train_corpus, "Raw text corpus")->required();
    train->add_option("--order", train_order, "n-gram order");
    train->add_option("--smoothing", train_smoothing, "Additive smoothing constant");
    train->add_option("--name", train_name, "Backend name");
    train->add_option("--tokenizer", train_scheme, "whitespace | byte");
    train->add_option("--repr-dim", train_repr, "Representation dimension (0 disables)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) {
            std::string out = globals.out.empty() ? "generations.jsonl" : globals.out;
            return cmd_generate(globals, gen_backend, gen_dataset, gen_flags, gen_seed, gen_max_new, out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(globals, eval_generations, eval_evaluator, eval_embedder, eval_format, globals.out);
        }
        if (app.get_subcommand("sweep")->parsed()) {
            return cmd_sweep(globals);
        }
        if (report->parsed()) {
            spec.group_by = parse_group_by(report_group);
            spec.metric = parse_rank_metric(report_metric);
            spec.format = parse_report_format(report_format);
            if (spec.top_n < 1) {
                throw ConfigError("--top must be >= 1");
            }
            return cmd_report(globals, spec, globals.out);
        }
        if (backends->parsed()) {
            if (!train->parsed()) {
                throw ConfigError("backends: expected the 'train' subcommand");
            }
            std::string out = globals.out.empty() ? train_name + ".dlm" : globals.out;
            return cmd_backends_train(train_corpus, train_order, train_smoothing, train_name, train_scheme,
                                      train_repr, out);
        }
        throw ConfigError("no subcommand given");
    } catch (const Error& e) {
        std::cerr << "decbench: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::input:
            case ErrorKind::config:
                return kExitUsage;
            case ErrorKind::capability:
                return kExitCapability;
            default:
                return kExitRuntime;
        }
    } catch (const std::exception& e) {
        std::cerr << "decbench: " << e.what() << "\n";
        return kExitRuntime;
    }
}
