#include "decbench/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "decbench/errors.hpp"
#include "decbench/hash.hpp"
#include "decbench/mauve.hpp"
#include "decbench/strconv.hpp"
#include "decbench/version.hpp"

namespace decbench {

namespace fs = std::filesystem;

SweepGrid grid_from_config(const RunConfig& config) {
    SweepGrid grid;
    for (const auto& [name, _] : config.backends) {
        grid.backends.push_back(name);
    }
    for (const auto& [id, _] : config.datasets) {
        grid.datasets.push_back(id);
    }
    grid.strategies = config.strategies;
    grid.replicas = config.replicas;
    grid.max_new_tokens = config.max_new_tokens;
    grid.run_seed = config.run_seed;
    return grid;
}

std::vector<StrategyAxis> reproduction_strategy_axes(const std::string& acs_backend) {
    std::vector<StrategyAxis> axes;
    StrategyAxis beam;
    beam.strategy = Strategy::beam;
    beam.values["w"] = {3, 5, 10, 15, 20, 50};
    axes.push_back(beam);
    StrategyAxis cs;
    cs.strategy = Strategy::contrastive_search;
    cs.values["alpha"] = {0.2, 0.4, 0.6, 0.8, 1.0};
    cs.values["k"] = {1, 3, 5, 10, 15, 20, 50};
    axes.push_back(cs);
    StrategyAxis acs;
    acs.strategy = Strategy::adaptive_contrastive_search;
    if (!acs_backend.empty()) {
        acs.backend_filter.push_back(acs_backend);
    }
    axes.push_back(acs);
    StrategyAxis temp;
    temp.strategy = Strategy::temperature;
    temp.values["t"] = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
    axes.push_back(temp);
    StrategyAxis topk;
    topk.strategy = Strategy::top_k;
    topk.values["k"] = {1, 3, 5, 10, 15, 20, 50};
    axes.push_back(topk);
    StrategyAxis topp;
    topp.strategy = Strategy::top_p;
    topp.values["p"] = {0.6, 0.7, 0.8, 0.9, 0.95};
    axes.push_back(topp);
    return axes;
}

std::string ExperimentKey::cell_id() const {
    return backend + "|" + dataset + "|" + config.key() + "|" + std::to_string(replica);
}

std::string ExperimentKey::to_string() const {
    return backend + "|" + dataset + "|" + config.key() + "|" + format_u64(seed);
}

namespace {

// Hyperparameter fields per strategy in canonical key order.
std::vector<std::string> strategy_fields(Strategy s) {
    switch (s) {
        case Strategy::beam: return {"w"};
        case Strategy::temperature: return {"t"};
        case Strategy::top_k: return {"k"};
        case Strategy::top_p: return {"p"};
        case Strategy::typical: return {"tau"};
        case Strategy::contrastive_search: return {"alpha", "k"};
        case Strategy::fsd: return {"k", "beta"};
        case Strategy::contrastive_decoding: return {"k"};
        default: return {};
    }
}

DecodingConfig config_from_values(const StrategyAxis& axis, const std::vector<double>& combo,
                                  const std::vector<std::string>& fields) {
    DecodingConfig cfg;
    cfg.strategy = axis.strategy;
    for (size_t i = 0; i < fields.size(); ++i) {
        const std::string& f = fields[i];
        double v = combo[i];
        if (f == "w") cfg.w = static_cast<int>(v);
        else if (f == "k") cfg.k = static_cast<int>(v);
        else if (f == "p") cfg.p = v;
        else if (f == "t") cfg.t = v;
        else if (f == "alpha") cfg.alpha = v;
        else if (f == "tau") cfg.tau = v;
        else if (f == "beta") cfg.beta = v;
    }
    if (axis.strategy == Strategy::contrastive_decoding) {
        if (axis.amateur.empty()) {
            throw ConfigError("contrastive decoding axis needs amateur=<backend>");
        }
        cfg.amateur = axis.amateur;
    }
    cfg.validate();
    return cfg;
}

uint64_t derive_seed(const ExperimentKey& key, uint64_t run_seed) {
    return fnv1a64(key.cell_id()) ^ run_seed;
}

}  // namespace

std::vector<ExperimentKey> expand_grid(const SweepGrid& grid) {
    if (grid.backends.empty()) {
        throw ConfigError("sweep grid has no backends");
    }
    if (grid.datasets.empty()) {
        throw ConfigError("sweep grid has no datasets");
    }
    if (grid.strategies.empty()) {
        throw ConfigError("sweep grid has no strategies");
    }
    if (grid.replicas < 1) {
        throw ConfigError("replicas must be >= 1");
    }

    std::vector<std::string> backends = grid.backends;
    std::sort(backends.begin(), backends.end());
    std::vector<std::string> datasets = grid.datasets;
    std::sort(datasets.begin(), datasets.end());
    std::vector<StrategyAxis> axes = grid.strategies;
    std::stable_sort(axes.begin(), axes.end(), [](const StrategyAxis& a, const StrategyAxis& b) {
        return static_cast<int>(a.strategy) < static_cast<int>(b.strategy);
    });

    std::vector<ExperimentKey> keys;
    for (const std::string& backend : backends) {
        for (const std::string& dataset : datasets) {
            for (const StrategyAxis& axis : axes) {
                if (!axis.backend_filter.empty() &&
                    std::find(axis.backend_filter.begin(), axis.backend_filter.end(), backend) ==
                        axis.backend_filter.end()) {
                    continue;
                }
                std::vector<std::string> fields = strategy_fields(axis.strategy);
                std::vector<std::vector<double>> lists;
                for (const std::string& f : fields) {
                    auto it = axis.values.find(f);
                    if (it == axis.values.end()) {
                        throw ConfigError(std::string("strategy '") + strategy_short_name(axis.strategy) +
                                          "' is missing values for '" + f + "'");
                    }
                    std::vector<double> sorted = it->second;
                    std::sort(sorted.begin(), sorted.end());
                    lists.push_back(std::move(sorted));
                }
                for (const auto& [field, _] : axis.values) {
                    if (std::find(fields.begin(), fields.end(), field) == fields.end()) {
                        throw ConfigError(std::string("strategy '") + strategy_short_name(axis.strategy) +
                                          "' does not take '" + field + "'");
                    }
                }
                // Odometer over the value lists, first field outermost.
                std::vector<size_t> idx(lists.size(), 0);
                while (true) {
                    std::vector<double> combo(lists.size());
                    for (size_t i = 0; i < lists.size(); ++i) {
                        combo[i] = lists[i][idx[i]];
                    }
                    DecodingConfig cfg = config_from_values(axis, combo, fields);
                    int replicas = strategy_is_deterministic(cfg.strategy) ? 1 : grid.replicas;
                    for (int r = 0; r < replicas; ++r) {
                        ExperimentKey key;
                        key.backend = backend;
                        key.dataset = dataset;
                        key.config = cfg;
                        key.replica = r;
                        key.seed = strategy_is_deterministic(cfg.strategy) ? 0 : derive_seed(key, grid.run_seed);
                        keys.push_back(std::move(key));
                    }
                    size_t d = lists.size();
                    while (d > 0) {
                        --d;
                        if (++idx[d] < lists[d].size()) {
                            break;
                        }
                        idx[d] = 0;
                        if (d == 0) {
                            d = SIZE_MAX;
                            break;
                        }
                    }
                    if (lists.empty() || d == SIZE_MAX) {
                        break;
                    }
                }
            }
        }
    }
    return keys;
}

const char* row_status_name(RowStatus status) {
    switch (status) {
        case RowStatus::ok: return "ok";
        case RowStatus::degenerate: return "degenerate";
        case RowStatus::failed: return "failed";
    }
    return "?";
}

RowStatus parse_row_status(std::string_view name) {
    if (name == "ok") return RowStatus::ok;
    if (name == "degenerate") return RowStatus::degenerate;
    if (name == "failed") return RowStatus::failed;
    throw InputError("unknown row status '" + std::string(name) + "'");
}

// --- single cell ------------------------------------------------------------

CellResult run_experiment(const Registry& registry, const ExperimentKey& key, const Dataset& dataset,
                          int max_new_tokens, const SweepOptions& options) {
    CellResult cell;
    cell.key = key;
    auto started = std::chrono::steady_clock::now();
    auto finish = [&]() {
        cell.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                             started)
                           .count();
        return cell;
    };
    auto fail = [&](const std::string& reason) {
        cell.status = RowStatus::failed;
        cell.fail_reason = reason;
        cell.div = cell.coherence_raw = cell.mauve = std::numeric_limits<double>::quiet_NaN();
        cell.generations.clear();
        cell.n_generations = 0;
        return finish();
    };

    const LmBackend* backend = registry.find_backend(key.backend);
    if (backend == nullptr) {
        return fail("unknown backend '" + key.backend + "'");
    }
    if (strategy_needs_representation(key.config.strategy) && !backend->supports_representation()) {
        return fail("backend '" + key.backend + "' has no representations");
    }
    const LmBackend* amateur = nullptr;
    if (key.config.strategy == Strategy::contrastive_decoding) {
        amateur = registry.find_backend(*key.config.amateur);
        if (amateur == nullptr) {
            return fail("unknown amateur backend '" + *key.config.amateur + "'");
        }
        if (!(amateur->vocab() == backend->vocab())) {
            return fail("amateur vocabulary differs from '" + key.backend + "'");
        }
    }
    const LmBackend* evaluator = backend;
    if (!options.evaluator.empty()) {
        evaluator = registry.find_backend(options.evaluator);
        if (evaluator == nullptr) {
            return fail("unknown evaluator backend '" + options.evaluator + "'");
        }
    }
    const LmBackend* embedder = evaluator;
    if (!options.embedder.empty()) {
        embedder = registry.find_backend(options.embedder);
        if (embedder == nullptr) {
            return fail("unknown embedder backend '" + options.embedder + "'");
        }
    }

    bool degenerate = false;
    double div_sum = 0;
    double coherence_sum = 0;
    long coherence_n = 0;
    std::vector<Embedding> gen_embeddings;
    std::vector<Embedding> ref_embeddings;
    try {
        for (const PromptRecord& prompt : dataset.records) {
            std::vector<int> prompt_ids = backend->vocab().encode(prompt.prompt);
            GenerationRecord rec = run_decoding(*backend, prompt_ids, key.config,
                                                key.seed ^ fnv1a64(prompt.prompt_id), max_new_tokens, amateur);
            rec.dataset_id = dataset.id;
            rec.prompt_id = prompt.prompt_id;
            GenerationText text = to_text(rec, backend->vocab());

            DiversityResult div = diversity(text.continuation);
            degenerate = degenerate || div.degenerate;
            div_sum += div.value;

            if (text.continuation.empty()) {
                degenerate = true;  // nothing to score or embed
            } else {
                double coh = coherence_raw(*evaluator, text.prompt, text.continuation);
                if (std::isinf(coh)) {
                    degenerate = true;
                }
                coherence_sum += coh;
                ++coherence_n;
                gen_embeddings.push_back(embed_tokens(*embedder, text.continuation));
            }
            cell.generations.push_back(std::move(text));
        }
        for (const PromptRecord& prompt : dataset.records) {
            ref_embeddings.push_back(embed_tokens(*embedder, prompt.gold));
        }
    } catch (const Error& e) {
        return fail(e.what());
    }

    cell.n_generations = static_cast<long>(cell.generations.size());
    cell.div = cell.n_generations > 0 ? div_sum / static_cast<double>(cell.n_generations) : 0.0;
    cell.coherence_raw =
        coherence_n > 0 ? coherence_sum / static_cast<double>(coherence_n) : -std::numeric_limits<double>::infinity();
    if (coherence_n == 0) {
        degenerate = true;
    }
    try {
        cell.mauve = gen_embeddings.empty() ? 0.0
                                            : mauve_lite(gen_embeddings, ref_embeddings, options.mauve_bins,
                                                         options.mauve_c);
    } catch (const Error& e) {
        return fail(e.what());
    }
    cell.status = degenerate ? RowStatus::degenerate : RowStatus::ok;
    return finish();
}

// --- journal -----------------------------------------------------------------

namespace {

std::string cell_to_jsonl(const CellResult& cell) {
    nlohmann::ordered_json j;
    j["key"] = cell.key.to_string();
    j["backend"] = cell.key.backend;
    j["dataset"] = cell.key.dataset;
    j["strategy"] = cell.key.strategy_key();
    j["seed"] = cell.key.seed;
    j["replica"] = cell.key.replica;
    j["status"] = row_status_name(cell.status);
    j["reason"] = cell.fail_reason;
    j["div"] = format_double(cell.div);
    j["coherence_raw"] = format_double(cell.coherence_raw);
    j["mauve"] = format_double(cell.mauve);
    j["n_generations"] = cell.n_generations;
    j["wall_ms"] = cell.wall_ms;
    nlohmann::ordered_json gens = nlohmann::ordered_json::array();
    for (const auto& g : cell.generations) {
        gens.push_back(nlohmann::ordered_json::parse(generation_to_jsonl(g)));
    }
    j["generations"] = std::move(gens);
    return j.dump();
}

CellResult cell_from_jsonl(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    CellResult cell;
    cell.key.backend = j.at("backend").get<std::string>();
    cell.key.dataset = j.at("dataset").get<std::string>();
    cell.key.config = DecodingConfig::parse_key(j.at("strategy").get<std::string>());
    cell.key.seed = j.at("seed").get<uint64_t>();
    cell.key.replica = j.at("replica").get<int>();
    cell.status = parse_row_status(j.at("status").get<std::string>());
    cell.fail_reason = j.at("reason").get<std::string>();
    cell.div = parse_double(j.at("div").get<std::string>());
    cell.coherence_raw = parse_double(j.at("coherence_raw").get<std::string>());
    cell.mauve = parse_double(j.at("mauve").get<std::string>());
    cell.n_generations = j.at("n_generations").get<long>();
    cell.wall_ms = j.at("wall_ms").get<long>();
    for (const auto& g : j.at("generations")) {
        cell.generations.push_back(generation_from_jsonl(g.dump()));
    }
    return cell;
}

}  // namespace

std::vector<ResultRow> finalize_rows(std::span<const ExperimentKey> plan,
                                     const std::map<std::string, CellResult>& cells, const std::string& scope_id) {
    NormalizationPool pool;
    for (const auto& key : plan) {
        auto it = cells.find(key.to_string());
        if (it == cells.end()) {
            throw InputError("missing cell '" + key.to_string() + "' at finalization");
        }
        if (it->second.status != RowStatus::failed) {
            pool.add(it->second.coherence_raw);
        }
    }
    bool have_pool = pool.size() > 0;
    if (have_pool) {
        pool.finalize(scope_id);
    }

    std::vector<ResultRow> rows;
    rows.reserve(plan.size());
    for (const auto& key : plan) {
        const CellResult& cell = cells.at(key.to_string());
        ResultRow row;
        row.key = key;
        row.status = cell.status;
        row.fail_reason = cell.fail_reason;
        row.wall_ms = cell.wall_ms;
        row.metrics.experiment_key = key.to_string();
        row.metrics.n_generations = cell.n_generations;
        if (cell.status == RowStatus::failed) {
            double nan = std::numeric_limits<double>::quiet_NaN();
            row.metrics.div = nan;
            row.metrics.coherence_raw = nan;
            row.metrics.coh = nan;
            row.metrics.mauve = nan;
            row.metrics.qtext = nan;
        } else {
            row.metrics.div = cell.div;
            row.metrics.coherence_raw = cell.coherence_raw;
            row.metrics.mauve = cell.mauve;
            row.metrics.coh =
                (have_pool && std::isfinite(cell.coherence_raw)) ? pool.normalize(cell.coherence_raw) : 0.0;
            row.metrics.qtext = qtext(row.metrics.div, row.metrics.mauve, row.metrics.coh);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- persistence ---------------------------------------------------------------

namespace {

std::string result_row_line(const ResultRow& row) {
    std::string out = csv_quote(row.metrics.experiment_key);
    out += ',';
    out += format_double(row.metrics.div);
    out += ',';
    out += format_double(row.metrics.coherence_raw);
    out += ',';
    out += format_double(row.metrics.coh);
    out += ',';
    out += format_double(row.metrics.mauve);
    out += ',';
    out += format_double(row.metrics.qtext);
    out += ',';
    out += std::to_string(row.metrics.n_generations);
    out += ',';
    out += csv_quote(row.key.backend);
    out += ',';
    out += csv_quote(row.key.dataset);
    out += ',';
    out += csv_quote(row.key.strategy_key());
    out += ',';
    out += format_u64(row.key.seed);
    out += ',';
    out += row_status_name(row.status);
    out += ',';
    out += std::to_string(row.wall_ms);
    return out;
}

}  // namespace

void write_results_csv(const std::string& path, std::span<const ResultRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << kResultsCsvHeader << "\n";
    for (const auto& row : rows) {
        out << result_row_line(row) << "\n";
    }
    if (!out.good()) {
        throw IoError("write failed for '" + path + "'");
    }
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || trim(line) != kResultsCsvHeader) {
        throw InputError("'" + path + "' is not a decbench results.csv");
    }
    std::vector<ResultRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = csv_split_line(std::string(trim(line)));
        if (fields.size() != 13) {
            throw InputError(path + " line " + std::to_string(line_no) + ": expected 13 fields, got " +
                             std::to_string(fields.size()));
        }
        ResultRow row;
        row.metrics.experiment_key = fields[0];
        row.metrics.div = parse_double(fields[1]);
        row.metrics.coherence_raw = parse_double(fields[2]);
        row.metrics.coh = parse_double(fields[3]);
        row.metrics.mauve = parse_double(fields[4]);
        row.metrics.qtext = parse_double(fields[5]);
        row.metrics.n_generations = parse_long(fields[6]);
        row.key.backend = fields[7];
        row.key.dataset = fields[8];
        row.key.config = DecodingConfig::parse_key(fields[9]);
        row.key.seed = parse_u64(fields[10]);
        row.status = parse_row_status(fields[11]);
        row.wall_ms = parse_long(fields[12]);
        rows.push_back(std::move(row));
    }
    return rows;
}

uint64_t results_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    uint64_t digest = 0xcbf29ce484222325ull;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (view != kResultsCsvHeader) {
            // wall_ms is the last CSV column and never quoted.
            size_t cut = view.rfind(',');
            if (cut != std::string_view::npos) {
                view = view.substr(0, cut);
            }
        }
        digest = fnv1a64(view, digest);
        digest = fnv1a64("\n", digest);
    }
    return digest;
}

uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

// --- runner ------------------------------------------------------------------

SweepOutcome run_sweep(const Registry& registry, const SweepGrid& grid, const SweepOptions& options,
                       const fs::path& out_dir) {
    if (options.workers < 1) {
        throw ConfigError("workers must be >= 1");
    }
    std::vector<ExperimentKey> plan = expand_grid(grid);
    fs::create_directories(out_dir);
    fs::path journal_path = out_dir / "journal.jsonl";

    SweepOutcome outcome;
    outcome.out_dir = out_dir;
    outcome.plan_size = plan.size();

    std::map<std::string, CellResult> done;
    std::map<std::string, const ExperimentKey*> plan_index;
    for (const auto& key : plan) {
        plan_index[key.to_string()] = &key;
    }
    if (fs::exists(journal_path)) {
        std::ifstream in(journal_path, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) {
                continue;
            }
            try {
                CellResult cell = cell_from_jsonl(line);
                std::string id = cell.key.to_string();
                if (plan_index.count(id) && !done.count(id)) {
                    done.emplace(id, std::move(cell));
                }
            } catch (const std::exception&) {
                // Torn tail line from an interrupted run; everything after
                // it is recomputed.
                break;
            }
        }
    }
    outcome.resumed = done.size();

    std::vector<const ExperimentKey*> pending;
    for (const auto& key : plan) {
        if (!done.count(key.to_string())) {
            pending.push_back(&key);
        }
    }
    size_t budget = pending.size();
    if (options.stop_after_rows >= 0) {
        budget = std::min(budget, static_cast<size_t>(options.stop_after_rows));
    }

    std::ofstream journal(journal_path, std::ios::binary | std::ios::app);
    if (!journal) {
        throw IoError("cannot append to '" + journal_path.string() + "'");
    }

    std::mutex mu;
    std::atomic<size_t> next{0};
    std::atomic<size_t> completed{0};
    std::exception_ptr first_error;

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= budget) {
                return;
            }
            const ExperimentKey& key = *pending[i];
            try {
                const Dataset& dataset = registry.dataset(key.dataset);
                CellResult cell = run_experiment(registry, key, dataset, grid.max_new_tokens, options);
                std::lock_guard<std::mutex> lock(mu);
                journal << cell_to_jsonl(cell) << "\n";
                journal.flush();
                done.emplace(key.to_string(), std::move(cell));
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
            size_t c = completed.fetch_add(1) + 1;
            if (options.progress) {
                options.progress(outcome.resumed + c, plan.size());
            }
        }
    };

    if (options.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(options.workers));
        for (int i = 0; i < options.workers; ++i) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    outcome.executed = completed.load();

    if (done.size() < plan.size()) {
        return outcome;  // stopped early; resume later
    }

    std::string scope_id = out_dir.filename().string();
    outcome.rows = finalize_rows(plan, done, scope_id.empty() ? "run" : scope_id);
    write_results_csv((out_dir / "results.csv").string(), outcome.rows);

    std::ofstream gens(out_dir / "generations.jsonl", std::ios::binary);
    if (!gens) {
        throw IoError("cannot write generations.jsonl");
    }
    for (const auto& key : plan) {
        for (const auto& g : done.at(key.to_string()).generations) {
            gens << generation_to_jsonl(g) << "\n";
        }
    }
    if (!gens.good()) {
        throw IoError("write failed for generations.jsonl");
    }

    std::ofstream manifest(out_dir / "manifest", std::ios::binary);
    manifest << "decbench-manifest v1\n";
    manifest << "version " << kVersion << "\n";
    manifest << "run_seed " << format_u64(grid.run_seed) << "\n";
    manifest << "config_digest " << format_u64(options.config_digest) << "\n";
    manifest << "plan_size " << plan.size() << "\n";
    manifest << "replicas " << grid.replicas << "\n";
    manifest << "max_new_tokens " << grid.max_new_tokens << "\n";

    outcome.complete = true;
    return outcome;
}

}  // namespace decbench
