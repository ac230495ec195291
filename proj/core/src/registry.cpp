#include "decbench/registry.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "decbench/errors.hpp"
#include "decbench/fixed_table.hpp"
#include "decbench/ngram.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

namespace fs = std::filesystem;

void Registry::add_backend(std::shared_ptr<const LmBackend> backend) {
    const std::string& name = backend->name();
    if (!backends_.emplace(name, std::move(backend)).second) {
        throw ConfigError("duplicate backend name '" + name + "'");
    }
}

void Registry::add_dataset(Dataset dataset) {
    std::string id = dataset.id;
    if (!datasets_.emplace(id, std::move(dataset)).second) {
        throw ConfigError("duplicate dataset id '" + id + "'");
    }
}

const LmBackend& Registry::backend(const std::string& name) const {
    const LmBackend* b = find_backend(name);
    if (b == nullptr) {
        throw ConfigError("unknown backend '" + name + "'");
    }
    return *b;
}

const LmBackend* Registry::find_backend(const std::string& name) const {
    auto it = backends_.find(name);
    return it == backends_.end() ? nullptr : it->second.get();
}

const Dataset& Registry::dataset(const std::string& id) const {
    const Dataset* d = find_dataset(id);
    if (d == nullptr) {
        throw ConfigError("unknown dataset '" + id + "'");
    }
    return *d;
}

const Dataset* Registry::find_dataset(const std::string& id) const {
    auto it = datasets_.find(id);
    return it == datasets_.end() ? nullptr : &it->second;
}

std::vector<std::string> Registry::backend_names() const {
    std::vector<std::string> names;
    names.reserve(backends_.size());
    for (const auto& [name, _] : backends_) {
        names.push_back(name);
    }
    return names;
}

std::vector<std::string> Registry::dataset_ids() const {
    std::vector<std::string> ids;
    ids.reserve(datasets_.size());
    for (const auto& [id, _] : datasets_) {
        ids.push_back(id);
    }
    return ids;
}

std::map<std::string, double> Registry::dataset_weights() const {
    std::map<std::string, double> weights;
    for (const auto& [id, dataset] : datasets_) {
        weights[id] = dataset.weight();
    }
    return weights;
}

static std::string resolve_path(const std::string& path, const std::string& base_dir) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) {
        return path;
    }
    return (fs::path(base_dir) / p).string();
}

Registry Registry::from_run_config(const RunConfig& config, const std::string& base_dir) {
    Registry registry;
    for (const auto& [name, path] : config.backends) {
        registry.add_backend(load_backend_config(resolve_path(path, base_dir), name, base_dir));
    }
    Tokenizer tokenizer(config.tokenizer);
    for (const auto& [id, path] : config.datasets) {
        std::string resolved = resolve_path(path, base_dir);
        registry.add_dataset(
            load_dataset(resolved, infer_dataset_format(resolved), tokenizer, id, config.prefix_len));
    }
    return registry;
}

std::shared_ptr<const LmBackend> parse_backend_config(const std::string& text, const std::string& name,
                                                      const std::string& base_dir) {
    std::string kind;
    std::string file_name;
    int order = 2;
    double smoothing = 0.5;
    std::string corpus_path;
    std::string model_path;
    TokenizerScheme scheme = TokenizerScheme::whitespace;
    int repr_dim = kDefaultReprDim;
    int repr_context = 1;
    std::vector<std::string> vocab_tokens;
    std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;

    std::istringstream in(text);
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fields = split_fields(line);
        std::string_view key = fields[0];
        auto fail = [&](const std::string& msg) -> void {
            throw ConfigError("backend config line " + std::to_string(line_no) + ": " + msg);
        };
        try {
            if (key == "kind" && fields.size() == 2) {
                kind = std::string(fields[1]);
            } else if (key == "name" && fields.size() == 2) {
                file_name = std::string(fields[1]);
            } else if (key == "order" && fields.size() == 2) {
                order = static_cast<int>(parse_long(fields[1]));
            } else if (key == "smoothing" && fields.size() == 2) {
                smoothing = parse_double(fields[1]);
            } else if (key == "corpus" && fields.size() == 2) {
                corpus_path = std::string(fields[1]);
            } else if (key == "model" && fields.size() == 2) {
                model_path = std::string(fields[1]);
            } else if (key == "tokenizer" && fields.size() == 2) {
                scheme = parse_tokenizer_scheme(fields[1]);
            } else if (key == "repr_dim" && fields.size() == 2) {
                repr_dim = static_cast<int>(parse_long(fields[1]));
            } else if (key == "repr_context" && fields.size() == 2) {
                repr_context = static_cast<int>(parse_long(fields[1]));
            } else if (key == "vocab" && fields.size() >= 2) {
                for (size_t i = 1; i < fields.size(); ++i) {
                    vocab_tokens.push_back(percent_decode(fields[i]));
                }
            } else if (key == "row" && fields.size() >= 3) {
                // row <ctx tokens or -> <probs...>; '-' marks the empty context
                std::vector<std::string> ctx;
                std::vector<double> probs;
                size_t i = 1;
                for (; i < fields.size(); ++i) {
                    // Context tokens come first; the probability tail starts
                    // at the first field that parses as a number.
                    try {
                        (void)parse_double(fields[i]);
                        break;
                    } catch (const Error&) {
                        if (fields[i] != "-") {
                            ctx.push_back(percent_decode(fields[i]));
                        }
                    }
                }
                for (; i < fields.size(); ++i) {
                    probs.push_back(parse_double(fields[i]));
                }
                rows.emplace_back(std::move(ctx), std::move(probs));
            } else {
                fail("unknown or malformed directive '" + std::string(key) + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    std::string backend_name = name.empty() ? file_name : name;
    if (backend_name.empty()) {
        throw ConfigError("backend config has no name");
    }
    if (kind == "fixed-table") {
        FixedTableBackend::Builder builder;
        builder.name(backend_name).tokens(std::move(vocab_tokens)).repr_dim(repr_dim).repr_context(repr_context);
        for (auto& [ctx, probs] : rows) {
            builder.row(ctx, std::move(probs));
        }
        return builder.build();
    }
    if (kind == "ngram") {
        if (corpus_path.empty()) {
            throw ConfigError("ngram backend needs a corpus path");
        }
        Tokenizer tokenizer(scheme);
        auto sequences = load_corpus_sequences(resolve_path(corpus_path, base_dir), tokenizer);
        return train_ngram_backend(sequences, order, smoothing, backend_name, repr_dim);
    }
    if (kind == "ngram-file") {
        if (model_path.empty()) {
            throw ConfigError("ngram-file backend needs a model path");
        }
        auto loaded = load_ngram_backend(resolve_path(model_path, base_dir));
        if (!name.empty() && loaded->name() != name) {
            // Rebuild under the registry name; counts are shared state.
            return std::make_shared<NgramBackend>(name, loaded->vocab(), loaded->counts(), loaded->smoothing(),
                                                  loaded->descriptor().repr_dim);
        }
        return loaded;
    }
    throw ConfigError("unknown backend kind '" + kind + "' (expected fixed-table, ngram or ngram-file)");
}

std::shared_ptr<const LmBackend> load_backend_config(const std::string& path, const std::string& name,
                                                     const std::string& base_dir) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read backend config '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    // Paths inside the backend config resolve against its own directory.
    std::string own_dir = fs::path(path).parent_path().string();
    return parse_backend_config(buf.str(), name, own_dir.empty() ? base_dir : own_dir);
}

}  // namespace decbench
