#include "decbench/ngram.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"
#include "decbench/tokenizer.hpp"
#include "decbench/version.hpp"

namespace decbench {

NgramCounts::NgramCounts(int order, int vocab_size) : order_(order), vocab_size_(vocab_size) {
    if (order < 1) {
        throw InputError("ngram order must be >= 1, got " + std::to_string(order));
    }
    if (vocab_size < 2) {
        throw InputError("ngram vocabulary too small");
    }
}

std::string NgramCounts::encode_key(std::span<const int> context) {
    std::string key(context.size() * sizeof(int), '\0');
    if (!context.empty()) {
        std::memcpy(key.data(), context.data(), key.size());
    }
    return key;
}

std::vector<int> NgramCounts::decode_key(const std::string& key) {
    std::vector<int> ctx(key.size() / sizeof(int));
    if (!ctx.empty()) {
        std::memcpy(ctx.data(), key.data(), key.size());
    }
    return ctx;
}

void NgramCounts::add_sequence(std::span<const int> seq) {
    for (size_t pos = 0; pos < seq.size(); ++pos) {
        add_position(seq, pos);
    }
}

void NgramCounts::add_position(std::span<const int> seq, size_t pos) {
    if (pos >= seq.size()) {
        throw InputError("ngram position out of range");
    }
    int max_ctx = std::min<int>(order_ - 1, static_cast<int>(pos));
    for (int len = 0; len <= max_ctx; ++len) {
        auto context = seq.subspan(pos - static_cast<size_t>(len), static_cast<size_t>(len));
        add_count(context, seq[pos], 1);
    }
}

void NgramCounts::add_count(std::span<const int> context, int token, long count) {
    ContextEntry& entry = contexts_[encode_key(context)];
    entry.counts[token] += count;
    entry.total += count;
}

const NgramCounts::ContextEntry* NgramCounts::find(std::span<const int> context) const {
    auto it = contexts_.find(encode_key(context));
    return it == contexts_.end() ? nullptr : &it->second;
}

size_t NgramCounts::context_count() const {
    return contexts_.size();
}

std::vector<double> NgramCounts::distribution(std::span<const int> context, double delta) const {
    if (delta <= 0) {
        throw InputError("smoothing must be > 0");
    }
    // Back off one context level at a time until something was observed;
    // the empty context always terminates the walk (a fresh model yields
    // the uniform distribution).
    int longest = std::min<int>(order_ - 1, static_cast<int>(context.size()));
    const ContextEntry* entry = nullptr;
    for (int len = longest; len >= 0; --len) {
        entry = find(context.subspan(context.size() - static_cast<size_t>(len)));
        if (entry != nullptr && entry->total > 0) {
            break;
        }
        entry = nullptr;
    }
    std::vector<double> probs(static_cast<size_t>(vocab_size_), 0.0);
    double denom = (entry ? static_cast<double>(entry->total) : 0.0) + delta * vocab_size_;
    for (int v = 0; v < vocab_size_; ++v) {
        double num = delta;
        if (entry != nullptr) {
            auto it = entry->counts.find(v);
            if (it != entry->counts.end()) {
                num += static_cast<double>(it->second);
            }
        }
        probs[static_cast<size_t>(v)] = num / denom;
    }
    return probs;
}

NgramBackend::NgramBackend(std::string name, Vocabulary vocab, NgramCounts counts, double smoothing, int repr_dim)
    : vocab_(std::move(vocab)), counts_(std::move(counts)), smoothing_(smoothing) {
    if (smoothing_ <= 0) {
        throw InputError("smoothing must be > 0, got " + format_double(smoothing_));
    }
    if (counts_.vocab_size() != vocab_.size()) {
        throw InputError("ngram counts/vocabulary size mismatch");
    }
    descriptor_.name = std::move(name);
    descriptor_.kind = BackendKind::ngram;
    descriptor_.repr_dim = repr_dim;
    descriptor_.params["order"] = std::to_string(counts_.order());
    descriptor_.params["smoothing"] = format_double(smoothing_);
}

TokenDistribution NgramBackend::next_distribution(std::span<const int> context) const {
    check_context(context);
    TokenDistribution dist;
    dist.probs = counts_.distribution(context, smoothing_);
    return dist;
}

TokenRepresentation NgramBackend::token_representation(std::span<const int> context, int token) const {
    if (!supports_representation()) {
        return LmBackend::token_representation(context, token);
    }
    check_context(context);
    return hashed_representation(vocab_, context, token, descriptor_.repr_dim, counts_.order() - 1);
}

std::shared_ptr<NgramBackend> train_ngram_backend(std::span<const std::vector<std::string>> corpus, int order,
                                                  double smoothing, const std::string& name, int repr_dim) {
    if (corpus.empty()) {
        throw InputError("ngram training corpus is empty");
    }
    if (order < 1) {
        throw InputError("ngram order must be >= 1");
    }
    if (smoothing <= 0) {
        throw InputError("smoothing must be > 0");
    }
    bool any_tokens = false;
    for (const auto& seq : corpus) {
        any_tokens = any_tokens || !seq.empty();
    }
    if (!any_tokens) {
        throw InputError("ngram training corpus is empty");
    }
    Vocabulary vocab = build_vocabulary(corpus, /*add_unknown=*/true);
    NgramCounts counts(order, vocab.size());
    for (const auto& seq : corpus) {
        if (seq.empty()) {
            continue;
        }
        counts.add_sequence(vocab.encode(seq));
    }
    return std::make_shared<NgramBackend>(name, std::move(vocab), std::move(counts), smoothing, repr_dim);
}

void save_ngram_backend(const NgramBackend& backend, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << "decbench-ngram v1\n";
    out << "name " << percent_encode(backend.name()) << "\n";
    out << "order " << backend.order() << "\n";
    out << "smoothing " << format_double(backend.smoothing()) << "\n";
    out << "repr_dim " << backend.descriptor().repr_dim << "\n";
    out << "vocab " << backend.vocab().size() << "\n";
    for (const auto& token : backend.vocab().tokens()) {
        out << percent_encode(token) << "\n";
    }
    size_t entries = 0;
    backend.counts().for_each([&](const std::vector<int>&, int, long) { ++entries; });
    out << "entries " << entries << "\n";
    backend.counts().for_each([&](const std::vector<int>& ctx, int token, long count) {
        out << ctx.size();
        for (int id : ctx) {
            out << ' ' << id;
        }
        out << ' ' << token << ' ' << count << "\n";
    });
    if (!out.good()) {
        throw IoError("write failed for '" + path + "'");
    }
}

std::shared_ptr<NgramBackend> load_ngram_backend(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::string line;
    auto next_line = [&](const char* what) -> std::string {
        if (!std::getline(in, line)) {
            throw InputError(std::string("truncated ngram file '") + path + "' (expected " + what + ")");
        }
        return line;
    };
    if (next_line("header") != "decbench-ngram v1") {
        throw InputError("'" + path + "' is not a decbench-ngram v1 file");
    }
    auto read_kv = [&](const char* key) -> std::string {
        auto fields = split_fields(next_line(key));
        if (fields.size() != 2 || fields[0] != key) {
            throw InputError("expected '" + std::string(key) + "' line in '" + path + "'");
        }
        return std::string(fields[1]);
    };
    std::string name = percent_decode(read_kv("name"));
    int order = static_cast<int>(parse_long(read_kv("order")));
    double smoothing = parse_double(read_kv("smoothing"));
    int repr_dim = static_cast<int>(parse_long(read_kv("repr_dim")));
    int vocab_size = static_cast<int>(parse_long(read_kv("vocab")));
    std::vector<std::string> tokens;
    tokens.reserve(static_cast<size_t>(vocab_size));
    for (int i = 0; i < vocab_size; ++i) {
        tokens.push_back(percent_decode(next_line("vocab token")));
    }
    Vocabulary vocab(std::move(tokens));
    size_t entries = static_cast<size_t>(parse_long(read_kv("entries")));
    NgramCounts counts(order, vocab.size());
    for (size_t i = 0; i < entries; ++i) {
        auto fields = split_fields(next_line("count entry"));
        if (fields.size() < 3) {
            throw InputError("malformed count entry in '" + path + "'");
        }
        size_t ctx_len = static_cast<size_t>(parse_long(fields[0]));
        if (fields.size() != ctx_len + 3) {
            throw InputError("malformed count entry in '" + path + "'");
        }
        std::vector<int> ctx(ctx_len);
        for (size_t j = 0; j < ctx_len; ++j) {
            ctx[j] = static_cast<int>(parse_long(fields[1 + j]));
        }
        int token = static_cast<int>(parse_long(fields[1 + ctx_len]));
        long count = parse_long(fields[2 + ctx_len]);
        counts.add_count(ctx, token, count);
    }
    return std::make_shared<NgramBackend>(name, std::move(vocab), std::move(counts), smoothing, repr_dim);
}

}  // namespace decbench
