#include "decbench/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "decbench/errors.hpp"
#include "decbench/hash.hpp"
#include "decbench/ngram.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

const char* strategy_short_name(Strategy s) {
    switch (s) {
        case Strategy::greedy: return "greedy";
        case Strategy::beam: return "beam";
        case Strategy::temperature: return "temp";
        case Strategy::top_k: return "topk";
        case Strategy::top_p: return "topp";
        case Strategy::typical: return "typical";
        case Strategy::contrastive_search: return "cs";
        case Strategy::adaptive_contrastive_search: return "acs";
        case Strategy::fsd: return "fsd";
        case Strategy::contrastive_decoding: return "cd";
    }
    return "?";
}

Strategy parse_strategy_name(std::string_view short_name) {
    for (Strategy s : {Strategy::greedy, Strategy::beam, Strategy::temperature, Strategy::top_k, Strategy::top_p,
                       Strategy::typical, Strategy::contrastive_search, Strategy::adaptive_contrastive_search,
                       Strategy::fsd, Strategy::contrastive_decoding}) {
        if (short_name == strategy_short_name(s)) {
            return s;
        }
    }
    throw ConfigError("unknown strategy '" + std::string(short_name) + "'");
}

bool strategy_is_deterministic(Strategy s) {
    switch (s) {
        case Strategy::temperature:
        case Strategy::top_k:
        case Strategy::top_p:
        case Strategy::typical:
            return false;
        default:
            return true;
    }
}

bool strategy_needs_representation(Strategy s) {
    return s == Strategy::contrastive_search || s == Strategy::adaptive_contrastive_search;
}

// --- DecodingConfig -------------------------------------------------------

void DecodingConfig::validate() const {
    auto require = [&](bool cond, const char* msg) {
        if (!cond) {
            throw ConfigError(std::string(strategy_short_name(strategy)) + ": " + msg);
        }
    };
    int set_count = (w ? 1 : 0) + (k ? 1 : 0) + (p ? 1 : 0) + (t ? 1 : 0) + (alpha ? 1 : 0) + (tau ? 1 : 0) +
                    (beta ? 1 : 0) + (amateur ? 1 : 0);
    switch (strategy) {
        case Strategy::greedy:
        case Strategy::adaptive_contrastive_search:
            require(set_count == 0, "takes no hyperparameters");
            break;
        case Strategy::beam:
            require(set_count == 1 && w.has_value(), "takes exactly w");
            require(*w >= 1, "w must be >= 1");
            break;
        case Strategy::temperature:
            require(set_count == 1 && t.has_value(), "takes exactly t");
            require(*t > 0, "t must be > 0");
            break;
        case Strategy::top_k:
            require(set_count == 1 && k.has_value(), "takes exactly k");
            require(*k >= 1, "k must be >= 1");
            break;
        case Strategy::top_p:
            require(set_count == 1 && p.has_value(), "takes exactly p");
            require(*p > 0 && *p <= 1, "p must be in (0, 1]");
            break;
        case Strategy::typical:
            require(set_count == 1 && tau.has_value(), "takes exactly tau");
            require(*tau > 0 && *tau <= 1, "tau must be in (0, 1]");
            break;
        case Strategy::contrastive_search:
            require(set_count == 2 && alpha.has_value() && k.has_value(), "takes exactly alpha and k");
            require(*alpha >= 0 && *alpha <= 1, "alpha must be in [0, 1]");
            require(*k >= 1, "k must be >= 1");
            break;
        case Strategy::fsd:
            require(set_count == 2 && k.has_value() && beta.has_value(), "takes exactly k and beta");
            require(*k >= 1, "k must be >= 1");
            require(*beta >= 0, "beta must be >= 0");
            break;
        case Strategy::contrastive_decoding:
            require(set_count == 2 && k.has_value() && amateur.has_value(), "takes exactly k and amateur");
            require(*k >= 1, "k must be >= 1");
            require(!amateur->empty(), "amateur backend name must be non-empty");
            break;
    }
}

std::string DecodingConfig::key() const {
    validate();
    std::string out = strategy_short_name(strategy);
    switch (strategy) {
        case Strategy::greedy:
        case Strategy::adaptive_contrastive_search:
            break;
        case Strategy::beam:
            out += "[w=" + std::to_string(*w) + "]";
            break;
        case Strategy::temperature:
            out += "[t=" + format_double(*t) + "]";
            break;
        case Strategy::top_k:
            out += "[k=" + std::to_string(*k) + "]";
            break;
        case Strategy::top_p:
            out += "[p=" + format_double(*p) + "]";
            break;
        case Strategy::typical:
            out += "[tau=" + format_double(*tau) + "]";
            break;
        case Strategy::contrastive_search:
            out += "[alpha=" + format_double(*alpha) + ",k=" + std::to_string(*k) + "]";
            break;
        case Strategy::fsd:
            out += "[k=" + std::to_string(*k) + ",beta=" + format_double(*beta) + "]";
            break;
        case Strategy::contrastive_decoding:
            out += "[k=" + std::to_string(*k) + ",amateur=" + *amateur + "]";
            break;
    }
    return out;
}

DecodingConfig DecodingConfig::parse_key(std::string_view key) {
    key = trim(key);
    std::string_view name = key;
    std::string_view args;
    size_t bracket = key.find('[');
    if (bracket != std::string_view::npos) {
        if (key.back() != ']') {
            throw ConfigError("malformed strategy key '" + std::string(key) + "'");
        }
        name = key.substr(0, bracket);
        args = key.substr(bracket + 1, key.size() - bracket - 2);
    }
    DecodingConfig cfg;
    cfg.strategy = parse_strategy_name(name);

    if (!args.empty()) {
        for (auto part : split_char(args, ',')) {
            auto eq = part.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("malformed strategy key '" + std::string(key) + "'");
            }
            std::string_view field = part.substr(0, eq);
            std::string_view value = part.substr(eq + 1);
            if (field == "w") cfg.w = static_cast<int>(parse_long(value));
            else if (field == "k") cfg.k = static_cast<int>(parse_long(value));
            else if (field == "p") cfg.p = parse_double(value);
            else if (field == "t") cfg.t = parse_double(value);
            else if (field == "alpha") cfg.alpha = parse_double(value);
            else if (field == "tau") cfg.tau = parse_double(value);
            else if (field == "beta") cfg.beta = parse_double(value);
            else if (field == "amateur") cfg.amateur = std::string(value);
            else throw ConfigError("unknown hyperparameter '" + std::string(field) + "' in '" + std::string(key) + "'");
        }
    }
    cfg.validate();
    return cfg;
}

DecodingConfig DecodingConfig::make_greedy() {
    return DecodingConfig{};
}
DecodingConfig DecodingConfig::make_beam(int w) {
    DecodingConfig c;
    c.strategy = Strategy::beam;
    c.w = w;
    return c;
}
DecodingConfig DecodingConfig::make_temperature(double t) {
    DecodingConfig c;
    c.strategy = Strategy::temperature;
    c.t = t;
    return c;
}
DecodingConfig DecodingConfig::make_top_k(int k) {
    DecodingConfig c;
    c.strategy = Strategy::top_k;
    c.k = k;
    return c;
}
DecodingConfig DecodingConfig::make_top_p(double p) {
    DecodingConfig c;
    c.strategy = Strategy::top_p;
    c.p = p;
    return c;
}
DecodingConfig DecodingConfig::make_typical(double tau) {
    DecodingConfig c;
    c.strategy = Strategy::typical;
    c.tau = tau;
    return c;
}
DecodingConfig DecodingConfig::make_contrastive_search(double alpha, int k) {
    DecodingConfig c;
    c.strategy = Strategy::contrastive_search;
    c.alpha = alpha;
    c.k = k;
    return c;
}
DecodingConfig DecodingConfig::make_acs() {
    DecodingConfig c;
    c.strategy = Strategy::adaptive_contrastive_search;
    return c;
}
DecodingConfig DecodingConfig::make_fsd(int k, double beta) {
    DecodingConfig c;
    c.strategy = Strategy::fsd;
    c.k = k;
    c.beta = beta;
    return c;
}
DecodingConfig DecodingConfig::make_contrastive_decoding(int k, std::string amateur) {
    DecodingConfig c;
    c.strategy = Strategy::contrastive_decoding;
    c.k = k;
    c.amateur = std::move(amateur);
    return c;
}

// --- distribution transforms ---------------------------------------------

namespace {

// Token indices ordered by descending probability, ties by lowest index.
std::vector<int> indices_by_prob(const TokenDistribution& dist) {
    std::vector<int> idx(dist.probs.size());
    for (size_t i = 0; i < idx.size(); ++i) {
        idx[i] = static_cast<int>(i);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (dist.probs[static_cast<size_t>(a)] != dist.probs[static_cast<size_t>(b)]) {
            return dist.probs[static_cast<size_t>(a)] > dist.probs[static_cast<size_t>(b)];
        }
        return a < b;
    });
    return idx;
}

// The candidate pool shared by contrastive strategies: the k most probable
// tokens, ties by lowest index, zero-mass tokens never included. Ascending
// index order so the lowest-index tie rule is a plain strict comparison.
std::vector<int> top_candidate_ids(const TokenDistribution& dist, int k) {
    std::vector<int> ordered = indices_by_prob(dist);
    std::vector<int> out;
    out.reserve(static_cast<size_t>(k));
    for (int id : ordered) {
        if (static_cast<int>(out.size()) >= k || dist.probs[static_cast<size_t>(id)] <= 0) {
            break;
        }
        out.push_back(id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TokenDistribution truncate_top_k(const TokenDistribution& dist, int k) {
    if (k < 1) {
        throw InputError("top-k needs k >= 1");
    }
    dist.validate();
    if (k >= dist.size()) {
        return dist;
    }
    std::vector<int> ordered = indices_by_prob(dist);
    TokenDistribution out;
    out.probs.assign(dist.probs.size(), 0.0);
    double kept = 0;
    for (int i = 0; i < k; ++i) {
        size_t id = static_cast<size_t>(ordered[static_cast<size_t>(i)]);
        out.probs[id] = dist.probs[id];
        kept += dist.probs[id];
    }
    if (kept <= 0) {
        throw InputError("top-k kept no probability mass");
    }
    for (double& p : out.probs) {
        p /= kept;
    }
    return out;
}

std::vector<int> nucleus_set(const TokenDistribution& dist, double p) {
    if (!(p > 0 && p <= 1)) {
        throw InputError("nucleus mass must be in (0, 1], got " + format_double(p));
    }
    dist.validate();
    std::vector<int> ordered = indices_by_prob(dist);
    std::vector<int> set;
    double cum = 0;
    for (int id : ordered) {
        set.push_back(id);
        cum += dist.probs[static_cast<size_t>(id)];
        if (cum >= p) {
            break;
        }
    }
    std::sort(set.begin(), set.end());
    return set;
}

TokenDistribution apply_temperature(std::span<const double> logits, double t) {
    if (!(t > 0)) {
        throw InputError("temperature must be > 0, got " + format_double(t));
    }
    if (logits.empty()) {
        throw InputError("empty logits");
    }
    std::vector<double> scaled(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
        scaled[i] = logits[i] / t;
    }
    return TokenDistribution::from_logits(std::move(scaled));
}

std::vector<int> typical_mass_set(const TokenDistribution& dist, double tau) {
    if (!(tau > 0 && tau <= 1)) {
        throw InputError("typical mass must be in (0, 1], got " + format_double(tau));
    }
    dist.validate();
    double h = entropy(dist);
    std::vector<int> idx(dist.probs.size());
    std::vector<double> distance(dist.probs.size());
    for (size_t i = 0; i < dist.probs.size(); ++i) {
        idx[i] = static_cast<int>(i);
        double surprisal = dist.probs[i] > 0 ? -std::log(dist.probs[i]) : kInf;
        distance[i] = std::abs(surprisal - h);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (distance[static_cast<size_t>(a)] != distance[static_cast<size_t>(b)]) {
            return distance[static_cast<size_t>(a)] < distance[static_cast<size_t>(b)];
        }
        return a < b;
    });
    std::vector<int> set;
    double cum = 0;
    for (int id : idx) {
        set.push_back(id);
        cum += dist.probs[static_cast<size_t>(id)];
        if (cum >= tau) {
            break;
        }
    }
    std::sort(set.begin(), set.end());
    return set;
}

// --- decode loop helpers --------------------------------------------------

namespace {

bool is_eot(const Vocabulary& vocab, int token) {
    auto eot = vocab.eot_id();
    return eot && *eot == token;
}

void check_max_new_tokens(int max_new_tokens) {
    if (max_new_tokens < 0) {
        throw InputError("max_new_tokens must be >= 0");
    }
}

GenerationRecord make_record(const LmBackend& backend, std::span<const int> prompt, DecodingConfig config,
                             uint64_t seed) {
    GenerationRecord rec;
    rec.prompt.assign(prompt.begin(), prompt.end());
    rec.config = std::move(config);
    rec.seed = seed;
    rec.backend_name = backend.name();
    return rec;
}

// Inverse-CDF draw over a (renormalized) probability vector; u in [0, 1).
// Zero-mass entries are never selected.
int sample_index(std::span<const double> probs, double u) {
    double cum = 0;
    int last_positive = -1;
    for (size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0) {
            continue;
        }
        last_positive = static_cast<int>(i);
        cum += probs[i];
        if (cum > u) {
            return static_cast<int>(i);
        }
    }
    if (last_positive < 0) {
        throw InputError("cannot sample from an all-zero distribution");
    }
    return last_positive;  // u landed in roundoff tail
}

// Candidate scorer used by contrastive search variants: p(v|x) against the
// maximum cosine similarity to any prior token representation.
struct RepresentationTrace {
    const LmBackend* backend;
    std::vector<TokenRepresentation> reps;

    void extend(std::span<const int> context_before, int token) {
        reps.push_back(backend->token_representation(context_before, token));
    }

    double max_similarity(const TokenRepresentation& candidate) const {
        double best = -kInf;
        for (const auto& r : reps) {
            best = std::max(best, cosine(candidate, r));
        }
        return reps.empty() ? 0.0 : best;
    }
};

}  // namespace

// --- decoders --------------------------------------------------------------

GenerationRecord greedy_decode(const LmBackend& backend, std::span<const int> prompt, int max_new_tokens) {
    check_max_new_tokens(max_new_tokens);
    backend.vocab();  // id range checked by next_distribution
    GenerationRecord rec = make_record(backend, prompt, DecodingConfig::make_greedy(), 0);
    std::vector<int> ctx(prompt.begin(), prompt.end());
    for (int step = 0; step < max_new_tokens; ++step) {
        TokenDistribution dist = backend.next_distribution(ctx);
        int chosen = argmax_lowest_index(dist.probs);
        if (is_eot(backend.vocab(), chosen)) {
            break;
        }
        rec.continuation.push_back(chosen);
        rec.step_logprobs.push_back(dist.logprob(chosen));
        ctx.push_back(chosen);
    }
    return rec;
}

GenerationRecord beam_decode(const LmBackend& backend, std::span<const int> prompt, int beam_width,
                             int max_new_tokens) {
    if (beam_width < 1) {
        throw InputError("beam width must be >= 1, got " + std::to_string(beam_width));
    }
    check_max_new_tokens(max_new_tokens);

    struct Beam {
        std::vector<int> seq;  // continuation only, may end in <eot>
        double logp = 0;
        bool done = false;
    };
    auto beam_less = [](const Beam& a, const Beam& b) {
        if (a.logp != b.logp) {
            return a.logp > b.logp;
        }
        return a.seq < b.seq;  // lexicographic = lowest token index first
    };

    std::vector<Beam> frontier{Beam{}};
    std::vector<int> ctx(prompt.begin(), prompt.end());
    for (int step = 0; step < max_new_tokens; ++step) {
        bool all_done = true;
        std::vector<Beam> candidates;
        for (const Beam& beam : frontier) {
            if (beam.done) {
                candidates.push_back(beam);
                continue;
            }
            all_done = false;
            ctx.resize(prompt.size());
            ctx.insert(ctx.end(), beam.seq.begin(), beam.seq.end());
            TokenDistribution dist = backend.next_distribution(ctx);
            for (int v = 0; v < dist.size(); ++v) {
                double p = dist.probs[static_cast<size_t>(v)];
                if (p <= 0) {
                    continue;  // -inf expansions cannot be optimal
                }
                Beam next;
                next.seq = beam.seq;
                next.seq.push_back(v);
                next.logp = beam.logp + std::log(p);
                next.done = is_eot(backend.vocab(), v);
                candidates.push_back(std::move(next));
            }
        }
        if (all_done) {
            break;
        }
        std::sort(candidates.begin(), candidates.end(), beam_less);
        if (static_cast<int>(candidates.size()) > beam_width) {
            candidates.resize(static_cast<size_t>(beam_width));
        }
        frontier = std::move(candidates);
    }

    const Beam* best = &frontier.front();
    for (const Beam& b : frontier) {
        if (beam_less(b, *best)) {
            best = &b;
        }
    }

    GenerationRecord rec = make_record(backend, prompt, DecodingConfig::make_beam(beam_width), 0);
    rec.continuation = best->seq;
    if (!rec.continuation.empty() && is_eot(backend.vocab(), rec.continuation.back())) {
        rec.continuation.pop_back();  // the terminator is not part of the text
    }
    // Replay so that step_logprobs match next_distribution exactly.
    ctx.assign(prompt.begin(), prompt.end());
    for (int token : rec.continuation) {
        TokenDistribution dist = backend.next_distribution(ctx);
        rec.step_logprobs.push_back(dist.logprob(token));
        ctx.push_back(token);
    }
    return rec;
}

GenerationRecord sample_decode(const LmBackend& backend, std::span<const int> prompt, const DecodingConfig& config,
                               uint64_t seed, int max_new_tokens) {
    config.validate();
    check_max_new_tokens(max_new_tokens);
    switch (config.strategy) {
        case Strategy::temperature:
        case Strategy::top_k:
        case Strategy::top_p:
        case Strategy::typical:
            break;
        default:
            throw ConfigError(std::string("sample_decode cannot run strategy '") +
                              strategy_short_name(config.strategy) + "'");
    }

    GenerationRecord rec = make_record(backend, prompt, config, seed);
    std::vector<int> ctx(prompt.begin(), prompt.end());
    std::mt19937_64 rng(seed);
    for (int step = 0; step < max_new_tokens; ++step) {
        TokenDistribution dist = backend.next_distribution(ctx);
        std::vector<double> sampling;
        if (config.strategy == Strategy::temperature) {
            std::vector<double> logits = dist.logits;
            if (logits.empty()) {
                logits.resize(dist.probs.size());
                for (size_t i = 0; i < dist.probs.size(); ++i) {
                    logits[i] = dist.probs[i] > 0 ? std::log(dist.probs[i]) : -kInf;
                }
            }
            sampling = apply_temperature(logits, *config.t).probs;
        } else if (config.strategy == Strategy::top_k) {
            sampling = truncate_top_k(dist, *config.k).probs;
        } else {
            std::vector<int> keep = config.strategy == Strategy::top_p ? nucleus_set(dist, *config.p)
                                                                       : typical_mass_set(dist, *config.tau);
            sampling.assign(dist.probs.size(), 0.0);
            double kept = 0;
            for (int id : keep) {
                sampling[static_cast<size_t>(id)] = dist.probs[static_cast<size_t>(id)];
                kept += dist.probs[static_cast<size_t>(id)];
            }
            for (double& p : sampling) {
                p /= kept;
            }
        }
        int chosen = sample_index(sampling, uniform_unit(rng()));
        if (is_eot(backend.vocab(), chosen)) {
            break;
        }
        rec.continuation.push_back(chosen);
        rec.step_logprobs.push_back(dist.logprob(chosen));
        ctx.push_back(chosen);
    }
    return rec;
}

namespace {

// Shared loop for fixed-alpha and adaptive contrastive search.
GenerationRecord contrastive_loop(const LmBackend& backend, std::span<const int> prompt, int k, int max_new_tokens,
                                  bool adaptive, double fixed_alpha, DecodingConfig config) {
    if (k < 1) {
        throw InputError("contrastive search needs k >= 1");
    }
    check_max_new_tokens(max_new_tokens);
    if (!backend.supports_representation()) {
        throw CapabilityError("contrastive search needs token representations; backend '" + backend.name() +
                              "' has none");
    }

    GenerationRecord rec = make_record(backend, prompt, std::move(config), 0);
    RepresentationTrace trace{&backend, {}};
    for (size_t j = 0; j < prompt.size(); ++j) {
        trace.extend(prompt.subspan(0, j), prompt[j]);
    }

    std::vector<int> ctx(prompt.begin(), prompt.end());
    double log_vocab = std::log(static_cast<double>(backend.vocab().size()));
    for (int step = 0; step < max_new_tokens; ++step) {
        TokenDistribution dist = backend.next_distribution(ctx);
        double alpha = fixed_alpha;
        if (adaptive) {
            alpha = std::clamp(entropy(dist) / log_vocab, 0.0, 1.0);
            rec.alpha_trace.push_back(alpha);
        }
        std::vector<int> candidates = top_candidate_ids(dist, k);
        int chosen = candidates.front();
        double best = -kInf;
        for (int v : candidates) {
            TokenRepresentation rep = backend.token_representation(ctx, v);
            double penalty = trace.max_similarity(rep);
            double score = contrastive_objective(dist.probs[static_cast<size_t>(v)], penalty, alpha);
            if (score > best) {
                best = score;
                chosen = v;
            }
        }
        if (is_eot(backend.vocab(), chosen)) {
            break;
        }
        rec.continuation.push_back(chosen);
        rec.step_logprobs.push_back(dist.logprob(chosen));
        trace.extend(ctx, chosen);
        ctx.push_back(chosen);
    }
    return rec;
}

}  // namespace

GenerationRecord contrastive_search_decode(const LmBackend& backend, std::span<const int> prompt, double alpha, int k,
                                           int max_new_tokens) {
    if (!(alpha >= 0 && alpha <= 1)) {
        throw InputError("alpha must be in [0, 1], got " + format_double(alpha));
    }
    return contrastive_loop(backend, prompt, k, max_new_tokens, /*adaptive=*/false, alpha,
                            DecodingConfig::make_contrastive_search(alpha, k));
}

GenerationRecord adaptive_contrastive_search_decode(const LmBackend& backend, std::span<const int> prompt,
                                                    int max_new_tokens, int candidate_k) {
    return contrastive_loop(backend, prompt, candidate_k, max_new_tokens, /*adaptive=*/true, 0.0,
                            DecodingConfig::make_acs());
}

GenerationRecord fsd_decode(const LmBackend& backend, std::span<const int> prompt, int k, double beta,
                            int max_new_tokens) {
    if (k < 1) {
        throw InputError("fsd needs k >= 1");
    }
    if (!(beta >= 0)) {
        throw InputError("beta must be >= 0, got " + format_double(beta));
    }
    check_max_new_tokens(max_new_tokens);

    GenerationRecord rec = make_record(backend, prompt, DecodingConfig::make_fsd(k, beta), 0);
    std::vector<int> seq(prompt.begin(), prompt.end());
    // Anti-model over the same vocabulary, grown online from the prefix.
    NgramCounts anti(kFsdAntiOrder, backend.vocab().size());
    for (size_t pos = 0; pos < seq.size(); ++pos) {
        anti.add_position(seq, pos);
    }

    for (int step = 0; step < max_new_tokens; ++step) {
        TokenDistribution dist = backend.next_distribution(seq);
        std::vector<double> anti_probs = anti.distribution(seq, kFsdAntiSmoothing);
        std::vector<int> candidates = top_candidate_ids(dist, k);
        int chosen = candidates.front();
        double best = -kInf;
        for (int v : candidates) {
            double score = contrastive_objective(dist.probs[static_cast<size_t>(v)],
                                                 anti_probs[static_cast<size_t>(v)], beta);
            if (score > best) {
                best = score;
                chosen = v;
            }
        }
        if (is_eot(backend.vocab(), chosen)) {
            break;
        }
        rec.continuation.push_back(chosen);
        rec.step_logprobs.push_back(dist.logprob(chosen));
        seq.push_back(chosen);
        anti.add_position(seq, seq.size() - 1);
    }
    return rec;
}

GenerationRecord contrastive_decode(const LmBackend& expert, const LmBackend& amateur, std::span<const int> prompt,
                                    int k, int max_new_tokens) {
    if (k < 1) {
        throw InputError("contrastive decoding needs k >= 1");
    }
    check_max_new_tokens(max_new_tokens);
    if (!(expert.vocab() == amateur.vocab())) {
        throw ConfigError("contrastive decoding needs a shared vocabulary; '" + expert.name() + "' and '" +
                          amateur.name() + "' differ");
    }

    GenerationRecord rec =
        make_record(expert, prompt, DecodingConfig::make_contrastive_decoding(k, amateur.name()), 0);
    std::vector<int> ctx(prompt.begin(), prompt.end());
    for (int step = 0; step < max_new_tokens; ++step) {
        TokenDistribution dist = expert.next_distribution(ctx);
        TokenDistribution amateur_dist = amateur.next_distribution(ctx);
        std::vector<int> candidates = top_candidate_ids(dist, k);
        int chosen = candidates.front();
        double best = -kInf;
        for (int v : candidates) {
            // Candidates have positive expert mass; the amateur may assign
            // zero, which legitimately scores +inf.
            double score = std::log(dist.probs[static_cast<size_t>(v)]) - amateur_dist.logprob(v);
            if (score > best) {
                best = score;
                chosen = v;
            }
        }
        if (is_eot(expert.vocab(), chosen)) {
            break;
        }
        rec.continuation.push_back(chosen);
        rec.step_logprobs.push_back(dist.logprob(chosen));
        ctx.push_back(chosen);
    }
    return rec;
}

GenerationRecord run_decoding(const LmBackend& backend, std::span<const int> prompt, const DecodingConfig& config,
                              uint64_t seed, int max_new_tokens, const LmBackend* amateur) {
    config.validate();
    GenerationRecord rec;
    switch (config.strategy) {
        case Strategy::greedy:
            rec = greedy_decode(backend, prompt, max_new_tokens);
            break;
        case Strategy::beam:
            rec = beam_decode(backend, prompt, *config.w, max_new_tokens);
            break;
        case Strategy::temperature:
        case Strategy::top_k:
        case Strategy::top_p:
        case Strategy::typical:
            rec = sample_decode(backend, prompt, config, seed, max_new_tokens);
            break;
        case Strategy::contrastive_search:
            rec = contrastive_search_decode(backend, prompt, *config.alpha, *config.k, max_new_tokens);
            break;
        case Strategy::adaptive_contrastive_search:
            rec = adaptive_contrastive_search_decode(backend, prompt, max_new_tokens);
            break;
        case Strategy::fsd:
            rec = fsd_decode(backend, prompt, *config.k, *config.beta, max_new_tokens);
            break;
        case Strategy::contrastive_decoding:
            if (amateur == nullptr) {
                throw ConfigError("contrastive decoding needs the amateur backend '" + *config.amateur + "'");
            }
            rec = contrastive_decode(backend, *amateur, prompt, *config.k, max_new_tokens);
            break;
    }
    rec.seed = seed;
    return rec;
}

// --- serialization ----------------------------------------------------------

GenerationText to_text(const GenerationRecord& record, const Vocabulary& vocab) {
    GenerationText text;
    text.prompt = vocab.decode(record.prompt);
    text.continuation = vocab.decode(record.continuation);
    text.step_logprobs = record.step_logprobs;
    text.alpha_trace = record.alpha_trace;
    text.strategy_key = record.config.key();
    text.seed = record.seed;
    text.backend_name = record.backend_name;
    text.dataset_id = record.dataset_id;
    text.prompt_id = record.prompt_id;
    return text;
}

std::string generation_to_jsonl(const GenerationText& text) {
    nlohmann::ordered_json j;
    j["prompt_id"] = text.prompt_id;
    j["dataset_id"] = text.dataset_id;
    j["backend"] = text.backend_name;
    j["strategy"] = text.strategy_key;
    j["seed"] = text.seed;
    j["prompt"] = text.prompt;
    j["continuation"] = text.continuation;
    j["step_logprobs"] = text.step_logprobs;
    if (!text.alpha_trace.empty()) {
        j["alpha_trace"] = text.alpha_trace;
    }
    return j.dump();
}

GenerationText generation_from_jsonl(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad generation record: ") + e.what());
    }
    GenerationText text;
    try {
        text.prompt_id = j.at("prompt_id").get<std::string>();
        text.dataset_id = j.at("dataset_id").get<std::string>();
        text.backend_name = j.at("backend").get<std::string>();
        text.strategy_key = j.at("strategy").get<std::string>();
        text.seed = j.at("seed").get<uint64_t>();
        text.prompt = j.at("prompt").get<std::vector<std::string>>();
        text.continuation = j.at("continuation").get<std::vector<std::string>>();
        text.step_logprobs = j.at("step_logprobs").get<std::vector<double>>();
        if (j.contains("alpha_trace")) {
            text.alpha_trace = j.at("alpha_trace").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad generation record: ") + e.what());
    }
    return text;
}

}  // namespace decbench
