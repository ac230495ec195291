#include "decbench/mauve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decbench/errors.hpp"
#include "decbench/hash.hpp"

namespace decbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double squared_distance(const Embedding& a, const Embedding& b) {
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

int nearest_centroid(const Embedding& point, const std::vector<Embedding>& centroids) {
    int best = 0;
    double best_d = kInf;
    for (size_t c = 0; c < centroids.size(); ++c) {
        double d = squared_distance(point, centroids[c]);
        if (d < best_d) {  // strict: ties stay at the lowest index
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

// KL(a || b) in nats; +inf when a puts mass where b has none.
double kl_divergence(std::span<const double> a, std::span<const double> b) {
    double kl = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= 0) {
            continue;
        }
        if (b[i] <= 0) {
            return kInf;
        }
        kl += a[i] * std::log(a[i] / b[i]);
    }
    return kl;
}

}  // namespace

Embedding embed_tokens(const LmBackend& embedder, std::span<const std::string> tokens) {
    if (tokens.empty()) {
        throw EvalError("cannot embed an empty token sequence");
    }
    if (!embedder.supports_representation()) {
        throw CapabilityError("backend '" + embedder.name() + "' cannot embed text (no representations)");
    }
    std::vector<std::string> token_vec(tokens.begin(), tokens.end());
    std::vector<int> ids = embedder.vocab().encode(token_vec);
    Embedding mean(static_cast<size_t>(embedder.descriptor().repr_dim), 0.0);
    for (size_t i = 0; i < ids.size(); ++i) {
        TokenRepresentation rep = embedder.token_representation(std::span<const int>(ids).subspan(0, i), ids[i]);
        for (size_t d = 0; d < mean.size(); ++d) {
            mean[d] += rep.values[d];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(ids.size());
    }
    return mean;
}

QuantizedPair quantize_embeddings(std::span<const Embedding> gen, std::span<const Embedding> ref, int num_bins,
                                  uint64_t seed) {
    if (gen.empty() || ref.empty()) {
        throw InputError("mauve needs non-empty generation and reference sets");
    }
    if (num_bins < 2) {
        throw InputError("mauve needs num_bins >= 2");
    }
    size_t dim = gen.front().size();
    for (const auto& e : gen) {
        if (e.size() != dim) throw InputError("embedding dimension mismatch");
    }
    for (const auto& e : ref) {
        if (e.size() != dim) throw InputError("embedding dimension mismatch");
    }

    // Canonical order makes clustering independent of input order and of
    // which set is which.
    struct Tagged {
        const Embedding* point;
        bool from_gen;
    };
    std::vector<Tagged> all;
    all.reserve(gen.size() + ref.size());
    for (const auto& e : gen) {
        all.push_back({&e, true});
    }
    for (const auto& e : ref) {
        all.push_back({&e, false});
    }
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        if (*a.point != *b.point) {
            return *a.point < *b.point;
        }
        return a.from_gen < b.from_gen;
    });

    int k = std::min<int>(num_bins, static_cast<int>(all.size()));

    // k-means++-style seeding with a fixed generator.
    SplitMix64 rng(seed);
    std::vector<Embedding> centroids;
    centroids.reserve(static_cast<size_t>(k));
    centroids.push_back(*all[rng.next() % all.size()].point);
    std::vector<double> dist2(all.size(), kInf);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0;
        for (size_t i = 0; i < all.size(); ++i) {
            dist2[i] = std::min(dist2[i], squared_distance(*all[i].point, centroids.back()));
            total += dist2[i];
        }
        size_t pick = 0;
        if (total > 0) {
            double target = uniform_unit(rng.next()) * total;
            double cum = 0;
            for (size_t i = 0; i < all.size(); ++i) {
                cum += dist2[i];
                if (cum > target) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        } else {
            pick = rng.next() % all.size();  // all points coincide with a centroid
        }
        centroids.push_back(*all[pick].point);
    }

    // Lloyd iterations; empty clusters keep their previous centroid.
    std::vector<int> assignment(all.size(), 0);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < all.size(); ++i) {
            int a = nearest_centroid(*all[i].point, centroids);
            if (a != assignment[i]) {
                assignment[i] = a;
                changed = true;
            }
        }
        if (!changed && iter > 0) {
            break;
        }
        std::vector<Embedding> sums(centroids.size(), Embedding(dim, 0.0));
        std::vector<long> counts(centroids.size(), 0);
        for (size_t i = 0; i < all.size(); ++i) {
            const Embedding& e = *all[i].point;
            for (size_t d = 0; d < dim; ++d) {
                sums[static_cast<size_t>(assignment[i])][d] += e[d];
            }
            ++counts[static_cast<size_t>(assignment[i])];
        }
        for (size_t c = 0; c < centroids.size(); ++c) {
            if (counts[c] == 0) {
                continue;
            }
            for (size_t d = 0; d < dim; ++d) {
                centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
            }
        }
    }

    QuantizedPair pair;
    pair.p.assign(centroids.size(), 0.0);
    pair.q.assign(centroids.size(), 0.0);
    for (size_t i = 0; i < all.size(); ++i) {
        if (all[i].from_gen) {
            pair.p[static_cast<size_t>(assignment[i])] += 1.0;
        } else {
            pair.q[static_cast<size_t>(assignment[i])] += 1.0;
        }
    }
    for (double& v : pair.p) {
        v /= static_cast<double>(gen.size());
    }
    for (double& v : pair.q) {
        v /= static_cast<double>(ref.size());
    }
    return pair;
}

bool disjoint_support(const QuantizedPair& pair) {
    for (size_t i = 0; i < pair.p.size(); ++i) {
        if (pair.p[i] > 0 && pair.q[i] > 0) {
            return false;
        }
    }
    return true;
}

double frontier_area(std::span<const double> p, std::span<const double> q, double scaling_c, int grid_points) {
    if (p.size() != q.size() || p.empty()) {
        throw InputError("frontier needs histograms of equal size");
    }
    if (grid_points < 2) {
        throw InputError("frontier needs at least 2 grid points");
    }
    if (scaling_c <= 0) {
        throw InputError("scaling constant must be > 0");
    }

    struct Point {
        double x, y;
    };
    std::vector<Point> curve;
    curve.reserve(static_cast<size_t>(grid_points));
    std::vector<double> mix(p.size());
    for (int g = 0; g < grid_points; ++g) {
        double lambda = static_cast<double>(g) / static_cast<double>(grid_points - 1);
        for (size_t i = 0; i < p.size(); ++i) {
            mix[i] = lambda * p[i] + (1.0 - lambda) * q[i];
        }
        double kl_q = kl_divergence(q, mix);
        double kl_p = kl_divergence(p, mix);
        curve.push_back({std::exp(-scaling_c * kl_q), std::exp(-scaling_c * kl_p)});
    }

    // Area of the region dominated by some curve point (union of the
    // [0,x] x [0,y] rectangles). Reflection-symmetric, so swapping p and q
    // cannot change the result.
    std::sort(curve.begin(), curve.end(), [](const Point& a, const Point& b) {
        if (a.x != b.x) {
            return a.x > b.x;
        }
        return a.y > b.y;
    });
    double area = 0;
    double y_so_far = 0;
    for (const Point& pt : curve) {
        if (pt.y > y_so_far) {
            area += pt.x * (pt.y - y_so_far);
            y_so_far = pt.y;
        }
    }
    return std::min(1.0, std::max(0.0, area));
}

double mauve_lite(std::span<const Embedding> gen, std::span<const Embedding> ref, int num_bins, double scaling_c) {
    QuantizedPair pair = quantize_embeddings(gen, ref, num_bins);
    return frontier_area(pair.p, pair.q, scaling_c);
}

double mauve_lite_texts(const LmBackend& embedder, std::span<const std::vector<std::string>> gen_texts,
                        std::span<const std::vector<std::string>> ref_texts, int num_bins, double scaling_c) {
    if (gen_texts.empty() || ref_texts.empty()) {
        throw InputError("mauve needs non-empty generation and reference sets");
    }
    std::vector<Embedding> gen;
    gen.reserve(gen_texts.size());
    for (size_t i = 0; i < gen_texts.size(); ++i) {
        try {
            gen.push_back(embed_tokens(embedder, gen_texts[i]));
        } catch (const Error& e) {
            throw EvalError("embedding generation #" + std::to_string(i) + " failed: " + e.what());
        }
    }
    std::vector<Embedding> ref;
    ref.reserve(ref_texts.size());
    for (size_t i = 0; i < ref_texts.size(); ++i) {
        try {
            ref.push_back(embed_tokens(embedder, ref_texts[i]));
        } catch (const Error& e) {
            throw EvalError("embedding reference #" + std::to_string(i) + " failed: " + e.what());
        }
    }
    return mauve_lite(gen, ref, num_bins, scaling_c);
}

}  // namespace decbench
