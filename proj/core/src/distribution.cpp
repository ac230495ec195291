#include "decbench/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

void TokenDistribution::validate(double tol) const {
    if (probs.empty()) {
        throw InputError("empty distribution");
    }
    double sum = 0;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw InputError("negative probability " + format_double(p));
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
        throw InputError("probabilities sum to " + format_double(sum) + ", expected 1");
    }
    if (!logits.empty() && logits.size() != probs.size()) {
        throw InputError("logits/probs length mismatch");
    }
}

TokenDistribution TokenDistribution::from_probs(std::vector<double> probs) {
    TokenDistribution dist;
    dist.probs = std::move(probs);
    dist.validate();
    return dist;
}

TokenDistribution TokenDistribution::from_logits(std::vector<double> logits) {
    if (logits.empty()) {
        throw InputError("empty logits");
    }
    TokenDistribution dist;
    dist.probs.resize(logits.size());
    double max_l = *std::max_element(logits.begin(), logits.end());
    double sum = 0;
    for (size_t i = 0; i < logits.size(); ++i) {
        double e = std::exp(logits[i] - max_l);
        dist.probs[i] = e;
        sum += e;
    }
    for (double& p : dist.probs) {
        p /= sum;
    }
    dist.logits = std::move(logits);
    return dist;
}

double TokenDistribution::logprob(int id) const {
    double p = probs.at(static_cast<size_t>(id));
    return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double entropy(std::span<const double> probs) {
    double h = 0;
    for (double p : probs) {
        if (p > 0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

double entropy(const TokenDistribution& dist) {
    return entropy(std::span<const double>(dist.probs));
}

int argmax_lowest_index(std::span<const double> values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace decbench
