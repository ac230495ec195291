#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "decbench/backend.hpp"

namespace decbench {

// Toy model defined by an explicit table of conditional distributions keyed
// by context suffixes. Lookup tries the longest stored suffix first and
// falls back towards the empty-context row, which is mandatory.
class FixedTableBackend final : public LmBackend {
  public:
    class Builder {
      public:
        Builder& name(std::string value);
        Builder& tokens(std::vector<std::string> value);
        // `context` in tokens (may be empty = the unconditional row);
        // `probs` over the full vocabulary, summing to 1 within 1e-9.
        Builder& row(const std::vector<std::string>& context, std::vector<double> probs);
        Builder& repr_dim(int value);       // 0 disables representations
        Builder& repr_context(int value);   // hashing window, default 1
        std::shared_ptr<FixedTableBackend> build();

      private:
        friend class FixedTableBackend;
        std::string name_ = "fixed";
        std::vector<std::string> tokens_;
        std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows_;
        int repr_dim_ = kDefaultReprDim;
        int repr_context_ = 1;
    };

    const Vocabulary& vocab() const override { return vocab_; }
    const BackendDescriptor& descriptor() const override { return descriptor_; }
    TokenDistribution next_distribution(std::span<const int> context) const override;
    TokenRepresentation token_representation(std::span<const int> context, int token) const override;

    int max_context() const { return max_context_; }

  private:
    explicit FixedTableBackend(Builder&& b);

    Vocabulary vocab_;
    BackendDescriptor descriptor_;
    std::map<std::vector<int>, std::vector<double>> table_;
    int max_context_ = 0;
    int repr_context_ = 1;
};

}  // namespace decbench
