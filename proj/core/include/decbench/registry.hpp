#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "decbench/backend.hpp"
#include "decbench/config.hpp"
#include "decbench/corpus.hpp"

namespace decbench {

// Named backends and datasets addressable by sweep and CLI runs.
class Registry {
  public:
    void add_backend(std::shared_ptr<const LmBackend> backend);
    void add_dataset(Dataset dataset);

    const LmBackend& backend(const std::string& name) const;  // ConfigError when missing
    const LmBackend* find_backend(const std::string& name) const;
    const Dataset& dataset(const std::string& id) const;
    const Dataset* find_dataset(const std::string& id) const;

    std::vector<std::string> backend_names() const;
    std::vector<std::string> dataset_ids() const;
    std::map<std::string, double> dataset_weights() const;  // id -> record count

    // Loads every backend config and dataset named by the run config.
    // Relative paths resolve against `base_dir` (the config's directory).
    static Registry from_run_config(const RunConfig& config, const std::string& base_dir);

  private:
    std::map<std::string, std::shared_ptr<const LmBackend>> backends_;
    std::map<std::string, Dataset> datasets_;
};

// Builds a backend from its plain-text spec. Keys: kind (fixed-table |
// ngram | ngram-file), and per kind: order, smoothing, corpus, tokenizer,
// repr_dim, repr_context, vocab, row, model. `name` overrides any name in
// the file.
std::shared_ptr<const LmBackend> load_backend_config(const std::string& path, const std::string& name,
                                                     const std::string& base_dir = "");
std::shared_ptr<const LmBackend> parse_backend_config(const std::string& text, const std::string& name,
                                                      const std::string& base_dir = "");

}  // namespace decbench
