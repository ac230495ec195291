#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "decbench/decoding.hpp"
#include "decbench/tokenizer.hpp"

namespace decbench {

// One strategy family of a sweep grid: the strategy plus a value list per
// hyperparameter, optionally restricted to a subset of backends.
struct StrategyAxis {
    Strategy strategy = Strategy::greedy;
    std::map<std::string, std::vector<double>> values;  // field -> values (w/k as doubles)
    std::vector<std::string> backend_filter;            // empty = all grid backends
    std::string amateur;                                // cd only
};

// Parsed run config: registry entries plus the sweep grid. The schema is
// line-oriented; see the README for the full directive list.
struct RunConfig {
    uint64_t run_seed = 0;
    int max_new_tokens = kDefaultMaxNewTokens;
    int workers = 1;
    int replicas = 1;
    int prefix_len = 32;
    TokenizerScheme tokenizer = TokenizerScheme::whitespace;
    std::string evaluator;  // backend name; empty = generating backend
    std::string embedder;   // backend name; empty = evaluator
    int mauve_bins = 16;
    double mauve_c = 5.0;
    std::vector<std::pair<std::string, std::string>> backends;  // name -> config path
    std::vector<std::pair<std::string, std::string>> datasets;  // id -> data path
    std::vector<StrategyAxis> strategies;
    std::string source_text;  // verbatim config, digested into the manifest
};

RunConfig parse_run_config(const std::string& text);         // throws ConfigError with line numbers
RunConfig load_run_config(const std::string& path);

// Parses one "strategy ..." directive, e.g.
//   strategy cs alpha=0.2,0.4 k=1,5 backends=gpt2
StrategyAxis parse_strategy_axis(const std::string& line);

}  // namespace decbench
