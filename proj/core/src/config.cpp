#include "decbench/config.hpp"

#include <fstream>
#include <sstream>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

StrategyAxis parse_strategy_axis(const std::string& line) {
    auto fields = split_fields(line);
    if (fields.empty() || fields[0] != "strategy") {
        throw ConfigError("not a strategy directive: '" + line + "'");
    }
    if (fields.size() < 2) {
        throw ConfigError("strategy directive needs a strategy name");
    }
    StrategyAxis axis;
    axis.strategy = parse_strategy_name(fields[1]);
    for (size_t i = 2; i < fields.size(); ++i) {
        auto eq = fields[i].find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected field=values in '" + std::string(fields[i]) + "'");
        }
        std::string field(fields[i].substr(0, eq));
        std::string_view values = fields[i].substr(eq + 1);
        if (field == "backends") {
            for (auto name : split_char(values, ',')) {
                axis.backend_filter.emplace_back(name);
            }
        } else if (field == "amateur") {
            axis.amateur = std::string(values);
        } else {
            std::vector<double>& list = axis.values[field];
            for (auto v : split_char(values, ',')) {
                list.push_back(parse_double(v));
            }
            if (list.empty()) {
                throw ConfigError("empty value list for '" + field + "'");
            }
        }
    }
    return axis;
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    cfg.source_text = text;
    std::istringstream in(text);
    std::string raw;
    size_t line_no = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fields = split_fields(line);
        std::string_view key = fields[0];
        try {
            if (key == "run_seed" && fields.size() == 2) {
                cfg.run_seed = parse_u64(fields[1]);
            } else if (key == "max_new_tokens" && fields.size() == 2) {
                cfg.max_new_tokens = static_cast<int>(parse_long(fields[1]));
            } else if (key == "workers" && fields.size() == 2) {
                cfg.workers = static_cast<int>(parse_long(fields[1]));
            } else if (key == "replicas" && fields.size() == 2) {
                cfg.replicas = static_cast<int>(parse_long(fields[1]));
            } else if (key == "prefix_len" && fields.size() == 2) {
                cfg.prefix_len = static_cast<int>(parse_long(fields[1]));
            } else if (key == "tokenizer" && fields.size() == 2) {
                cfg.tokenizer = parse_tokenizer_scheme(fields[1]);
            } else if (key == "evaluator" && fields.size() == 2) {
                cfg.evaluator = std::string(fields[1]);
            } else if (key == "embedder" && fields.size() == 2) {
                cfg.embedder = std::string(fields[1]);
            } else if (key == "mauve_bins" && fields.size() == 2) {
                cfg.mauve_bins = static_cast<int>(parse_long(fields[1]));
            } else if (key == "mauve_c" && fields.size() == 2) {
                cfg.mauve_c = parse_double(fields[1]);
            } else if (key == "backend" && fields.size() == 3) {
                cfg.backends.emplace_back(std::string(fields[1]), std::string(fields[2]));
            } else if (key == "dataset" && fields.size() == 3) {
                cfg.datasets.emplace_back(std::string(fields[1]), std::string(fields[2]));
            } else if (key == "strategy") {
                cfg.strategies.push_back(parse_strategy_axis(std::string(line)));
            } else {
                fail("unknown or malformed directive '" + std::string(key) + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    if (cfg.max_new_tokens < 0) {
        throw ConfigError("max_new_tokens must be >= 0");
    }
    if (cfg.workers < 1) {
        throw ConfigError("workers must be >= 1");
    }
    if (cfg.replicas < 1) {
        throw ConfigError("replicas must be >= 1");
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

}  // namespace decbench
