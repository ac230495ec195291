#include "decbench/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

DatasetFormat infer_dataset_format(const std::string& path) {
    return path.size() > 6 && path.substr(path.size() - 6) == ".jsonl" ? DatasetFormat::jsonl : DatasetFormat::rawtext;
}

static std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

static std::vector<std::string> split_documents(const std::string& content) {
    std::vector<std::string> docs;
    std::string current;
    bool blank_run = false;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            blank_run = true;
            continue;
        }
        if (blank_run && !current.empty()) {
            docs.push_back(std::move(current));
            current.clear();
        }
        blank_run = false;
        if (!current.empty()) {
            current += '\n';
        }
        current += line;
    }
    if (!current.empty()) {
        docs.push_back(std::move(current));
    }
    return docs;
}

Dataset load_dataset_text(const std::string& content, DatasetFormat format, const Tokenizer& tokenizer,
                          const std::string& dataset_id, int prefix_len) {
    Dataset dataset;
    dataset.id = dataset_id;

    if (format == DatasetFormat::jsonl) {
        std::istringstream in(content);
        std::string line;
        size_t line_no = 0;
        size_t index = 0;
        std::unordered_map<std::string, size_t> seen_ids;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) {
                continue;
            }
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw InputError("dataset '" + dataset_id + "' line " + std::to_string(line_no) + ": " + e.what());
            }
            PromptRecord rec;
            rec.dataset_id = dataset_id;
            try {
                rec.prompt_id = j.contains("prompt_id") ? j.at("prompt_id").get<std::string>()
                                                        : "p" + std::to_string(index);
                rec.prompt = tokenizer.tokenize(j.at("prompt").get<std::string>());
                rec.gold = tokenizer.tokenize(j.at("gold").get<std::string>());
            } catch (const nlohmann::json::exception& e) {
                throw InputError("dataset '" + dataset_id + "' line " + std::to_string(line_no) + ": " + e.what());
            }
            if (rec.prompt.empty() || rec.gold.empty()) {
                throw InputError("dataset '" + dataset_id + "' line " + std::to_string(line_no) +
                                 ": prompt and gold must be non-empty");
            }
            if (!seen_ids.emplace(rec.prompt_id, line_no).second) {
                throw InputError("dataset '" + dataset_id + "' line " + std::to_string(line_no) +
                                 ": duplicate prompt_id '" + rec.prompt_id + "'");
            }
            dataset.records.push_back(std::move(rec));
            ++index;
        }
    } else {
        if (prefix_len < 1) {
            throw InputError("rawtext loading needs prefix_len >= 1");
        }
        std::vector<std::string> docs = split_documents(content);
        size_t index = 0;
        for (const std::string& doc : docs) {
            std::vector<std::string> tokens = tokenizer.tokenize(doc);
            if (tokens.size() < static_cast<size_t>(prefix_len) + 1) {
                ++dataset.skipped_short;
                continue;
            }
            PromptRecord rec;
            rec.dataset_id = dataset_id;
            rec.prompt_id = "p" + std::to_string(index);
            rec.prompt.assign(tokens.begin(), tokens.begin() + prefix_len);
            rec.gold.assign(tokens.begin() + prefix_len, tokens.end());
            dataset.records.push_back(std::move(rec));
            ++index;
        }
    }

    if (dataset.records.empty()) {
        throw InputError("dataset '" + dataset_id + "' has no usable records");
    }
    return dataset;
}

Dataset load_dataset(const std::string& path, DatasetFormat format, const Tokenizer& tokenizer,
                     const std::string& dataset_id, int prefix_len) {
    return load_dataset_text(read_file(path), format, tokenizer, dataset_id, prefix_len);
}

std::vector<std::vector<std::string>> load_corpus_sequences(const std::string& path, const Tokenizer& tokenizer) {
    std::vector<std::vector<std::string>> sequences;
    for (const std::string& doc : split_documents(read_file(path))) {
        std::vector<std::string> tokens = tokenizer.tokenize(doc);
        if (!tokens.empty()) {
            sequences.push_back(std::move(tokens));
        }
    }
    if (sequences.empty()) {
        throw InputError("corpus '" + path + "' is empty");
    }
    return sequences;
}

}  // namespace decbench
