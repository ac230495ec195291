#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace decbench {

// Reserved token strings, recognized by position-independent name.
inline constexpr std::string_view kUnknownToken = "<unk>";
inline constexpr std::string_view kEndOfTextToken = "<eot>";

// Ordered set of distinct token strings with an index <-> token bijection.
class Vocabulary {
  public:
    Vocabulary() = default;
    // Throws InputError on duplicates or size < 2.
    explicit Vocabulary(std::vector<std::string> tokens);

    int size() const { return static_cast<int>(tokens_.size()); }
    const std::string& token(int id) const;
    const std::vector<std::string>& tokens() const { return tokens_; }

    // -1 when absent.
    int find(std::string_view token) const;
    bool contains(std::string_view token) const { return find(token) >= 0; }

    std::optional<int> unk_id() const { return unk_id_; }
    std::optional<int> eot_id() const { return eot_id_; }

    // Maps unknown tokens to the reserved unknown index; throws InputError
    // when the token is unknown and no unknown index exists.
    int encode_token(std::string_view token) const;
    std::vector<int> encode(std::span<const std::string> tokens) const;
    // Throws InputError on out-of-range ids.
    std::vector<std::string> decode(std::span<const int> ids) const;
    void check_id(int id) const;

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
    std::optional<int> unk_id_;
    std::optional<int> eot_id_;
};

}  // namespace decbench
