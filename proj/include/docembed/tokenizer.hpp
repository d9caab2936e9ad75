#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docembed {

enum class SplitPolicy {
    NonAlnum,    // split on runs of ASCII non-alphanumeric bytes
    Whitespace,  // split on runs of ASCII whitespace
};

struct TokenizerConfig {
    bool lowercase = true;
    SplitPolicy split_policy = SplitPolicy::NonAlnum;
    std::size_t min_token_len = 1;
};

namespace detail {

// Tokens are byte strings: only ASCII is case-folded or treated as a
// delimiter, bytes >= 0x80 pass through, so UTF-8 text stays intact.
inline bool is_word_byte(unsigned char c, SplitPolicy policy) {
    if (policy == SplitPolicy::Whitespace) {
        return !(c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                 c == '\v' || c == '\f');
    }
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char fold_byte(char c, bool lowercase) {
    if (lowercase && c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return c;
}

}  // namespace detail

inline std::vector<std::string> tokenize(std::string_view text,
                                         const TokenizerConfig& config = {}) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= config.min_token_len) tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        if (detail::is_word_byte(static_cast<unsigned char>(c), config.split_policy)) {
            current.push_back(detail::fold_byte(c, config.lowercase));
        } else if (!current.empty()) {
            flush();
        }
    }
    if (!current.empty()) flush();
    return tokens;
}

}  // namespace docembed
