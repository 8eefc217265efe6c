#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qagame {

/// Byte span [start, end) into the tokenized source text.
struct TokenSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    bool operator==(const TokenSpan&) const = default;
};

struct TokenStream {
    std::vector<std::string> tokens;  // lowercased
    std::vector<TokenSpan> offsets;   // surface form of tokens[i] is source.substr(offsets[i])

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Lowercase; split on code points that are neither alphanumeric nor an
// apostrophe; strip apostrophes from token edges; drop empty tokens.
// U+2019 counts as an apostrophe and is folded to ASCII in the token form.
// No stemming.
TokenStream tokenize(std::string_view text);

/// Token strings only.
std::vector<std::string> tokenize_terms(std::string_view text);

std::unordered_set<std::string> token_set(std::string_view text);

/// Membership in the bundled English stopword list (version 1, 127 words).
bool is_stopword(std::string_view token);

const std::vector<std::string_view>& stopword_list();

// Answer normalization: NFD, strip combining marks, lowercase, punctuation
// to spaces, collapse whitespace, drop one leading article (a/an/the).
std::string normalize_answer(std::string_view text);

/// SQuAD-style bag-of-tokens F1 over whitespace tokens of normalized inputs.
double token_f1(std::string_view prediction, std::string_view gold);

}  // namespace qagame
