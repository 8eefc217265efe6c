#include "qagame/text.hpp"

#include <algorithm>
#include <array>
#include <map>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace qagame {
namespace {

constexpr UChar32 kRightSingleQuote = 0x2019;

bool is_apostrophe(UChar32 c) { return c == '\'' || c == kRightSingleQuote; }

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
    if (!error) out.append(buf, static_cast<std::size_t>(len));
}

// Decodes one code point at `pos`, advancing it. Invalid bytes decode to a
// negative value and are treated as separators.
UChar32 next_code_point(std::string_view text, std::size_t& pos) {
    auto i = static_cast<int32_t>(pos);
    UChar32 c = 0;
    U8_NEXT(text.data(), i, static_cast<int32_t>(text.size()), c);
    pos = static_cast<std::size_t>(i);
    return c;
}

void emit_token(std::string_view text, std::size_t start, std::size_t end, TokenStream& out) {
    // Strip edge apostrophes.
    while (start < end) {
        std::size_t p = start;
        UChar32 c = next_code_point(text, p);
        if (!is_apostrophe(c)) break;
        start = p;
    }
    while (end > start) {
        auto i = static_cast<int32_t>(end);
        UChar32 c = 0;
        U8_PREV(text.data(), 0, i, c);
        if (!is_apostrophe(c)) break;
        end = static_cast<std::size_t>(i);
    }
    if (start == end) return;

    std::string token;
    token.reserve(end - start);
    for (std::size_t p = start; p < end;) {
        UChar32 c = next_code_point(text, p);
        if (c == kRightSingleQuote) {
            token.push_back('\'');
        } else {
            append_utf8(token, u_tolower(c));
        }
    }
    out.tokens.push_back(std::move(token));
    out.offsets.push_back({start, end});
}

// NLTK-derived English list, contraction fragments removed. Frozen: changing
// it changes attribution and chain statistics.
constexpr std::array<std::string_view, 127> kStopwords = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your",
    "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
    "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what",
    "which", "who", "whom", "this", "that", "these", "those", "am", "is", "are",
    "was", "were", "be", "been", "being", "have", "has", "had", "having", "do",
    "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about",
    "against", "between", "into", "through", "during", "before", "after", "above", "below", "to",
    "from", "up", "down", "in", "out", "on", "off", "over", "under", "again",
    "further", "then", "once", "here", "there", "when", "where", "why", "how", "all",
    "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
    "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s",
    "t", "can", "will", "just", "don", "should", "now"};

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::size_t pos = 0;
    std::size_t run_start = 0;
    bool in_run = false;
    while (pos < text.size()) {
        std::size_t here = pos;
        UChar32 c = next_code_point(text, pos);
        bool word = c >= 0 && (u_isalnum(c) || is_apostrophe(c));
        if (word && !in_run) {
            run_start = here;
            in_run = true;
        } else if (!word && in_run) {
            emit_token(text, run_start, here, out);
            in_run = false;
        }
    }
    if (in_run) emit_token(text, run_start, text.size(), out);
    return out;
}

std::vector<std::string> tokenize_terms(std::string_view text) { return tokenize(text).tokens; }

std::unordered_set<std::string> token_set(std::string_view text) {
    auto terms = tokenize_terms(text);
    return {std::make_move_iterator(terms.begin()), std::make_move_iterator(terms.end())};
}

bool is_stopword(std::string_view token) {
    static const std::unordered_set<std::string_view> set(kStopwords.begin(), kStopwords.end());
    return set.contains(token);
}

const std::vector<std::string_view>& stopword_list() {
    static const std::vector<std::string_view> list(kStopwords.begin(), kStopwords.end());
    return list;
}

std::string normalize_answer(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
    icu::UnicodeString decomposed;
    auto source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    if (U_SUCCESS(status)) {
        decomposed = nfd->normalize(source, status);
    }
    if (U_FAILURE(status)) decomposed = source;

    std::string folded;
    folded.reserve(text.size());
    bool pending_space = false;
    for (int32_t i = 0; i < decomposed.length();) {
        UChar32 c = decomposed.char32At(i);
        i += U16_LENGTH(c);
        if (u_charType(c) == U_NON_SPACING_MARK) continue;
        if (u_isalnum(c)) {
            if (pending_space && !folded.empty()) folded.push_back(' ');
            pending_space = false;
            append_utf8(folded, u_tolower(c));
        } else {
            // Punctuation, symbols and whitespace all separate words.
            pending_space = true;
        }
    }

    auto words = split_ws(folded);
    if (words.size() > 1 && (words[0] == "a" || words[0] == "an" || words[0] == "the")) {
        words.erase(words.begin());
    }
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

double token_f1(std::string_view prediction, std::string_view gold) {
    auto pred = split_ws(normalize_answer(prediction));
    auto ref = split_ws(normalize_answer(gold));
    if (pred.empty() || ref.empty()) return 0.0;
    std::map<std::string, int> counts;
    for (const auto& t : ref) ++counts[t];
    int common = 0;
    for (const auto& t : pred) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    double precision = static_cast<double>(common) / static_cast<double>(pred.size());
    double recall = static_cast<double>(common) / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace qagame
