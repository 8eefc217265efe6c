#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qagame/corpus.hpp"
#include "qagame/retrieval.hpp"

namespace qagame {

inline constexpr std::size_t kGoldenMaxWindow = 8;
inline constexpr double kGoldenStopwordPenalty = 0.5;
inline constexpr std::size_t kIrrrTokenCap = 13;

/// R_k = (Q, d1, ..., dk).
class ReasoningPath {
public:
    ReasoningPath() = default;
    explicit ReasoningPath(std::string question) : question_(std::move(question)) {}

    const std::string& question() const { return question_; }
    const std::vector<Paragraph>& documents() const { return documents_; }
    std::size_t step() const { return documents_.size(); }
    bool contains(std::string_view paragraph_id) const;

    /// Q and each document text joined by single spaces. Append-only: earlier
    /// offsets stay valid as documents are added.
    const std::string& text_view() const { return text_; }

    bool operator==(const ReasoningPath& other) const;

private:
    friend ReasoningPath extend_reasoning_path(ReasoningPath, const Paragraph&);

    std::string question_;
    std::vector<Paragraph> documents_;
    std::string text_ = question_;
};

/// Throws std::invalid_argument if the paragraph is already on the path.
ReasoningPath extend_reasoning_path(ReasoningPath path, const Paragraph& document);

enum class SuggestionKind { golden, irrr, answer };
std::string_view to_string(SuggestionKind kind);

struct Suggestion {
    std::string text;
    SuggestionKind kind = SuggestionKind::golden;
    std::vector<TokenSpan> spans;            // byte spans into the text view; golden: exactly one
    std::vector<std::size_t> token_positions;  // irrr: strictly increasing positions in the token stream

    bool operator==(const Suggestion&) const = default;
};

// Best contiguous window of 1..8 tokens with at least one content token,
// maximizing sum of content-token IDF minus 0.5 per stopword. Ties go to the
// earliest start, then the shortest window. nullopt when R has no content token.
std::optional<Suggestion> suggest_golden(const ReasoningPath& path, const InvertedIndex& index);

// Content tokens of R in order, first occurrence only, capped.
std::optional<Suggestion> suggest_irrr(const ReasoningPath& path, const InvertedIndex& index,
                                       std::size_t cap = kIrrrTokenCap);

/// Title of the top sparse hit for the query (or the irrr suggestion when
/// the query is empty).
std::optional<Suggestion> suggest_answer(const ReasoningPath& path, const InvertedIndex& index,
                                         const Corpus& corpus, std::string_view current_query = {});

}  // namespace qagame
