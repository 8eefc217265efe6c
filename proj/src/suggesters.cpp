#include "qagame/suggesters.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace qagame {

bool ReasoningPath::contains(std::string_view paragraph_id) const {
    return std::any_of(documents_.begin(), documents_.end(),
                       [&](const Paragraph& p) { return p.paragraph_id == paragraph_id; });
}

bool ReasoningPath::operator==(const ReasoningPath& other) const {
    if (question_ != other.question_ || documents_.size() != other.documents_.size()) return false;
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        if (documents_[i].paragraph_id != other.documents_[i].paragraph_id) return false;
    }
    return true;
}

ReasoningPath extend_reasoning_path(ReasoningPath path, const Paragraph& document) {
    if (path.contains(document.paragraph_id)) {
        throw std::invalid_argument("paragraph \"" + document.paragraph_id + "\" already on the reasoning path");
    }
    path.text_.push_back(' ');
    path.text_ += document.text;
    path.documents_.push_back(document);
    return path;
}

std::string_view to_string(SuggestionKind kind) {
    switch (kind) {
        case SuggestionKind::golden: return "golden";
        case SuggestionKind::irrr: return "irrr";
        case SuggestionKind::answer: return "answer";
    }
    return "golden";
}

std::optional<Suggestion> suggest_golden(const ReasoningPath& path, const InvertedIndex& index) {
    const auto& text = path.text_view();
    auto stream = tokenize(text);
    const std::size_t n = stream.size();

    std::vector<double> weight(n);
    std::vector<bool> content(n);
    for (std::size_t i = 0; i < n; ++i) {
        content[i] = !is_stopword(stream.tokens[i]);
        weight[i] = content[i] ? index.idf(stream.tokens[i]) : -kGoldenStopwordPenalty;
    }

    std::optional<std::pair<std::size_t, std::size_t>> best;  // [start, end)
    double best_score = 0.0;
    for (std::size_t start = 0; start < n; ++start) {
        double sum = 0.0;
        bool has_content = false;
        for (std::size_t len = 1; len <= kGoldenMaxWindow && start + len <= n; ++len) {
            sum += weight[start + len - 1];
            has_content = has_content || content[start + len - 1];
            // Strict improvement keeps the earliest start, then the shortest window.
            if (has_content && (!best || sum > best_score)) {
                best = {start, start + len};
                best_score = sum;
            }
        }
    }
    if (!best) return std::nullopt;

    TokenSpan span{stream.offsets[best->first].start, stream.offsets[best->second - 1].end};
    Suggestion s;
    s.kind = SuggestionKind::golden;
    s.text = text.substr(span.start, span.end - span.start);
    s.spans.push_back(span);
    return s;
}

std::optional<Suggestion> suggest_irrr(const ReasoningPath& path, const InvertedIndex& /*index*/, std::size_t cap) {
    auto stream = tokenize(path.text_view());
    Suggestion s;
    s.kind = SuggestionKind::irrr;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < stream.size() && s.token_positions.size() < cap; ++i) {
        const auto& token = stream.tokens[i];
        if (is_stopword(token) || !seen.insert(token).second) continue;
        if (!s.text.empty()) s.text.push_back(' ');
        s.text += token;
        s.token_positions.push_back(i);
        s.spans.push_back(stream.offsets[i]);
    }
    if (s.token_positions.empty()) return std::nullopt;
    return s;
}

std::optional<Suggestion> suggest_answer(const ReasoningPath& path, const InvertedIndex& index, const Corpus& corpus,
                                         std::string_view current_query) {
    std::string query(current_query);
    if (query.find_first_not_of(" \t\r\n") == std::string::npos) {
        auto irrr = suggest_irrr(path, index);
        if (!irrr) return std::nullopt;
        query = irrr->text;
    }
    auto hits = search_sparse(index, corpus, query, 1);
    if (hits.empty()) return std::nullopt;
    Suggestion s;
    s.kind = SuggestionKind::answer;
    s.text = hits.front().page_title;
    return s;
}

}  // namespace qagame
