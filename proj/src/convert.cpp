#include "qagame/convert.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace qagame {
namespace {

std::string joined_tokens(std::string_view text) {
    std::string out;
    for (const auto& t : tokenize_terms(text)) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

// Token-boundary containment: " a b " inside " x a b y ".
bool contains_phrase(const std::string& haystack_tokens, const std::string& needle_tokens) {
    if (needle_tokens.empty()) return false;
    return (" " + haystack_tokens + " ").find(" " + needle_tokens + " ") != std::string::npos;
}

std::size_t shared_content_tokens(std::string_view a, const std::unordered_set<std::string>& b) {
    std::unordered_set<std::string> seen;
    for (auto& t : tokenize_terms(a)) {
        if (!is_stopword(t) && b.contains(t)) seen.insert(std::move(t));
    }
    return seen.size();
}

constexpr std::size_t kQuerySourceSharedTokens = 2;

}  // namespace

PartialActionPath trim(const ActionPath& path, std::size_t j) {
    if (j >= path.queries.size()) {
        throw std::out_of_range("trim index " + std::to_string(j) + " out of range for " +
                                std::to_string(path.queries.size()) + " queries");
    }
    return {&path, j};
}

std::string_view to_string(SelectionReason reason) {
    switch (reason) {
        case SelectionReason::answer_source: return "answer_source";
        case SelectionReason::query_source: return "query_source";
        case SelectionReason::manual: return "manual";
        case SelectionReason::manual_fallback: return "manual_fallback";
    }
    return "manual";
}

std::optional<CrucialSelection> select_crucial(const ActionPath& path, std::size_t evidence_set, const Corpus& corpus) {
    if (evidence_set == 0 || evidence_set > path.evidence_sets.size()) {
        throw std::out_of_range("evidence set index out of range");
    }
    const auto& set = path.evidence_sets[evidence_set - 1];
    if (set.empty()) return std::nullopt;

    const std::string answer = path.answer ? normalize_answer(*path.answer) : std::string{};
    // E_i follows q_{i-1}; the queries issued after it are q_i onward.
    std::vector<std::string> later_phrases;
    std::vector<std::string> later_raw;
    for (std::size_t m = evidence_set; m < path.queries.size(); ++m) {
        later_phrases.push_back(joined_tokens(path.queries[m].text));
        later_raw.push_back(path.queries[m].text);
    }

    auto first_matching = [&](auto&& pred) -> const EvidenceRecord* {
        for (const auto& rec : set) {
            const auto* para = corpus.find_paragraph(rec.paragraph_id);
            if (para && pred(rec, *para)) return &rec;
        }
        return nullptr;
    };

    if (!answer.empty()) {
        if (const auto* rec = first_matching([&](const EvidenceRecord&, const Paragraph& p) {
                return normalize_answer(p.text).find(answer) != std::string::npos;
            })) {
            return CrucialSelection{rec->paragraph_id, SelectionReason::answer_source, evidence_set};
        }
    }

    if (const auto* rec = first_matching([&](const EvidenceRecord&, const Paragraph& p) {
            auto para_tokens = joined_tokens(p.text);
            auto para_set = token_set(p.text);
            for (std::size_t m = 0; m < later_raw.size(); ++m) {
                if (contains_phrase(para_tokens, later_phrases[m])) return true;
                if (shared_content_tokens(later_raw[m], para_set) >= kQuerySourceSharedTokens) return true;
            }
            return false;
        })) {
        return CrucialSelection{rec->paragraph_id, SelectionReason::query_source, evidence_set};
    }

    if (const auto* rec = first_matching(
            [](const EvidenceRecord& r, const Paragraph&) { return r.kind == EvidenceKind::manual; })) {
        return CrucialSelection{rec->paragraph_id, SelectionReason::manual, evidence_set};
    }
    return CrucialSelection{set.front().paragraph_id, SelectionReason::manual_fallback, evidence_set};
}

namespace {

ConversionReport convert_sets(const ActionPath& path, std::size_t set_count, std::size_t j, std::string_view question,
                              const Corpus& corpus) {
    ConversionReport report;
    report.question_id = path.question_id;
    report.j = j;
    report.reasoning_path = ReasoningPath(std::string(question));
    for (std::size_t i = 1; i <= set_count; ++i) {
        auto pick = select_crucial(path, i, corpus);
        if (!pick) {
            report.skipped.push_back(i);
            continue;
        }
        const auto* para = corpus.find_paragraph(pick->paragraph_id);
        if (para && !report.reasoning_path.contains(para->paragraph_id)) {
            report.reasoning_path = extend_reasoning_path(std::move(report.reasoning_path), *para);
        } else if (!para) {
            report.reasoning_path = extend_reasoning_path(std::move(report.reasoning_path),
                                                          Paragraph{pick->paragraph_id, {}, {}, 0});
        }
        report.selected.push_back(std::move(*pick));
    }
    report.l = report.selected.size();
    return report;
}

}  // namespace

ConversionReport to_reasoning_path(const PartialActionPath& partial, std::string_view question, const Corpus& corpus) {
    return convert_sets(*partial.source, partial.j, partial.j, question, corpus);
}

ConversionReport to_reasoning_path(const ActionPath& path, std::string_view question, const Corpus& corpus) {
    return convert_sets(path, path.evidence_sets.size(), path.queries.size(), question, corpus);
}

std::vector<ConversionReport> convert_all(const ActionPath& path, const Corpus& corpus) {
    std::vector<ConversionReport> out;
    for (std::size_t j = 0; j < path.queries.size(); ++j) {
        out.push_back(to_reasoning_path(trim(path, j), path.question_text, corpus));
    }
    if (!path.queries.empty()) out.push_back(to_reasoning_path(path, path.question_text, corpus));
    return out;
}

std::array<std::set<std::string>, kMaxReasoningStep + 1> question_sets(const std::vector<ConversionReport>& reports) {
    std::array<std::set<std::string>, kMaxReasoningStep + 1> sets;
    for (const auto& r : reports) {
        for (std::size_t l = 0; l <= std::min(r.l, kMaxReasoningStep); ++l) sets[l].insert(r.question_id);
    }
    return sets;
}

std::string serialize(const ConversionReport& report) {
    nlohmann::ordered_json j;
    j["question_id"] = report.question_id;
    j["j"] = report.j;
    j["l"] = report.l;
    auto selected = nlohmann::ordered_json::array();
    for (const auto& s : report.selected) {
        selected.push_back({{"evidence_set", s.evidence_set}, {"paragraph_id", s.paragraph_id},
                            {"reason", to_string(s.reason)}});
    }
    j["selected"] = std::move(selected);
    j["skipped"] = report.skipped;
    auto ids = nlohmann::ordered_json::array();
    for (const auto& d : report.reasoning_path.documents()) ids.push_back(d.paragraph_id);
    j["reasoning_path"] = std::move(ids);
    return j.dump();
}

}  // namespace qagame
