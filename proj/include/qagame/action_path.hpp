#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qagame/corpus.hpp"
#include "qagame/retrieval.hpp"

namespace qagame {

enum class QueryOrigin { typed, suggestion_golden, suggestion_irrr, highlight_shortcut };
enum class EvidenceKind { manual, auto_read };

std::string_view to_string(QueryOrigin origin);
std::string_view to_string(EvidenceKind kind);
QueryOrigin parse_query_origin(std::string_view name);  // throws std::invalid_argument
EvidenceKind parse_evidence_kind(std::string_view name);

struct QueryRecord {
    std::string text;
    Engine engine = Engine::sparse;
    std::size_t index_in_path = 0;
    QueryOrigin origin = QueryOrigin::typed;
    std::int64_t t_ms = 0;  // since session start

    bool operator==(const QueryRecord&) const = default;
};

struct EvidenceRecord {
    std::string paragraph_id;
    EvidenceKind kind = EvidenceKind::manual;
    std::optional<TokenSpan> span;  // byte offsets into the paragraph text
    std::size_t after_query = 0;

    bool operator==(const EvidenceRecord&) const = default;
};

/// A = (q0, E1, q1, E2, ..., Ek, a). evidence_sets[i] holds E_{i+1}, the
/// evidence gathered after query i.
struct ActionPath {
    std::string question_id;
    std::string question_text;
    std::vector<QueryRecord> queries;
    std::vector<std::vector<EvidenceRecord>> evidence_sets;
    std::optional<std::string> answer;
    std::optional<bool> correct;

    bool finalized() const { return answer.has_value(); }
    std::size_t query_count() const { return queries.size(); }

    bool operator==(const ActionPath&) const = default;
};

/// Throws StateError on a finalized path, std::invalid_argument on blank text.
void append_query(ActionPath& path, QueryRecord record);

// Appends to E_{after_query+1}. A record equal in (paragraph_id, kind, span)
// to one already in that set is ignored; returns false in that case.
bool record_evidence(ActionPath& path, EvidenceRecord record);

void finalize(ActionPath& path, std::string answer, bool correct);

enum class TokenSource { question, evidence, novel };

struct TokenAttribution {
    std::string token;
    TokenSource label = TokenSource::novel;
    bool stopword = false;
    bool operator==(const TokenAttribution&) const = default;
};

struct SourceAttribution {
    bool has_question_word = false;          // any token, stopwords included
    bool has_question_content_word = false;  // non-stopword tokens only
    bool has_evidence_word = false;
    bool has_novel_word = false;             // non-stopword tokens only
    bool is_suggestion = false;
    std::vector<TokenAttribution> per_token;
};

/// Text an evidence record contributes: its span if present, else the paragraph.
std::string evidence_text(const EvidenceRecord& record, const Corpus& corpus);

// Labels each query token question > evidence > novel. Evidence is every
// record in E_1..E_{query_index}, i.e. recorded before the query was issued.
SourceAttribution attribute_query(const ActionPath& path, std::size_t query_index,
                                  const std::unordered_set<std::string>& question_tokens,
                                  const std::vector<std::string>& shown_suggestions, const Corpus& corpus);

/// Chains of query indices; a query joins the current chain when it shares a
/// non-stopword token with the chain's queries or evidence.
std::vector<std::vector<std::size_t>> segment_chains(const ActionPath& path, const Corpus& corpus);

/// One export record line, schema "v": 1.
std::string serialize(const ActionPath& path);
/// Throws ParseError.
ActionPath deserialize(std::string_view line);

}  // namespace qagame
