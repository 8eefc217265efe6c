#include "qagame/action_path.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qagame/errors.hpp"

namespace qagame {
namespace {

using ojson = nlohmann::ordered_json;

std::string joined_tokens(std::string_view text) {
    std::string out;
    for (const auto& t : tokenize_terms(text)) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

bool shares_content_token(const std::vector<std::string>& tokens, const std::unordered_set<std::string>& pool) {
    return std::any_of(tokens.begin(), tokens.end(),
                       [&](const std::string& t) { return !is_stopword(t) && pool.contains(t); });
}

void add_tokens(std::unordered_set<std::string>& pool, std::string_view text) {
    for (auto& t : tokenize_terms(text)) pool.insert(std::move(t));
}

}  // namespace

std::string_view to_string(QueryOrigin origin) {
    switch (origin) {
        case QueryOrigin::typed: return "typed";
        case QueryOrigin::suggestion_golden: return "suggestion_golden";
        case QueryOrigin::suggestion_irrr: return "suggestion_irrr";
        case QueryOrigin::highlight_shortcut: return "highlight_shortcut";
    }
    return "typed";
}

std::string_view to_string(EvidenceKind kind) { return kind == EvidenceKind::manual ? "manual" : "auto_read"; }

QueryOrigin parse_query_origin(std::string_view name) {
    for (auto o : {QueryOrigin::typed, QueryOrigin::suggestion_golden, QueryOrigin::suggestion_irrr,
                   QueryOrigin::highlight_shortcut}) {
        if (to_string(o) == name) return o;
    }
    throw std::invalid_argument("unknown query origin \"" + std::string(name) + "\"");
}

EvidenceKind parse_evidence_kind(std::string_view name) {
    if (name == "manual") return EvidenceKind::manual;
    if (name == "auto_read") return EvidenceKind::auto_read;
    throw std::invalid_argument("unknown evidence kind \"" + std::string(name) + "\"");
}

void append_query(ActionPath& path, QueryRecord record) {
    if (path.finalized()) throw StateError("cannot append a query to a finalized path");
    if (record.text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw std::invalid_argument("query text is blank");
    }
    record.index_in_path = path.queries.size();
    path.queries.push_back(std::move(record));
    path.evidence_sets.emplace_back();
}

bool record_evidence(ActionPath& path, EvidenceRecord record) {
    if (path.finalized()) throw StateError("cannot record evidence on a finalized path");
    if (record.after_query >= path.queries.size()) {
        throw std::out_of_range("evidence references query " + std::to_string(record.after_query) + " but path has " +
                                std::to_string(path.queries.size()) + " queries");
    }
    if (record.span && record.span->start > record.span->end) throw std::invalid_argument("inverted evidence span");
    auto& set = path.evidence_sets[record.after_query];
    auto dup = std::find_if(set.begin(), set.end(), [&](const EvidenceRecord& e) {
        return e.paragraph_id == record.paragraph_id && e.kind == record.kind && e.span == record.span;
    });
    if (dup != set.end()) return false;
    set.push_back(std::move(record));
    return true;
}

void finalize(ActionPath& path, std::string answer, bool correct) {
    if (path.finalized()) throw StateError("path already finalized");
    path.answer = std::move(answer);
    path.correct = correct;
}

std::string evidence_text(const EvidenceRecord& record, const Corpus& corpus) {
    const auto* para = corpus.find_paragraph(record.paragraph_id);
    if (!para) return {};
    if (record.span && record.span->end <= para->text.size()) {
        return para->text.substr(record.span->start, record.span->end - record.span->start);
    }
    return para->text;
}

SourceAttribution attribute_query(const ActionPath& path, std::size_t query_index,
                                  const std::unordered_set<std::string>& question_tokens,
                                  const std::vector<std::string>& shown_suggestions, const Corpus& corpus) {
    if (query_index >= path.queries.size()) throw std::out_of_range("query index out of range");
    const auto& query = path.queries[query_index];

    std::unordered_set<std::string> evidence_tokens;
    for (std::size_t i = 0; i < query_index; ++i) {
        for (const auto& rec : path.evidence_sets[i]) add_tokens(evidence_tokens, evidence_text(rec, corpus));
    }

    SourceAttribution out;
    out.is_suggestion = query.origin == QueryOrigin::suggestion_golden || query.origin == QueryOrigin::suggestion_irrr;
    if (!out.is_suggestion) {
        auto norm = joined_tokens(query.text);
        out.is_suggestion = std::any_of(shown_suggestions.begin(), shown_suggestions.end(),
                                        [&](const std::string& s) { return joined_tokens(s) == norm; });
    }

    for (auto& token : tokenize_terms(query.text)) {
        TokenAttribution ta;
        ta.stopword = is_stopword(token);
        if (question_tokens.contains(token)) {
            ta.label = TokenSource::question;
        } else if (evidence_tokens.contains(token)) {
            ta.label = TokenSource::evidence;
        }
        out.has_question_word |= ta.label == TokenSource::question;
        out.has_question_content_word |= ta.label == TokenSource::question && !ta.stopword;
        out.has_evidence_word |= ta.label == TokenSource::evidence;
        out.has_novel_word |= ta.label == TokenSource::novel && !ta.stopword;
        ta.token = std::move(token);
        out.per_token.push_back(std::move(ta));
    }
    return out;
}

std::vector<std::vector<std::size_t>> segment_chains(const ActionPath& path, const Corpus& corpus) {
    std::vector<std::vector<std::size_t>> chains;
    std::unordered_set<std::string> chain_tokens;
    for (std::size_t i = 0; i < path.queries.size(); ++i) {
        auto tokens = tokenize_terms(path.queries[i].text);
        if (chains.empty() || !shares_content_token(tokens, chain_tokens)) {
            chains.emplace_back();
            chain_tokens.clear();
        }
        chains.back().push_back(i);
        chain_tokens.insert(tokens.begin(), tokens.end());
        for (const auto& rec : path.evidence_sets[i]) add_tokens(chain_tokens, evidence_text(rec, corpus));
    }
    return chains;
}

std::string serialize(const ActionPath& path) {
    ojson j;
    j["v"] = 1;
    j["question_id"] = path.question_id;
    j["question_text"] = path.question_text;
    auto queries = ojson::array();
    for (const auto& q : path.queries) {
        queries.push_back({{"text", q.text}, {"engine", to_string(q.engine)}, {"origin", to_string(q.origin)},
                           {"t_ms", q.t_ms}});
    }
    j["queries"] = std::move(queries);
    auto sets = ojson::array();
    for (const auto& set : path.evidence_sets) {
        auto records = ojson::array();
        for (const auto& e : set) {
            ojson rec;
            rec["paragraph_id"] = e.paragraph_id;
            rec["kind"] = to_string(e.kind);
            rec["span"] = e.span ? ojson::array({e.span->start, e.span->end}) : ojson(nullptr);
            rec["after_query"] = e.after_query;
            records.push_back(std::move(rec));
        }
        sets.push_back(std::move(records));
    }
    j["evidence_sets"] = std::move(sets);
    j["answer"] = path.answer ? ojson(*path.answer) : ojson(nullptr);
    j["correct"] = path.correct ? ojson(*path.correct) : ojson(nullptr);
    return j.dump();
}

ActionPath deserialize(std::string_view line) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    try {
        if (!j.is_object()) throw ParseError("action path must be an object", 0);
        if (j.at("v").get<int>() != 1) throw ParseError("unsupported schema version", 0);
        ActionPath path;
        path.question_id = j.at("question_id").get<std::string>();
        path.question_text = j.at("question_text").get<std::string>();
        for (const auto& q : j.at("queries")) {
            QueryRecord rec;
            rec.text = q.at("text").get<std::string>();
            rec.engine = parse_engine(q.at("engine").get<std::string>());
            rec.origin = parse_query_origin(q.at("origin").get<std::string>());
            rec.t_ms = q.at("t_ms").get<std::int64_t>();
            rec.index_in_path = path.queries.size();
            path.queries.push_back(std::move(rec));
        }
        const auto& sets = j.at("evidence_sets");
        if (sets.size() != path.queries.size()) throw ParseError("evidence_sets must have one set per query", 0);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            std::vector<EvidenceRecord> set;
            for (const auto& e : sets[i]) {
                EvidenceRecord rec;
                rec.paragraph_id = e.at("paragraph_id").get<std::string>();
                rec.kind = parse_evidence_kind(e.at("kind").get<std::string>());
                if (!e.at("span").is_null()) {
                    const auto& s = e.at("span");
                    rec.span = TokenSpan{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
                    if (rec.span->start > rec.span->end) throw ParseError("inverted span", 0);
                }
                rec.after_query = e.at("after_query").get<std::size_t>();
                if (rec.after_query != i) throw ParseError("after_query does not match its evidence set", 0);
                set.push_back(std::move(rec));
            }
            path.evidence_sets.push_back(std::move(set));
        }
        if (!j.at("answer").is_null()) path.answer = j.at("answer").get<std::string>();
        if (!j.at("correct").is_null()) path.correct = j.at("correct").get<bool>();
        return path;
    } catch (const ojson::exception& e) {
        throw ParseError(e.what(), 0);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
}

}  // namespace qagame
