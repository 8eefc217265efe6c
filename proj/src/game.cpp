#include "qagame/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qagame/errors.hpp"

namespace qagame {

std::string_view to_string(QuestionSource source) { return source == QuestionSource::qb ? "qb" : "hotpot"; }

QuestionSource parse_question_source(std::string_view name) {
    if (name == "qb") return QuestionSource::qb;
    if (name == "hotpot") return QuestionSource::hotpot;
    throw std::invalid_argument("unknown question source \"" + std::string(name) + "\"");
}

std::string_view to_string(SessionStatus status) {
    switch (status) {
        case SessionStatus::active: return "active";
        case SessionStatus::answered: return "answered";
        case SessionStatus::skipped: return "skipped";
        case SessionStatus::timed_out: return "timed_out";
    }
    return "active";
}

SessionStatus parse_session_status(std::string_view name) {
    for (auto s : {SessionStatus::active, SessionStatus::answered, SessionStatus::skipped, SessionStatus::timed_out}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown session status \"" + std::string(name) + "\"");
}

std::string_view to_string(GradeRule rule) { return rule == GradeRule::exact_normalized ? "exact_normalized" : "token_f1"; }

GameQuestion parse_question_record(std::string_view line) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    try {
        GameQuestion q;
        q.question_id = j.at("question_id").get<std::string>();
        q.source = parse_question_source(j.at("source").get<std::string>());
        q.clues = j.at("clues").get<std::vector<std::string>>();
        q.answer = j.at("answer").get<std::string>();
        if (j.contains("aliases")) q.aliases = j.at("aliases").get<std::vector<std::string>>();
        if (q.clues.empty()) throw ParseError("question \"" + q.question_id + "\" has no clues", 0);
        if (q.source == QuestionSource::hotpot && q.clues.size() != 1) {
            throw ParseError("hotpot question \"" + q.question_id + "\" must have exactly one clue", 0);
        }
        return q;
    } catch (const json::exception& e) {
        throw ParseError(e.what(), 0);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
}

std::string serialize_question_record(const GameQuestion& q) {
    nlohmann::ordered_json j;
    j["question_id"] = q.question_id;
    j["source"] = to_string(q.source);
    j["clues"] = q.clues;
    j["answer"] = q.answer;
    j["aliases"] = q.aliases;
    return j.dump();
}

std::vector<GameQuestion> parse_questions(std::istream& in) {
    std::vector<GameQuestion> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_question_record(line));
        } catch (const ParseError& e) {
            throw LoadError(e.what(), line_no);
        }
    }
    return out;
}

std::vector<GameQuestion> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open question file " + path.string());
    return parse_questions(in);
}

Session start_session(std::string session_id, std::string player_id, GameQuestion question,
                      std::int64_t started_at_ms) {
    Session s;
    s.session_id = std::move(session_id);
    s.player_id = std::move(player_id);
    s.path.question_id = question.question_id;
    s.path.question_text = question.clues.front();
    s.question = std::move(question);
    s.clues_revealed = 1;
    s.started_at_ms = started_at_ms;
    return s;
}

std::vector<GameQuestion> filter_questions(std::vector<GameQuestion> raw, const InvertedIndex& index,
                                           const Corpus& corpus, std::size_t k) {
    std::vector<GameQuestion> eligible;
    for (auto& q : raw) {
        if (q.source == QuestionSource::qb && q.clues.size() > kQbClueLimit) q.clues.resize(kQbClueLimit);

        std::vector<std::string> probes = q.clues;
        if (q.clues.size() > 1) {
            std::string joined;
            for (const auto& c : q.clues) {
                if (!joined.empty()) joined.push_back(' ');
                joined += c;
            }
            probes.push_back(std::move(joined));
        }
        bool single_hop = std::any_of(probes.begin(), probes.end(), [&](const std::string& probe) {
            auto hits = search_sparse(index, corpus, probe, k);
            return std::any_of(hits.begin(), hits.end(),
                               [&](const SearchHit& h) { return grade_answer(h.page_title, q).correct; });
        });
        if (!single_hop) eligible.push_back(std::move(q));
    }
    return eligible;
}

std::string reveal_clue(Session& session) {
    if (session.status != SessionStatus::active) throw StateError("session is not active");
    if (session.question.source != QuestionSource::qb) throw StateError("clue reveal only applies to qb questions");
    if (session.clues_revealed >= session.question.clues.size()) throw StateError("no clues left to reveal");
    const auto& clue = session.question.clues[session.clues_revealed];
    ++session.clues_revealed;
    if (!session.path.question_text.empty()) session.path.question_text.push_back(' ');
    session.path.question_text += clue;
    return clue;
}

Verdict grade_answer(std::string_view submitted, const GameQuestion& question, double f1_threshold) {
    auto norm = normalize_answer(submitted);
    if (norm.empty()) return {};

    std::vector<const std::string*> golds{&question.answer};
    for (const auto& a : question.aliases) golds.push_back(&a);

    for (const auto* gold : golds) {
        if (normalize_answer(*gold) == norm) return {true, *gold, GradeRule::exact_normalized};
    }
    for (const auto* gold : golds) {
        if (token_f1(submitted, *gold) >= f1_threshold) return {true, *gold, GradeRule::token_f1};
    }
    return {};
}

ScoreBreakdown score(const Session& session, std::int64_t answered_at_ms) {
    if (session.status == SessionStatus::active) throw StateError("cannot score an active session");
    ScoreBreakdown s;
    const bool answered = session.status == SessionStatus::answered;
    s.participation = answered ? 5 : 0;
    if (answered && session.path.correct.value_or(false)) {
        const double total = session.question.timer_total();
        const double elapsed = static_cast<double>(answered_at_ms - session.started_at_ms) / 1000.0;
        const double remaining = std::clamp(total - elapsed, 0.0, total);
        s.correctness = std::max(10, static_cast<int>(std::lround(100.0 * remaining / total)));
    }
    s.clue_penalty = -10 * static_cast<int>(session.clues_revealed - 1);
    std::size_t manual = 0;
    for (const auto& set : session.path.evidence_sets) {
        manual += static_cast<std::size_t>(std::count_if(
            set.begin(), set.end(), [](const EvidenceRecord& e) { return e.kind == EvidenceKind::manual; }));
    }
    s.evidence_bonus = static_cast<int>(std::min<std::size_t>(100, 10 * manual));
    s.total = std::max(0, s.participation + s.correctness + s.clue_penalty + s.evidence_bonus);
    return s;
}

}  // namespace qagame
