#include "qagame/events.hpp"

#include <array>
#include <istream>

#include "qagame/errors.hpp"

namespace qagame {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<EventKind, std::string_view>, 9> kKindNames = {{
    {EventKind::session_created, "session_created"},
    {EventKind::question_assigned, "question_assigned"},
    {EventKind::clue_revealed, "clue_revealed"},
    {EventKind::query_issued, "query_issued"},
    {EventKind::result_clicked, "result_clicked"},
    {EventKind::evidence_recorded, "evidence_recorded"},
    {EventKind::answer_submitted, "answer_submitted"},
    {EventKind::question_skipped, "question_skipped"},
    {EventKind::timed_out, "timed_out"},
}};

void require_active(const SessionState& state, EventKind kind) {
    if (!state.active()) {
        throw StateError(std::string(to_string(kind)) + " requires an active session");
    }
}

void end_session(SessionState& state, SessionStatus status, std::string answer, bool correct, std::int64_t t_ms) {
    auto& s = *state.session;
    s.status = status;
    finalize(s.path, std::move(answer), correct);
    state.score = score(s, t_ms);
    state.ended_at_ms = t_ms;
}

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "session_created";
}

EventKind parse_event_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw std::invalid_argument("unknown event kind \"" + std::string(name) + "\"");
}

bool is_terminal(EventKind kind) {
    return kind == EventKind::answer_submitted || kind == EventKind::question_skipped || kind == EventKind::timed_out;
}

SessionState apply_event(SessionState state, const Event& event) {
    if (event.seq != state.next_seq) {
        throw ConflictError("expected seq " + std::to_string(state.next_seq) + ", got " + std::to_string(event.seq));
    }
    if (!state.empty() && event.session_id != state.session_id) {
        throw ConflictError("event for session " + event.session_id + " applied to " + state.session_id);
    }
    try {
        switch (event.kind) {
            case EventKind::session_created:
                if (!state.empty()) throw StateError("session already created");
                state.session_id = event.session_id;
                state.player_id = event.payload.at("player_id").get<std::string>();
                state.created_at_ms = event.t_ms;
                break;
            case EventKind::question_assigned:
                if (state.empty() || state.session) throw StateError("question_assigned out of order");
                state.session = start_session(state.session_id, state.player_id,
                                              question_from_json(event.payload.at("question")), event.t_ms);
                break;
            case EventKind::clue_revealed:
                require_active(state, event.kind);
                reveal_clue(*state.session);
                break;
            case EventKind::query_issued: {
                require_active(state, event.kind);
                QueryRecord q;
                q.text = event.payload.at("text").get<std::string>();
                q.engine = parse_engine(event.payload.at("engine").get<std::string>());
                q.origin = parse_query_origin(event.payload.at("origin").get<std::string>());
                q.t_ms = event.t_ms - state.session->started_at_ms;
                append_query(state.session->path, std::move(q));
                break;
            }
            case EventKind::result_clicked:
            case EventKind::evidence_recorded: {
                require_active(state, event.kind);
                auto& path = state.session->path;
                if (path.queries.empty()) throw StateError("evidence requires a prior query");
                EvidenceRecord rec;
                rec.paragraph_id = event.payload.at("paragraph_id").get<std::string>();
                rec.kind = event.kind == EventKind::result_clicked ? EvidenceKind::auto_read : EvidenceKind::manual;
                if (event.kind == EventKind::evidence_recorded && event.payload.contains("span") &&
                    !event.payload.at("span").is_null()) {
                    const auto& sp = event.payload.at("span");
                    rec.span = TokenSpan{sp.at(0).get<std::size_t>(), sp.at(1).get<std::size_t>()};
                }
                rec.after_query = path.queries.size() - 1;
                record_evidence(path, std::move(rec));
                break;
            }
            case EventKind::answer_submitted: {
                require_active(state, event.kind);
                auto text = event.payload.at("text").get<std::string>();
                state.verdict = grade_answer(text, state.session->question);
                end_session(state, SessionStatus::answered, std::move(text), state.verdict->correct, event.t_ms);
                break;
            }
            case EventKind::question_skipped:
                require_active(state, event.kind);
                end_session(state, SessionStatus::skipped, "", false, event.t_ms);
                break;
            case EventKind::timed_out:
                require_active(state, event.kind);
                end_session(state, SessionStatus::timed_out, "", false, event.t_ms);
                break;
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + std::string(to_string(event.kind)) + " payload: " + e.what(),
                         0);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("malformed ") + std::string(to_string(event.kind)) + " payload: " + e.what(),
                         0);
    }
    ++state.next_seq;
    return state;
}

SessionState replay(std::span<const Event> events) {
    SessionState state;
    for (const auto& e : events) state = apply_event(std::move(state), e);
    return state;
}

std::string serialize(const Event& event) {
    nlohmann::ordered_json j;
    j["session_id"] = event.session_id;
    j["seq"] = event.seq;
    j["kind"] = to_string(event.kind);
    j["t_ms"] = event.t_ms;
    j["payload"] = event.payload;
    return j.dump();
}

Event parse_event(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    std::optional<std::uint64_t> seq;
    try {
        if (j.is_object() && j.contains("seq") && j["seq"].is_number_unsigned()) seq = j["seq"].get<std::uint64_t>();
        Event e;
        e.session_id = j.at("session_id").get<std::string>();
        e.seq = j.at("seq").get<std::uint64_t>();
        e.kind = parse_event_kind(j.at("kind").get<std::string>());
        e.t_ms = j.at("t_ms").get<std::int64_t>();
        e.payload = j.at("payload");
        if (!e.payload.is_object()) throw ParseError("payload must be an object", 0);
        return e;
    } catch (const std::exception& e) {
        std::string where = seq ? "seq " + std::to_string(*seq) + ": " : std::string{};
        throw ParseError(where + e.what(), seq.value_or(0));
    }
}

std::map<std::string, SessionState> replay_log(std::istream& in) {
    std::map<std::string, SessionState> states;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto e = parse_event(line);
        auto& st = states[e.session_id];
        st = apply_event(std::move(st), e);
    }
    return states;
}

json to_json(const GameQuestion& q) {
    return {{"question_id", q.question_id},
            {"source", to_string(q.source)},
            {"clues", q.clues},
            {"answer", q.answer},
            {"aliases", q.aliases}};
}

GameQuestion question_from_json(const json& j) {
    GameQuestion q;
    q.question_id = j.at("question_id").get<std::string>();
    q.source = parse_question_source(j.at("source").get<std::string>());
    q.clues = j.at("clues").get<std::vector<std::string>>();
    q.answer = j.at("answer").get<std::string>();
    q.aliases = j.at("aliases").get<std::vector<std::string>>();
    if (q.clues.empty()) throw std::invalid_argument("question has no clues");
    return q;
}

json to_json(const ScoreBreakdown& s) {
    return {{"participation", s.participation},
            {"correctness", s.correctness},
            {"clue_penalty", s.clue_penalty},
            {"evidence_bonus", s.evidence_bonus},
            {"total", s.total}};
}

json to_json(const Verdict& v) {
    return {{"correct", v.correct},
            {"matched_alias", v.matched_alias ? json(*v.matched_alias) : json(nullptr)},
            {"rule", v.rule ? json(to_string(*v.rule)) : json(nullptr)}};
}

json to_json(const SessionState& state) {
    json j;
    j["session_id"] = state.session_id;
    j["player_id"] = state.player_id;
    j["next_seq"] = state.next_seq;
    j["created_at_ms"] = state.created_at_ms;
    if (state.session) {
        const auto& s = *state.session;
        j["session"] = {{"question", to_json(s.question)},
                        {"clues_revealed", s.clues_revealed},
                        {"started_at_ms", s.started_at_ms},
                        {"status", to_string(s.status)},
                        {"path", json::parse(serialize(s.path))}};
    } else {
        j["session"] = nullptr;
    }
    j["verdict"] = state.verdict ? to_json(*state.verdict) : json(nullptr);
    j["score"] = state.score ? to_json(*state.score) : json(nullptr);
    j["ended_at_ms"] = state.ended_at_ms ? json(*state.ended_at_ms) : json(nullptr);
    return j;
}

SessionState session_state_from_json(const json& j) {
    SessionState st;
    st.session_id = j.at("session_id").get<std::string>();
    st.player_id = j.at("player_id").get<std::string>();
    st.next_seq = j.at("next_seq").get<std::uint64_t>();
    st.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    if (!j.at("session").is_null()) {
        const auto& js = j.at("session");
        Session s;
        s.session_id = st.session_id;
        s.player_id = st.player_id;
        s.question = question_from_json(js.at("question"));
        s.clues_revealed = js.at("clues_revealed").get<std::size_t>();
        s.started_at_ms = js.at("started_at_ms").get<std::int64_t>();
        s.status = parse_session_status(js.at("status").get<std::string>());
        s.path = deserialize(js.at("path").dump());
        st.session = std::move(s);
    }
    if (!j.at("verdict").is_null()) {
        const auto& jv = j.at("verdict");
        Verdict v;
        v.correct = jv.at("correct").get<bool>();
        if (!jv.at("matched_alias").is_null()) v.matched_alias = jv.at("matched_alias").get<std::string>();
        if (!jv.at("rule").is_null()) {
            v.rule = jv.at("rule").get<std::string>() == "token_f1" ? GradeRule::token_f1 : GradeRule::exact_normalized;
        }
        st.verdict = v;
    }
    if (!j.at("score").is_null()) {
        const auto& js = j.at("score");
        st.score = ScoreBreakdown{js.at("participation").get<int>(), js.at("correctness").get<int>(),
                                  js.at("clue_penalty").get<int>(), js.at("evidence_bonus").get<int>(),
                                  js.at("total").get<int>()};
    }
    if (!j.at("ended_at_ms").is_null()) st.ended_at_ms = j.at("ended_at_ms").get<std::int64_t>();
    return st;
}

}  // namespace qagame
