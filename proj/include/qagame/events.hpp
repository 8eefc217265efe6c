#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qagame/game.hpp"

namespace qagame {

enum class EventKind {
    session_created,
    question_assigned,
    clue_revealed,
    query_issued,
    result_clicked,
    evidence_recorded,
    answer_submitted,
    question_skipped,
    timed_out,
};

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view name);  // throws std::invalid_argument
bool is_terminal(EventKind kind);

struct Event {
    std::string session_id;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::session_created;
    nlohmann::json payload = nlohmann::json::object();
    std::int64_t t_ms = 0;  // server clock

    bool operator==(const Event&) const = default;
};

/// Sequence gap or session mismatch.
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything replay reconstructs for one session.
struct SessionState {
    std::string session_id;
    std::string player_id;
    std::uint64_t next_seq = 0;
    std::int64_t created_at_ms = 0;
    std::optional<Session> session;  // set by question_assigned
    std::optional<Verdict> verdict;
    std::optional<ScoreBreakdown> score;
    std::optional<std::int64_t> ended_at_ms;

    bool empty() const { return next_seq == 0; }
    bool active() const { return session && session->status == SessionStatus::active; }
    bool terminal() const { return session && session->status != SessionStatus::active; }

    bool operator==(const SessionState&) const = default;
};

// Deterministic transition. Throws ConflictError when event.seq !=
// state.next_seq, StateError when the kind is illegal in the current status,
// ParseError for a malformed payload.
SessionState apply_event(SessionState state, const Event& event);

/// Fold of apply_event from the empty state.
SessionState replay(std::span<const Event> events);

std::string serialize(const Event& event);
/// ParseError carries the record's seq when it could be read, else the byte offset.
Event parse_event(std::string_view line);

/// Replays a multi-session log, one event per line.
std::map<std::string, SessionState> replay_log(std::istream& in);

nlohmann::json to_json(const SessionState& state);
SessionState session_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GameQuestion& q);
GameQuestion question_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScoreBreakdown& s);
nlohmann::json to_json(const Verdict& v);

}  // namespace qagame
