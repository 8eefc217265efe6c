#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qagame/analysis.hpp"
#include "qagame/events.hpp"
#include "qagame/retrieval.hpp"

namespace qagame {

/// Carries the HTTP status the API layer should answer with.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

struct ServiceConfig {
    std::filesystem::path data_dir;  // empty: in-memory only
    std::uint64_t seed = 0x5eedULL;
    std::function<std::int64_t()> clock;  // server time in ms; defaults to the system clock
    std::size_t snapshot_every = 500;     // events between snapshots, 0 disables
    std::int64_t grace_ms = 2000;         // extra time accepted on terminal events
    std::size_t max_k = 100;
};

struct CreatedSession {
    std::string session_id;
    std::string question_id;
    std::string clue;
    int timer_total = 0;
};

struct PageView {
    std::string page_id;
    std::string title;
    std::vector<std::string> paragraphs;
    std::optional<std::size_t> highlight_index;
};

struct SuggestionSet {
    std::optional<std::string> golden;
    std::optional<std::string> irrr;
    std::optional<std::string> answer;
};

struct AnswerResult {
    Verdict verdict;
    ScoreBreakdown score;
};

struct LeaderboardEntry {
    std::string player_id;
    int total_score = 0;
    std::size_t questions_answered = 0;
    std::size_t correct = 0;
    bool operator==(const LeaderboardEntry&) const = default;
};

/// Orders by total_score desc, correct desc, then player_id.
bool leaderboard_before(const LeaderboardEntry& a, const LeaderboardEntry& b);

// Event-sourced game server. Each session is single-writer (its own mutex);
// the corpus, indexes and question pool are shared read-only. Every state
// change is an appended Event; live state is the fold of that log.
class GameService {
public:
    GameService(const SearchEngines& engines, std::vector<GameQuestion> pool, ServiceConfig config = {});
    ~GameService();

    GameService(const GameService&) = delete;
    GameService& operator=(const GameService&) = delete;

    CreatedSession create_session(const std::string& player_id);
    std::string reveal_clue(const std::string& session_id);
    std::vector<SearchHit> search(const std::string& session_id, Engine engine, const std::string& query,
                                  std::size_t k, QueryOrigin origin = QueryOrigin::typed);
    PageView page(const std::string& page_id, const std::optional<std::string>& highlight) const;
    void record_evidence(const std::string& session_id, const std::string& paragraph_id,
                         std::optional<TokenSpan> span, EvidenceKind kind);
    SuggestionSet suggestions(const std::string& session_id);
    AnswerResult answer(const std::string& session_id, const std::string& text);
    ScoreBreakdown skip(const std::string& session_id);

    std::vector<LeaderboardEntry> leaderboard(std::size_t n) const;

    /// Finalized paths in session order, each derived by replaying its log.
    std::vector<ActionPath> export_paths(const std::optional<std::string>& player = std::nullopt) const;
    /// Suggestions shown, keyed by position in the matching export_paths() result.
    std::vector<ShownSuggestions> export_suggestions(const std::optional<std::string>& player = std::nullopt) const;

    SessionState live_state(const std::string& session_id) const;
    std::vector<Event> session_events(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

    /// Writes every session state to snapshot.json. Recovery applies only log
    /// events past each snapshotted state's next_seq.
    void snapshot();

    const SearchEngines& engines() const { return engines_; }

private:
    struct Slot {
        mutable std::mutex mutex;
        SessionState state;
        std::vector<Event> events;
    };
    struct ShownRecord {
        std::string session_id;
        std::size_t query_index = 0;
        std::optional<std::string> golden;
        std::optional<std::string> irrr;
    };

    std::int64_t now() const;
    Slot& slot(const std::string& session_id) const;
    /// Appends under the slot lock already held by the caller.
    void append(Slot& slot, EventKind kind, nlohmann::json payload, std::int64_t t_ms);
    /// Synthesizes timed_out if the timer ran out; returns true when it did.
    bool expire_if_due(Slot& slot, std::int64_t t_ms, bool terminal_request);
    void require_active(Slot& slot, std::int64_t t_ms, bool terminal_request);
    void on_terminal(const SessionState& state);
    bool since_snapshot_due() const;
    std::optional<std::size_t> next_question_for(const std::string& player_id);
    void recover();

    const SearchEngines& engines_;
    std::vector<GameQuestion> pool_;
    ServiceConfig config_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::unique_ptr<Slot>> sessions_;
    std::uint64_t next_session_number_ = 1;

    std::mutex assign_mutex_;
    std::mt19937_64 rng_;
    std::map<std::string, std::vector<std::size_t>> remaining_;  // player -> unassigned pool indices

    mutable std::mutex board_mutex_;
    std::map<std::string, LeaderboardEntry> board_;

    mutable std::mutex log_mutex_;
    std::ofstream log_;
    std::ofstream suggestions_out_;
    std::size_t since_snapshot_ = 0;
    std::vector<ShownRecord> shown_;
};

}  // namespace qagame
