#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qagame/action_path.hpp"
#include "qagame/retrieval.hpp"

namespace qagame {

enum class QuestionSource { qb, hotpot };

std::string_view to_string(QuestionSource source);
QuestionSource parse_question_source(std::string_view name);  // throws std::invalid_argument

inline constexpr int kQbTimerSeconds = 240;
inline constexpr int kHotpotTimerSeconds = 180;
inline constexpr std::size_t kQbClueLimit = 2;
inline constexpr std::size_t kSingleHopFilterK = 5;
inline constexpr double kTokenF1Threshold = 0.8;

struct GameQuestion {
    std::string question_id;
    QuestionSource source = QuestionSource::qb;
    std::vector<std::string> clues;  // hardest first
    std::string answer;
    std::vector<std::string> aliases;

    int timer_total() const { return source == QuestionSource::qb ? kQbTimerSeconds : kHotpotTimerSeconds; }
    bool operator==(const GameQuestion&) const = default;
};

std::vector<GameQuestion> parse_questions(std::istream& in);  // throws LoadError with line
std::vector<GameQuestion> load_questions(const std::filesystem::path& path);
GameQuestion parse_question_record(std::string_view line);
std::string serialize_question_record(const GameQuestion& q);

enum class SessionStatus { active, answered, skipped, timed_out };
std::string_view to_string(SessionStatus status);
SessionStatus parse_session_status(std::string_view name);

struct Session {
    std::string session_id;
    std::string player_id;
    GameQuestion question;
    std::size_t clues_revealed = 1;
    std::int64_t started_at_ms = 0;
    ActionPath path;
    SessionStatus status = SessionStatus::active;

    bool operator==(const Session&) const = default;
};

/// A fresh active session with the first clue revealed.
Session start_session(std::string session_id, std::string player_id, GameQuestion question,
                      std::int64_t started_at_ms);

struct ScoreBreakdown {
    int participation = 0;
    int correctness = 0;
    int clue_penalty = 0;
    int evidence_bonus = 0;
    int total = 0;
    bool operator==(const ScoreBreakdown&) const = default;
};

enum class GradeRule { exact_normalized, token_f1 };
std::string_view to_string(GradeRule rule);

struct Verdict {
    bool correct = false;
    std::optional<std::string> matched_alias;
    std::optional<GradeRule> rule;
    bool operator==(const Verdict&) const = default;
};

// Keeps the two hardest qb clues, then drops questions the single-hop proxy
// answers: any single clue, or all clues joined, retrieves a top-k page whose
// title grades correct.
std::vector<GameQuestion> filter_questions(std::vector<GameQuestion> raw, const InvertedIndex& index,
                                           const Corpus& corpus, std::size_t k = kSingleHopFilterK);

/// Returns the new clue. Throws StateError (inactive, hotpot, none left).
std::string reveal_clue(Session& session);

Verdict grade_answer(std::string_view submitted, const GameQuestion& question,
                     double f1_threshold = kTokenF1Threshold);

/// Pure scoring of a terminal session. Throws StateError while active.
ScoreBreakdown score(const Session& session, std::int64_t answered_at_ms);

}  // namespace qagame
