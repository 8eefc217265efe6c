#include "qagame/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "qagame/errors.hpp"
#include "qagame/suggesters.hpp"

namespace qagame {
namespace {

using nlohmann::json;

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kSuggestionsFile = "suggestions.jsonl";
constexpr const char* kSnapshotFile = "snapshot.json";

std::string session_name(std::uint64_t n) {
    std::ostringstream os;
    os << 's' << std::setw(8) << std::setfill('0') << n;
    return os.str();
}

std::int64_t deadline_ms(const Session& s) { return s.started_at_ms + 1000LL * s.question.timer_total(); }

ReasoningPath reasoning_path_for(const Session& s, const Corpus& corpus) {
    ReasoningPath r(s.path.question_text);
    for (const auto& set : s.path.evidence_sets) {
        for (const auto& rec : set) {
            if (r.contains(rec.paragraph_id)) continue;
            if (const auto* p = corpus.find_paragraph(rec.paragraph_id)) r = extend_reasoning_path(std::move(r), *p);
        }
    }
    return r;
}

}  // namespace

bool leaderboard_before(const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.total_score != b.total_score) return a.total_score > b.total_score;
    if (a.correct != b.correct) return a.correct > b.correct;
    return a.player_id < b.player_id;
}

GameService::GameService(const SearchEngines& engines, std::vector<GameQuestion> pool, ServiceConfig config)
    : engines_(engines), pool_(std::move(pool)), config_(std::move(config)), rng_(config_.seed) {
    if (!config_.data_dir.empty()) {
        std::filesystem::create_directories(config_.data_dir);
        recover();
        log_.open(config_.data_dir / kEventsFile, std::ios::app);
        suggestions_out_.open(config_.data_dir / kSuggestionsFile, std::ios::app);
        if (!log_ || !suggestions_out_) throw LoadError("cannot open data files in " + config_.data_dir.string());
    }
}

GameService::~GameService() = default;

std::int64_t GameService::now() const {
    if (config_.clock) return config_.clock();
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

GameService::Slot& GameService::slot(const std::string& session_id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw ServiceError(404, "unknown session " + session_id);
    return *it->second;
}

void GameService::append(Slot& s, EventKind kind, json payload, std::int64_t t_ms) {
    Event e{s.state.empty() ? std::string{} : s.state.session_id, s.state.next_seq, kind, std::move(payload), t_ms};
    if (e.session_id.empty()) e.session_id = s.state.session_id;
    SessionState next = apply_event(s.state, e);
    {
        std::lock_guard lock(log_mutex_);
        if (log_.is_open()) {
            log_ << serialize(e) << '\n';
            log_.flush();
        }
        ++since_snapshot_;
    }
    s.events.push_back(std::move(e));
    s.state = std::move(next);
    if (s.state.terminal() && is_terminal(kind)) on_terminal(s.state);
}

void GameService::on_terminal(const SessionState& state) {
    std::lock_guard lock(board_mutex_);
    auto& entry = board_[state.player_id];
    entry.player_id = state.player_id;
    entry.total_score += state.score ? state.score->total : 0;
    if (state.session->status == SessionStatus::answered) {
        ++entry.questions_answered;
        if (state.verdict && state.verdict->correct) ++entry.correct;
    }
}

bool GameService::expire_if_due(Slot& s, std::int64_t t_ms, bool terminal_request) {
    if (!s.state.active()) return false;
    auto limit = deadline_ms(*s.state.session) + (terminal_request ? config_.grace_ms : 0);
    if (t_ms <= limit) return false;
    append(s, EventKind::timed_out, json::object(), t_ms);
    return true;
}

void GameService::require_active(Slot& s, std::int64_t t_ms, bool terminal_request) {
    if (expire_if_due(s, t_ms, terminal_request)) throw ServiceError(409, "time expired");
    if (!s.state.active()) throw ServiceError(409, "session is not active");
}

std::optional<std::size_t> GameService::next_question_for(const std::string& player_id) {
    std::lock_guard lock(assign_mutex_);
    auto it = remaining_.find(player_id);
    if (it == remaining_.end()) {
        std::vector<std::size_t> all(pool_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        it = remaining_.emplace(player_id, std::move(all)).first;
    }
    auto& left = it->second;
    if (left.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, left.size() - 1);
    auto pos = pick(rng_);
    auto chosen = left[pos];
    left[pos] = left.back();
    left.pop_back();
    return chosen;
}

CreatedSession GameService::create_session(const std::string& player_id) {
    if (player_id.empty()) throw ServiceError(422, "player_id is required");
    auto q = next_question_for(player_id);
    if (!q) throw ServiceError(409, "no questions left for player " + player_id);

    std::string id;
    Slot* s = nullptr;
    {
        std::unique_lock lock(sessions_mutex_);
        id = session_name(next_session_number_++);
        auto slot_ptr = std::make_unique<Slot>();
        slot_ptr->state.session_id = id;
        s = slot_ptr.get();
        sessions_.emplace(id, std::move(slot_ptr));
    }
    std::lock_guard lock(s->mutex);
    auto t = now();
    append(*s, EventKind::session_created, {{"player_id", player_id}}, t);
    append(*s, EventKind::question_assigned, {{"question", to_json(pool_[*q])}}, t);
    const auto& question = s->state.session->question;
    return {id, question.question_id, question.clues.front(), question.timer_total()};
}

std::string GameService::reveal_clue(const std::string& session_id) {
    auto& s = slot(session_id);
    std::string clue;
    {
        std::lock_guard lock(s.mutex);
        require_active(s, now(), false);
        const auto& sess = *s.state.session;
        if (sess.question.source != QuestionSource::qb) throw ServiceError(409, "clues only apply to qb questions");
        if (sess.clues_revealed >= sess.question.clues.size()) throw ServiceError(409, "no clues left");
        clue = sess.question.clues[sess.clues_revealed];
        append(s, EventKind::clue_revealed, {{"clue", clue}}, now());
    }
    return clue;
}

std::vector<SearchHit> GameService::search(const std::string& session_id, Engine engine, const std::string& query,
                                           std::size_t k, QueryOrigin origin) {
    if (k < 1 || k > config_.max_k) throw ServiceError(422, "k must be in [1, " + std::to_string(config_.max_k) + "]");
    if (query.find_first_not_of(" \t\r\n") == std::string::npos) throw ServiceError(422, "query is empty");
    auto& s = slot(session_id);
    {
        std::lock_guard lock(s.mutex);
        auto t = now();
        require_active(s, t, false);
        append(s, EventKind::query_issued,
               {{"text", query}, {"engine", to_string(engine)}, {"origin", to_string(origin)}}, t);
    }
    if (since_snapshot_due()) snapshot();
    return engines_.search(engine, query, k);
}

PageView GameService::page(const std::string& page_id, const std::optional<std::string>& highlight) const {
    const auto& corpus = engines_.corpus();
    const auto* page = corpus.find_page(page_id);
    if (!page) throw ServiceError(404, "unknown page " + page_id);
    PageView view;
    view.page_id = page->page_id;
    view.title = page->title;
    for (std::size_t i = 0; i < page->paragraphs.size(); ++i) {
        view.paragraphs.push_back(corpus.get_paragraph(page->paragraphs[i]).text);
        if (highlight && page->paragraphs[i] == *highlight) view.highlight_index = i;
    }
    if (highlight && !view.highlight_index) throw ServiceError(404, "paragraph " + *highlight + " not on page");
    return view;
}

void GameService::record_evidence(const std::string& session_id, const std::string& paragraph_id,
                                  std::optional<TokenSpan> span, EvidenceKind kind) {
    const auto* para = engines_.corpus().find_paragraph(paragraph_id);
    if (!para) throw ServiceError(404, "unknown paragraph " + paragraph_id);
    if (span && (span->start > span->end || span->end > para->text.size())) {
        throw ServiceError(422, "span outside paragraph text");
    }
    if (kind == EvidenceKind::auto_read) span.reset();
    auto& s = slot(session_id);
    {
        std::lock_guard lock(s.mutex);
        auto t = now();
        require_active(s, t, false);
        const auto& path = s.state.session->path;
        if (path.queries.empty()) throw ServiceError(409, "evidence requires a prior query");
        const auto& set = path.evidence_sets.back();
        bool dup = std::any_of(set.begin(), set.end(), [&](const EvidenceRecord& e) {
            return e.paragraph_id == paragraph_id && e.kind == kind && e.span == span;
        });
        if (dup) return;
        json payload{{"paragraph_id", paragraph_id}};
        if (kind == EvidenceKind::manual) {
            payload["span"] = span ? json::array({span->start, span->end}) : json(nullptr);
        }
        append(s, kind == EvidenceKind::manual ? EventKind::evidence_recorded : EventKind::result_clicked,
               std::move(payload), t);
    }
    if (since_snapshot_due()) snapshot();
}

SuggestionSet GameService::suggestions(const std::string& session_id) {
    auto& s = slot(session_id);
    Session sess;
    {
        std::lock_guard lock(s.mutex);
        require_active(s, now(), false);
        sess = *s.state.session;
    }
    const auto& corpus = engines_.corpus();
    auto r = reasoning_path_for(sess, corpus);
    SuggestionSet out;
    if (auto g = suggest_golden(r, engines_.sparse())) out.golden = g->text;
    if (auto i = suggest_irrr(r, engines_.sparse())) out.irrr = i->text;
    std::string current = sess.path.queries.empty() ? std::string{} : sess.path.queries.back().text;
    if (auto a = suggest_answer(r, engines_.sparse(), corpus, current)) out.answer = a->text;

    ShownRecord rec{session_id, sess.path.queries.size(), out.golden, out.irrr};
    std::lock_guard lock(log_mutex_);
    if (suggestions_out_.is_open()) {
        json j{{"session_id", rec.session_id},
               {"query_index", rec.query_index},
               {"golden", rec.golden ? json(*rec.golden) : json(nullptr)},
               {"irrr", rec.irrr ? json(*rec.irrr) : json(nullptr)}};
        suggestions_out_ << j.dump() << '\n';
        suggestions_out_.flush();
    }
    shown_.push_back(std::move(rec));
    return out;
}

AnswerResult GameService::answer(const std::string& session_id, const std::string& text) {
    auto& s = slot(session_id);
    AnswerResult result;
    {
        std::lock_guard lock(s.mutex);
        auto t = now();
        require_active(s, t, true);
        append(s, EventKind::answer_submitted, {{"text", text}}, t);
        result = {*s.state.verdict, *s.state.score};
    }
    if (since_snapshot_due()) snapshot();
    return result;
}

ScoreBreakdown GameService::skip(const std::string& session_id) {
    auto& s = slot(session_id);
    ScoreBreakdown result;
    {
        std::lock_guard lock(s.mutex);
        auto t = now();
        require_active(s, t, true);
        append(s, EventKind::question_skipped, json::object(), t);
        result = *s.state.score;
    }
    if (since_snapshot_due()) snapshot();
    return result;
}

std::vector<LeaderboardEntry> GameService::leaderboard(std::size_t n) const {
    if (n < 1) throw ServiceError(422, "n must be at least 1");
    std::vector<LeaderboardEntry> entries;
    {
        std::lock_guard lock(board_mutex_);
        for (const auto& [player, entry] : board_) entries.push_back(entry);
    }
    std::sort(entries.begin(), entries.end(), leaderboard_before);
    if (entries.size() > n) entries.resize(n);
    return entries;
}

std::vector<ActionPath> GameService::export_paths(const std::optional<std::string>& player) const {
    std::vector<ActionPath> out;
    for (const auto& id : session_ids()) {
        auto events = session_events(id);
        auto state = replay(events);
        if (!state.terminal()) continue;
        if (player && state.player_id != *player) continue;
        out.push_back(state.session->path);
    }
    return out;
}

std::vector<ShownSuggestions> GameService::export_suggestions(const std::optional<std::string>& player) const {
    std::map<std::string, std::size_t> ordinal;
    for (const auto& id : session_ids()) {
        auto st = live_state(id);
        if (!st.terminal()) continue;
        if (player && st.player_id != *player) continue;
        ordinal.emplace(id, ordinal.size());
    }
    std::vector<ShownSuggestions> out;
    std::lock_guard lock(log_mutex_);
    for (const auto& rec : shown_) {
        auto it = ordinal.find(rec.session_id);
        if (it == ordinal.end()) continue;
        out.push_back({it->second, rec.query_index, rec.golden, rec.irrr});
    }
    return out;
}

SessionState GameService::live_state(const std::string& session_id) const {
    auto& s = slot(session_id);
    std::lock_guard lock(s.mutex);
    return s.state;
}

std::vector<Event> GameService::session_events(const std::string& session_id) const {
    auto& s = slot(session_id);
    std::lock_guard lock(s.mutex);
    return s.events;
}

std::vector<std::string> GameService::session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> ids;
    ids.reserve(sessions_.size());
    for (const auto& [id, slot] : sessions_) ids.push_back(id);
    return ids;
}

bool GameService::since_snapshot_due() const {
    if (config_.data_dir.empty() || config_.snapshot_every == 0) return false;
    std::lock_guard lock(log_mutex_);
    return since_snapshot_ >= config_.snapshot_every;
}

void GameService::snapshot() {
    if (config_.data_dir.empty()) return;
    json sessions = json::array();
    for (const auto& id : session_ids()) sessions.push_back(to_json(live_state(id)));
    auto tmp = config_.data_dir / (std::string(kSnapshotFile) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << json{{"sessions", std::move(sessions)}}.dump() << '\n';
    }
    std::filesystem::rename(tmp, config_.data_dir / kSnapshotFile);
    std::lock_guard lock(log_mutex_);
    since_snapshot_ = 0;
}

void GameService::recover() {
    std::map<std::string, SessionState> from_snapshot;
    if (std::ifstream snap(config_.data_dir / kSnapshotFile); snap) {
        json j;
        try {
            snap >> j;
            for (const auto& st : j.at("sessions")) {
                auto state = session_state_from_json(st);
                from_snapshot.emplace(state.session_id, std::move(state));
            }
        } catch (const std::exception& e) {
            throw LoadError(std::string("corrupt snapshot: ") + e.what());
        }
    }

    if (std::ifstream in(config_.data_dir / kEventsFile); in) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            Event e;
            try {
                e = parse_event(line);
            } catch (const ParseError& err) {
                throw LoadError(err.what(), line_no);
            }
            auto& ptr = sessions_[e.session_id];
            if (!ptr) {
                ptr = std::make_unique<Slot>();
                if (auto it = from_snapshot.find(e.session_id); it != from_snapshot.end()) ptr->state = it->second;
            }
            // Events the snapshot already covers are kept for replay but not re-applied.
            if (e.seq >= ptr->state.next_seq) ptr->state = apply_event(std::move(ptr->state), e);
            ptr->events.push_back(std::move(e));
        }
    }

    for (const auto& [id, slot_ptr] : sessions_) {
        const auto& st = slot_ptr->state;
        if (id.size() > 1 && id[0] == 's') {
            next_session_number_ = std::max<std::uint64_t>(next_session_number_, std::stoull(id.substr(1)) + 1);
        }
        if (st.terminal()) on_terminal(st);
    }
    // Rebuild per-player unassigned pools.
    std::map<std::string, std::vector<std::size_t>> pools;
    for (const auto& [id, slot_ptr] : sessions_) {
        const auto& st = slot_ptr->state;
        if (!st.session) continue;
        auto [it, fresh] = pools.try_emplace(st.player_id);
        if (fresh) {
            for (std::size_t i = 0; i < pool_.size(); ++i) it->second.push_back(i);
        }
        auto& left = it->second;
        left.erase(std::remove_if(left.begin(), left.end(),
                                  [&](std::size_t i) { return pool_[i].question_id == st.session->question.question_id; }),
                   left.end());
    }
    remaining_ = std::move(pools);

    if (std::ifstream in(config_.data_dir / kSuggestionsFile); in) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                auto j = json::parse(line);
                ShownRecord rec;
                rec.session_id = j.at("session_id").get<std::string>();
                rec.query_index = j.at("query_index").get<std::size_t>();
                if (!j.at("golden").is_null()) rec.golden = j.at("golden").get<std::string>();
                if (!j.at("irrr").is_null()) rec.irrr = j.at("irrr").get<std::string>();
                shown_.push_back(std::move(rec));
            } catch (const json::exception&) {
                // A torn final line from a crash; the event log is authoritative.
            }
        }
    }
}

}  // namespace qagame
