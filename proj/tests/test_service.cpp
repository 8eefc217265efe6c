#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "qagame/errors.hpp"
#include "qagame/service.hpp"

using namespace qagame;

namespace {

struct Clock {
    std::atomic<std::int64_t> now{1'000'000};
    std::function<std::int64_t()> fn() {
        return [this] { return now.load(); };
    }
};

struct World {
    Corpus corpus = fixtures::millennium_corpus();
    SearchEngines engines = SearchEngines::build(corpus);
};

const World& world() {
    static const World w;
    return w;
}

GameQuestion hotpot_question() {
    return {"hp_guru", QuestionSource::hotpot, {"Which country was the guru's father from?"}, "India", {}};
}

int status_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ServiceError& e) {
        return e.status();
    }
    return 0;
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("qagame_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE("events") {

TEST_CASE("Millennium example events replay to the finalized path") {
    auto state = replay(fixtures::millennium_events());
    REQUIRE(state.session);
    CHECK(state.session->status == SessionStatus::answered);
    CHECK(state.session->path == fixtures::millennium_path());
    CHECK(state.verdict->correct);
    CHECK(state.next_seq == 7);
    CHECK(state.score == ScoreBreakdown{5, 75, 0, 20, 100});
}

TEST_CASE("replay edge cases") {
    CHECK(replay({}).empty());
    auto events = fixtures::millennium_events();
    events.pop_back();
    auto partial = replay(events);
    CHECK(partial.active());
    CHECK_FALSE(partial.score);
}

TEST_CASE("apply_event errors") {
    auto events = fixtures::millennium_events();
    auto state = replay(std::span(events).first(3));
    CHECK_THROWS_AS(apply_event(state, events[4]), ConflictError);

    auto done = replay(events);
    auto again = events.back();
    again.seq = done.next_seq;
    CHECK_THROWS_AS(apply_event(done, again), StateError);

    Event bad{"s00000001", 0, EventKind::session_created, nlohmann::json::object(), 0};
    CHECK_THROWS_AS(apply_event({}, bad), ParseError);

    Event early{"s00000001", 2, EventKind::query_issued, {{"text", "x"}, {"engine", "sparse"}, {"origin", "typed"}}, 0};
    auto created = replay(std::span(events).first(1));
    created.next_seq = 2;
    CHECK_THROWS_AS(apply_event(created, early), StateError);

    Event other = events[1];
    other.session_id = "s00000002";
    CHECK_THROWS_AS(apply_event(replay(std::span(events).first(1)), other), ConflictError);
}

TEST_CASE("event lines round-trip and corrupt lines report their seq") {
    std::ostringstream log;
    for (const auto& e : fixtures::millennium_events()) {
        CHECK(parse_event(serialize(e)) == e);
        log << serialize(e) << '\n';
    }
    std::istringstream in(log.str());
    auto states = replay_log(in);
    REQUIRE(states.size() == 1);
    CHECK(states.at("s00000001") == replay(fixtures::millennium_events()));

    try {
        parse_event(R"({"session_id":"s1","seq":4,"kind":"teleported","t_ms":0,"payload":{}})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("seq 4") != std::string::npos);
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(parse_event("{\"session_id\""), ParseError);
}

TEST_CASE("session state json round-trips") {
    auto state = replay(fixtures::millennium_events());
    CHECK(session_state_from_json(to_json(state)) == state);
    auto events = fixtures::millennium_events();
    auto partial = replay(std::span(events).first(4));
    CHECK(session_state_from_json(to_json(partial)) == partial);
}

}  // TEST_SUITE

TEST_SUITE("service") {

TEST_CASE("Millennium example through the service") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {fixtures::millennium_question()}, cfg);

    auto created = svc.create_session("p1");
    CHECK(created.session_id == "s00000001");
    CHECK(created.question_id == "qb_millennium");
    CHECK(created.clue == fixtures::millennium_question().clues[0]);
    CHECK(created.timer_total == 240);

    clock.now += 5'000;
    auto hits = svc.search(created.session_id, Engine::sparse, "Millennium '73", 10);
    REQUIRE_FALSE(hits.empty());
    CHECK(hits[0].page_id == "Millennium_73");
    clock.now += 15'000;
    svc.record_evidence(created.session_id, fixtures::kD1, std::nullopt, EvidenceKind::manual);
    clock.now += 10'000;
    svc.search(created.session_id, Engine::sparse, "Prem Rawat", 10, QueryOrigin::highlight_shortcut);
    clock.now += 15'000;
    svc.record_evidence(created.session_id, fixtures::kD2, std::nullopt, EvidenceKind::manual);
    clock.now += 15'000;
    auto result = svc.answer(created.session_id, "India");
    CHECK(result.verdict.correct);
    CHECK(result.score == ScoreBreakdown{5, 75, 0, 20, 100});

    auto live = svc.live_state(created.session_id);
    CHECK(replay(svc.session_events(created.session_id)) == live);
    CHECK(live.session->path == fixtures::millennium_path());
    auto exported = svc.export_paths();
    REQUIRE(exported.size() == 1);
    CHECK(exported[0] == fixtures::millennium_path());
    CHECK(svc.session_events(created.session_id) == fixtures::millennium_events(created.session_id, 1'000'000));

    CHECK(status_of([&] { svc.answer(created.session_id, "India"); }) == 409);
    CHECK(status_of([&] { svc.skip(created.session_id); }) == 409);
}

TEST_CASE("request validation") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {fixtures::millennium_question(), hotpot_question()}, cfg);
    auto a = svc.create_session("p");
    auto b = svc.create_session("p");
    const auto& hp = a.question_id == "hp_guru" ? a : b;
    const auto& qb = a.question_id == "hp_guru" ? b : a;
    CHECK(hp.timer_total == 180);

    CHECK(status_of([&] { svc.create_session("p"); }) == 409);
    CHECK(status_of([&] { svc.create_session(""); }) == 422);
    CHECK(status_of([&] { svc.reveal_clue(hp.session_id); }) == 409);
    CHECK(svc.reveal_clue(qb.session_id) == "This country's capital is New Delhi.");
    CHECK(status_of([&] { svc.reveal_clue(qb.session_id); }) == 409);
    CHECK(status_of([&] { svc.search("s99999999", Engine::sparse, "x", 10); }) == 404);
    CHECK(status_of([&] { svc.search(qb.session_id, Engine::sparse, "x", 0); }) == 422);
    CHECK(status_of([&] { svc.search(qb.session_id, Engine::sparse, "x", 101); }) == 422);
    CHECK(status_of([&] { svc.search(qb.session_id, Engine::sparse, "  ", 5); }) == 422);
    CHECK(status_of([&] { svc.record_evidence(qb.session_id, "India#0", std::nullopt, EvidenceKind::manual); }) ==
          409);
    svc.search(qb.session_id, Engine::dense, "India", 5);
    CHECK(status_of([&] { svc.record_evidence(qb.session_id, "Nope#0", std::nullopt, EvidenceKind::manual); }) ==
          404);
    CHECK(status_of([&] {
              svc.record_evidence(qb.session_id, "India#1", TokenSpan{0, 999}, EvidenceKind::manual);
          }) == 422);
    svc.record_evidence(qb.session_id, "India#1", TokenSpan{0, 9}, EvidenceKind::manual);
    auto before = svc.session_events(qb.session_id).size();
    svc.record_evidence(qb.session_id, "India#1", TokenSpan{0, 9}, EvidenceKind::manual);
    CHECK(svc.session_events(qb.session_id).size() == before);
    svc.record_evidence(qb.session_id, "India#1", TokenSpan{0, 9}, EvidenceKind::auto_read);
    auto events = svc.session_events(qb.session_id);
    CHECK(events.back().kind == EventKind::result_clicked);
    CHECK_FALSE(events.back().payload.contains("span"));

    CHECK(status_of([&] { svc.page("Nope", std::nullopt); }) == 404);
    CHECK(status_of([&] { svc.page("India", "Prem_Rawat#0"); }) == 404);
    auto view = svc.page("India", "India#1");
    CHECK(view.title == "India");
    CHECK(view.paragraphs.size() == 2);
    CHECK(view.highlight_index == 1);
    CHECK_FALSE(svc.page("India", std::nullopt).highlight_index);
}

TEST_CASE("lazy timeout with a grace window on terminal requests") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {hotpot_question(), fixtures::millennium_question()}, cfg);
    auto a = svc.create_session("p1");
    auto b = svc.create_session("p2");

    clock.now += 181'000;
    CHECK(svc.answer(a.session_id, "India").verdict.correct);
    CHECK(svc.live_state(a.session_id).session->status == SessionStatus::answered);

    clock.now += 300'000;
    CHECK(status_of([&] { svc.search(b.session_id, Engine::sparse, "guru", 5); }) == 409);
    auto st = svc.live_state(b.session_id);
    CHECK(st.session->status == SessionStatus::timed_out);
    CHECK(st.session->path.answer == "");
    CHECK(st.score->participation == 0);
    CHECK(svc.session_events(b.session_id).back().kind == EventKind::timed_out);
    CHECK(status_of([&] { svc.answer(b.session_id, "India"); }) == 409);
    CHECK(replay(svc.session_events(b.session_id)) == st);
}

TEST_CASE("answers after the grace window time out") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {hotpot_question()}, cfg);
    auto a = svc.create_session("p1");
    clock.now += 182'001;
    CHECK(status_of([&] { svc.answer(a.session_id, "India"); }) == 409);
    CHECK(svc.live_state(a.session_id).session->status == SessionStatus::timed_out);
}

TEST_CASE("skip scores zero participation") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {fixtures::millennium_question()}, cfg);
    auto a = svc.create_session("p1");
    CHECK(svc.skip(a.session_id) == ScoreBreakdown{0, 0, 0, 0, 0});
    auto exported = svc.export_paths();
    REQUIRE(exported.size() == 1);
    CHECK(exported[0].answer == "");
    CHECK(exported[0].correct == false);
}

TEST_CASE("leaderboard") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {fixtures::millennium_question()}, cfg);
    auto hi = svc.create_session("fast");
    CHECK(svc.answer(hi.session_id, "India").score.total == 105);
    auto lo = svc.create_session("slow");
    svc.search(lo.session_id, Engine::sparse, "guru", 3);
    svc.record_evidence(lo.session_id, fixtures::kD2, std::nullopt, EvidenceKind::manual);
    CHECK(svc.answer(lo.session_id, "Nepal").score.total == 15);

    auto board = svc.leaderboard(10);
    REQUIRE(board.size() == 2);
    CHECK(board[0] == LeaderboardEntry{"fast", 105, 1, 1});
    CHECK(board[1] == LeaderboardEntry{"slow", 15, 1, 0});
    CHECK(svc.leaderboard(1).size() == 1);
    CHECK(status_of([&] { svc.leaderboard(0); }) == 422);

    std::vector<LeaderboardEntry> tie{{"b", 50, 2, 1}, {"c", 50, 2, 2}, {"a", 50, 2, 1}};
    std::sort(tie.begin(), tie.end(), leaderboard_before);
    CHECK(tie[0].player_id == "c");
    CHECK(tie[1].player_id == "a");
    CHECK(tie[2].player_id == "b");
}

TEST_CASE("suggestions are served and logged against the export") {
    Clock clock;
    ServiceConfig cfg;
    cfg.clock = clock.fn();
    GameService svc(world().engines, {fixtures::millennium_question()}, cfg);
    auto a = svc.create_session("p1");
    auto first = svc.suggestions(a.session_id);
    REQUIRE(first.golden);
    REQUIRE(first.irrr);
    CHECK(fixtures::millennium_question().clues[0].find(*first.golden) != std::string::npos);
    svc.search(a.session_id, Engine::sparse, *first.golden, 5, QueryOrigin::suggestion_golden);
    svc.record_evidence(a.session_id, fixtures::kD1, std::nullopt, EvidenceKind::auto_read);
    auto second = svc.suggestions(a.session_id);
    REQUIRE(second.answer);
    svc.answer(a.session_id, "India");

    auto log = svc.export_suggestions();
    REQUIRE(log.size() == 2);
    CHECK(log[0] == ShownSuggestions{0, 0, first.golden, first.irrr});
    CHECK(log[1].query_index == 1);
    CHECK(svc.export_suggestions("someone else").empty());
}

TEST_CASE("persistence: restart recovers sessions from the log and snapshot") {
    auto dir = fresh_dir("persist");
    Clock clock;
    std::vector<SessionState> before;
    std::vector<std::string> ids;
    {
        ServiceConfig cfg;
        cfg.clock = clock.fn();
        cfg.data_dir = dir;
        cfg.snapshot_every = 7;
        GameService svc(world().engines, {fixtures::millennium_question(), hotpot_question()}, cfg);
        for (int i = 0; i < 4; ++i) {
            auto s = svc.create_session("p" + std::to_string(i % 2));
            ids.push_back(s.session_id);
            svc.search(s.session_id, Engine::sparse, "guru", 3);
            svc.record_evidence(s.session_id, fixtures::kD1, std::nullopt, EvidenceKind::manual);
            svc.suggestions(s.session_id);
            if (i < 3) svc.answer(s.session_id, i % 2 ? "India" : "Nepal");
        }
        for (const auto& id : ids) before.push_back(svc.live_state(id));
    }
    CHECK(std::filesystem::exists(dir / "snapshot.json"));
    CHECK(std::filesystem::exists(dir / "events.jsonl"));

    ServiceConfig cfg;
    cfg.clock = clock.fn();
    cfg.data_dir = dir;
    GameService svc(world().engines, {fixtures::millennium_question(), hotpot_question()}, cfg);
    CHECK(svc.session_ids() == ids);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        CHECK(svc.live_state(ids[i]) == before[i]);
        CHECK(replay(svc.session_events(ids[i])) == before[i]);
    }
    CHECK(svc.export_suggestions().size() == 3);
    // Both players have seen both questions.
    CHECK(status_of([&] { svc.create_session("p0"); }) == 409);
    CHECK(status_of([&] { svc.create_session("p1"); }) == 409);
    auto next = svc.create_session("p2");
    CHECK(next.session_id == "s00000005");
    svc.answer(ids[3], "India");
    CHECK(svc.leaderboard(5).size() == 2);
    CHECK(svc.live_state(next.session_id).active());
    std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt log lines fail recovery with the line number") {
    auto dir = fresh_dir("corrupt");
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "events.jsonl");
        for (const auto& e : fixtures::millennium_events()) out << serialize(e) << '\n';
        out << "{not json\n";
    }
    ServiceConfig cfg;
    cfg.data_dir = dir;
    try {
        GameService svc(world().engines, {fixtures::millennium_question()}, cfg);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(e.line() == 8);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent sessions stay consistent") {
    ServiceConfig cfg;
    std::vector<GameQuestion> pool;
    for (int i = 0; i < 8; ++i) {
        auto q = fixtures::millennium_question();
        q.question_id += std::to_string(i);
        pool.push_back(q);
    }
    GameService svc(world().engines, pool, cfg);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 8; ++i) {
                auto s = svc.create_session("player" + std::to_string(t));
                svc.search(s.session_id, Engine::sparse, "Prem Rawat", 5);
                svc.record_evidence(s.session_id, fixtures::kD2, std::nullopt, EvidenceKind::manual);
                svc.answer(s.session_id, "India");
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(svc.session_ids().size() == 32);
    for (const auto& id : svc.session_ids()) CHECK(replay(svc.session_events(id)) == svc.live_state(id));
    auto board = svc.leaderboard(10);
    REQUIRE(board.size() == 4);
    for (const auto& e : board) CHECK(e.questions_answered == 8);
}

}  // TEST_SUITE
