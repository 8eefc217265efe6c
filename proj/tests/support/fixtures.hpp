#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qagame/action_path.hpp"
#include "qagame/corpus.hpp"
#include "qagame/events.hpp"
#include "qagame/game.hpp"
#include "qagame/retrieval.hpp"
#include "qagame/text.hpp"

namespace fixtures {

using namespace qagame;

inline constexpr const char* kD1 = "Millennium_73#1";
inline constexpr const char* kD2 = "Prem_Rawat#0";

inline Corpus millennium_corpus() {
    return Corpus::from_pages({
        {"Millennium_73",
         "Millennium '73",
         {"Millennium '73 was a festival held at the Houston Astrodome in November 1973.",
          "It featured Prem Rawat, then known as Guru Maharaj Ji, a 15-year-old guru and the leader of a "
          "fast-growing new religious movement.",
          "Organizers predicted that the Astrodome would levitate during the event."},
         {{"Prem Rawat", "Prem_Rawat"}}},
        {"Prem_Rawat",
         "Prem Rawat",
         {"Prem Pal Singh Rawat is the youngest son of Hans Ram Singh Rawat, an Indian guru.",
          "He became a spiritual teacher at the age of eight and later moved to the United States."},
         {{"India", "India"}}},
        {"India",
         "India",
         {"India is a country in South Asia and the most populous democracy in the world.",
          "New Delhi is the capital of India."},
         {}},
        {"Astrodome", "Astrodome", {"The Astrodome is a domed stadium in Houston, Texas, opened in 1965."}, {}},
    });
}

inline GameQuestion millennium_question() {
    return {"qb_millennium",
            QuestionSource::qb,
            {"A 15-year-old religious leader originally from this country spoke at a highly anticipated event at "
             "which it was predicted that the Astrodome would levitate; that event was Millennium '73.",
             "This country's capital is New Delhi."},
            "India",
            {"Republic of India"}};
}

// created, assigned, then the five actions: q0, record d1, q1 from a
// highlight, record d2, answer.
inline std::vector<Event> millennium_events(const std::string& sid = "s00000001", std::int64_t t0 = 1'000'000) {
    using nlohmann::json;
    std::vector<Event> ev;
    auto push = [&](EventKind kind, json payload, std::int64_t dt) {
        ev.push_back({sid, ev.size(), kind, std::move(payload), t0 + dt});
    };
    push(EventKind::session_created, {{"player_id", "p1"}}, 0);
    push(EventKind::question_assigned, {{"question", to_json(millennium_question())}}, 0);
    push(EventKind::query_issued, {{"text", "Millennium '73"}, {"engine", "sparse"}, {"origin", "typed"}}, 5'000);
    push(EventKind::evidence_recorded, {{"paragraph_id", kD1}, {"span", nullptr}}, 20'000);
    push(EventKind::query_issued, {{"text", "Prem Rawat"}, {"engine", "sparse"}, {"origin", "highlight_shortcut"}},
         30'000);
    push(EventKind::evidence_recorded, {{"paragraph_id", kD2}, {"span", nullptr}}, 45'000);
    push(EventKind::answer_submitted, {{"text", "India"}}, 60'000);
    return ev;
}

inline ActionPath millennium_path() {
    ActionPath p;
    p.question_id = "qb_millennium";
    p.question_text = millennium_question().clues[0];
    append_query(p, {"Millennium '73", Engine::sparse, 0, QueryOrigin::typed, 5'000});
    record_evidence(p, {kD1, EvidenceKind::manual, std::nullopt, 0});
    append_query(p, {"Prem Rawat", Engine::sparse, 0, QueryOrigin::highlight_shortcut, 30'000});
    record_evidence(p, {kD2, EvidenceKind::manual, std::nullopt, 1});
    finalize(p, "India", true);
    return p;
}

inline Corpus balkans_corpus() {
    return Corpus::from_pages({
        {"Knez",
         "Knez",
         {"Knez is a Slavic title for a local chieftain; the Russian form is knyaz.",
          "A knyaz ruled a principality in medieval Eastern Europe."},
         {}},
        {"Knyaz", "Knyaz", {"Knyaz is a historical Slavic title usually translated as prince or duke."}, {}},
        {"Serbia",
         "Serbia",
         {"Serbia is a landlocked country in the central Balkans.",
          "In 1804 the renegade Janissaries known as the dahije massacred the Serbian elite, which started the "
          "First Serbian Uprising."},
         {}},
        {"Ottoman_Empire", "Ottoman Empire", {"The Ottoman Empire controlled much of the Balkans for centuries."}, {}},
    });
}

/// "knez" finds the Knez page, which mentions knyaz; "Knyaz" follows from
/// it; "dahije" is unrelated to both.
inline ActionPath knez_path() {
    ActionPath p;
    p.question_id = "qb_serbia";
    p.question_text = "This modern-day country's elite, known as knez, were massacred in 1804.";
    append_query(p, {"knez", Engine::sparse, 0, QueryOrigin::typed, 1'000});
    record_evidence(p, {"Knez#0", EvidenceKind::auto_read, std::nullopt, 0});
    append_query(p, {"Knyaz", Engine::sparse, 0, QueryOrigin::typed, 9'000});
    record_evidence(p, {"Knyaz#0", EvidenceKind::auto_read, std::nullopt, 1});
    append_query(p, {"dahije", Engine::sparse, 0, QueryOrigin::typed, 20'000});
    finalize(p, "Serbia", true);
    return p;
}

inline Corpus germanium_corpus() {
    return Corpus::from_pages({
        {"Germanium",
         "Germanium",
         {"Germanium is a chemical element that was discovered in 1886 by Clemens Winkler.",
          "Germanium dioxide is used in glass with a high index of refraction and in infrared optics."},
         {}},
        {"Copper", "Copper", {"Copper is a chemical element with symbol Cu.", "Copper is used in wire."}, {}},
        {"Glass", "Glass", {"Glass is an amorphous solid used in windows.", "Optical glass is used in lenses."}, {}},
        {"Element", "Chemical element", {"A chemical element is a species of atom.", "An element was discovered."}, {}},
        {"Year_1886", "1886", {"In 1886 many things happened in this year."}, {}},
    });
}

/// A terminal session for scoring: `manual` manual records plus `auto_read`
/// auto-read ones, answered (or skipped when answer is nullopt).
inline Session scored_session(QuestionSource source, std::size_t clues_revealed, std::size_t manual,
                              std::size_t auto_read, std::optional<bool> correct, std::int64_t started_at_ms = 0) {
    GameQuestion q{"q", source, {"first clue"}, "India", {}};
    if (source == QuestionSource::qb) q.clues.push_back("second clue");
    auto s = start_session("s", "p", q, started_at_ms);
    s.clues_revealed = clues_revealed;
    append_query(s.path, {"india", Engine::sparse, 0, QueryOrigin::typed, 0});
    for (std::size_t i = 0; i < manual; ++i) {
        record_evidence(s.path, {"P#" + std::to_string(i), EvidenceKind::manual, std::nullopt, 0});
    }
    for (std::size_t i = 0; i < auto_read; ++i) {
        record_evidence(s.path, {"A#" + std::to_string(i), EvidenceKind::auto_read, std::nullopt, 0});
    }
    if (correct) {
        s.status = SessionStatus::answered;
        finalize(s.path, *correct ? "India" : "Canada", *correct);
    } else {
        s.status = SessionStatus::skipped;
        finalize(s.path, "", false);
    }
    return s;
}

// Random material for property tests.

inline std::vector<std::string> vocabulary(std::size_t n, std::uint64_t seed) {
    static const char* syl[] = {"ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "pa", "qu", "da", "fe", "go"};
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    std::set<std::string> seen;
    while (out.size() < n) {
        std::string w;
        auto len = 2 + rng() % 3;
        for (std::size_t i = 0; i < len; ++i) w += syl[rng() % std::size(syl)];
        if (seen.insert(w).second) out.push_back(w);
    }
    return out;
}

inline std::string random_text(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t min_words,
                               std::size_t max_words) {
    static const char* fill[] = {"the", "of", "and", "in", "a", "is", "was", "by"};
    std::size_t n = min_words + rng() % (max_words - min_words + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        if (rng() % 4 == 0) {
            s += fill[rng() % std::size(fill)];
        } else {
            // Skewed toward the head of the vocabulary so terms repeat.
            auto r = rng() % vocab.size();
            s += vocab[(r * r) / vocab.size()];
        }
        if (rng() % 11 == 0) s += ',';
    }
    return s;
}

inline Corpus random_corpus(std::size_t paragraphs, std::uint64_t seed, std::size_t vocab_size = 800) {
    std::mt19937_64 rng(seed);
    auto vocab = vocabulary(vocab_size, seed ^ 0xabcdefULL);
    std::vector<PageRecord> pages;
    std::size_t made = 0;
    while (made < paragraphs) {
        PageRecord p;
        p.page_id = "P" + std::to_string(pages.size());
        p.title = vocab[pages.size() % vocab.size()];
        std::size_t n = std::min<std::size_t>(1 + rng() % 5, paragraphs - made);
        for (std::size_t i = 0; i < n; ++i) p.paragraphs.push_back(random_text(rng, vocab, 3, 40));
        made += n;
        pages.push_back(std::move(p));
    }
    return Corpus::from_pages(std::move(pages));
}

/// A finalized random path whose evidence is drawn from the corpus and whose
/// queries mix question words, evidence words and fresh words.
inline ActionPath random_path(std::mt19937_64& rng, const Corpus& corpus, const std::string& question_id,
                              std::size_t max_queries = 6) {
    auto paras = corpus.paragraphs();
    ActionPath p;
    p.question_id = question_id;
    p.question_text = paras[rng() % paras.size()].text;
    std::size_t nq = rng() % (max_queries + 1);
    std::string last_evidence = p.question_text;
    for (std::size_t i = 0; i < nq; ++i) {
        auto words = tokenize_terms(rng() % 2 ? last_evidence : paras[rng() % paras.size()].text);
        std::string q;
        std::size_t len = 1 + rng() % 4;
        for (std::size_t w = 0; w < len && !words.empty(); ++w) {
            if (!q.empty()) q += ' ';
            q += words[rng() % words.size()];
        }
        if (q.empty()) q = "zzz" + std::to_string(i);
        auto engine = rng() % 8 == 0 ? Engine::dense : Engine::sparse;
        auto origin = static_cast<QueryOrigin>(rng() % 4);
        append_query(p, {q, engine, 0, origin, static_cast<std::int64_t>(1000 * (i + 1))});
        std::size_t ne = rng() % 4 == 0 ? 0 : rng() % 3;
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& para = paras[rng() % paras.size()];
            auto kind = rng() % 2 ? EvidenceKind::manual : EvidenceKind::auto_read;
            std::optional<TokenSpan> span;
            if (kind == EvidenceKind::manual && rng() % 3 == 0) {
                auto a = rng() % para.text.size();
                auto b = a + rng() % (para.text.size() - a + 1);
                span = TokenSpan{a, b};
            }
            record_evidence(p, {para.paragraph_id, kind, span, i});
            last_evidence = para.text;
        }
    }
    std::string answer = rng() % 3 == 0 ? "" : tokenize_terms(paras[rng() % paras.size()].text).front();
    finalize(p, answer, !answer.empty() && rng() % 2);
    return p;
}

}  // namespace fixtures
