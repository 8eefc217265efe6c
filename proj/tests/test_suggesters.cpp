#include <doctest.h>

#include <random>

#include "brute_force.hpp"
#include "fixtures.hpp"
#include "qagame/suggesters.hpp"

using namespace qagame;

namespace {

// Order-preserving embedding of `needle` tokens into `hay` tokens.
bool is_subsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < hay.size() && j < needle.size(); ++i) {
        if (hay[i] == needle[j]) ++j;
    }
    return j == needle.size();
}

ReasoningPath path_of(const std::string& q, const Corpus& c, std::initializer_list<const char*> ids) {
    ReasoningPath r(q);
    for (const char* id : ids) r = extend_reasoning_path(std::move(r), c.get_paragraph(id));
    return r;
}

}  // namespace

TEST_SUITE("suggesters") {

TEST_CASE("extend_reasoning_path") {
    auto c = fixtures::millennium_corpus();
    ReasoningPath r0("Q text");
    CHECK(r0.step() == 0);
    CHECK(r0.text_view() == "Q text");
    auto r1 = extend_reasoning_path(r0, c.get_paragraph(fixtures::kD1));
    CHECK(r1.step() == 1);
    CHECK(r1.documents()[0].paragraph_id == fixtures::kD1);
    CHECK(r1.text_view() == "Q text " + c.get_paragraph(fixtures::kD1).text);
    CHECK_THROWS_AS(extend_reasoning_path(r1, c.get_paragraph(fixtures::kD1)), std::invalid_argument);

    auto r2 = extend_reasoning_path(r1, c.get_paragraph(fixtures::kD2));
    const auto& view = r2.text_view();
    auto prem = view.find("Prem Rawat");
    auto guru = view.find("Indian guru");
    REQUIRE(prem != std::string::npos);
    REQUIRE(guru != std::string::npos);
    CHECK(prem < guru);
    CHECK(view.rfind(r1.text_view(), 0) == 0);
}

TEST_CASE("golden finds Clemens Winkler") {
    auto c = fixtures::germanium_corpus();
    auto idx = build_sparse_index(c);
    ReasoningPath r("Discovered in 1886 by Clemens Winkler, this element is used in glass.");
    // The rarest question terms are the discoverer's name.
    for (const auto& t : tokenize_terms(r.text_view())) {
        if (t != "clemens" && t != "winkler" && !is_stopword(t)) CHECK(idx.idf(t) < idx.idf("winkler"));
    }
    auto g = suggest_golden(r, idx);
    REQUIRE(g);
    CHECK(g->kind == SuggestionKind::golden);
    CAPTURE(g->text);
    CHECK(g->text.find("Clemens Winkler") != std::string::npos);
    REQUIRE(g->spans.size() == 1);
    CHECK(r.text_view().substr(g->spans[0].start, g->spans[0].end - g->spans[0].start) == g->text);

    // Brute-force the window objective with an independent IDF.
    brute::Bm25 scan(c);
    auto ts = tokenize(r.text_view());
    double best = -1e300;
    std::string best_text;
    for (std::size_t s = 0; s < ts.size(); ++s) {
        for (std::size_t e = s + 1; e <= std::min(ts.size(), s + 8); ++e) {
            double score = 0.0;
            bool content = false;
            for (std::size_t t = s; t < e; ++t) {
                if (is_stopword(ts.tokens[t])) {
                    score -= 0.5;
                } else {
                    score += scan.idf(ts.tokens[t]);
                    content = true;
                }
            }
            if (content && score > best + 1e-12) {
                best = score;
                best_text = r.text_view().substr(ts.offsets[s].start, ts.offsets[e - 1].end - ts.offsets[s].start);
            }
        }
    }
    CHECK(g->text == best_text);
}

TEST_CASE("golden and irrr decline stopword-only text") {
    auto c = fixtures::germanium_corpus();
    auto idx = build_sparse_index(c);
    ReasoningPath r("the of and");
    CHECK_FALSE(suggest_golden(r, idx));
    CHECK_FALSE(suggest_irrr(r, idx));
    CHECK_FALSE(suggest_answer(r, idx, c));
}

TEST_CASE("irrr drops stopwords and repeats") {
    auto c = fixtures::millennium_corpus();
    auto idx = build_sparse_index(c);
    ReasoningPath r(
        "This quantity's name is used to describe situations in which there exists a frame of reference such that two "
        "given events could have happened at the same location.");
    auto s = suggest_irrr(r, idx);
    REQUIRE(s);
    CHECK(s->text.rfind("quantity's name used describe situations exists frame reference", 0) == 0);
    CHECK(tokenize_terms(s->text).size() == 13);

    auto three = suggest_irrr(r, idx, 3);
    REQUIRE(three);
    CHECK(three->text == "quantity's name used");
    CHECK(three->token_positions == std::vector<std::size_t>{1, 2, 4});

    ReasoningPath rep("guru guru Guru the guru");
    CHECK(suggest_irrr(rep, idx)->text == "guru");
}

TEST_CASE("answer suggestion") {
    auto c = fixtures::balkans_corpus();
    auto idx = build_sparse_index(c);
    ReasoningPath r("Renegade Janissaries massacred the elite of this country.");
    auto a = suggest_answer(r, idx, c, "dahije");
    REQUIRE(a);
    CHECK(a->kind == SuggestionKind::answer);
    CHECK(a->text == "Serbia");
    CHECK(suggest_answer(r, idx, c, "dahije") == a);
    CHECK_FALSE(suggest_answer(r, idx, c, "zzzz"));
    // No current query: the irrr suggestion is the probe.
    CHECK(suggest_answer(path_of("knyaz prince", c, {}), idx, c).value().text == "Knyaz");
}

TEST_CASE("property: golden substring and irrr subsequence over random paths") {
    auto c = fixtures::random_corpus(400, 31);
    auto idx = build_sparse_index(c);
    std::mt19937_64 rng(77);
    auto paras = c.paragraphs();
    for (int i = 0; i < 200; ++i) {
        ReasoningPath r(paras[rng() % paras.size()].text);
        std::vector<TokenSpan> earlier;
        std::string earlier_view;
        for (std::size_t d = 0, n = rng() % 4; d < n; ++d) {
            const auto& p = paras[rng() % paras.size()];
            if (r.contains(p.paragraph_id)) continue;
            earlier_view = r.text_view();
            if (auto g = suggest_golden(r, idx)) earlier = g->spans;
            r = extend_reasoning_path(std::move(r), p);
            // Provenance of the earlier suggestion still indexes the same text.
            for (auto sp : earlier) {
                CHECK(r.text_view().substr(sp.start, sp.end - sp.start) ==
                      earlier_view.substr(sp.start, sp.end - sp.start));
            }
        }
        if (auto g = suggest_golden(r, idx)) {
            CHECK(r.text_view().find(g->text) != std::string::npos);
            CHECK(tokenize_terms(g->text).size() <= kGoldenMaxWindow);
        }
        if (auto s = suggest_irrr(r, idx)) {
            auto stream = tokenize_terms(r.text_view());
            CHECK(is_subsequence(tokenize_terms(s->text), stream));
            CHECK(std::is_sorted(s->token_positions.begin(), s->token_positions.end()));
            CHECK(s->token_positions.size() <= kIrrrTokenCap);
        }
    }
}

}  // TEST_SUITE
