#pragma once

// Exhaustive scorers that evaluate the ranking formulas on every paragraph,
// sharing nothing with the index code beyond the tokenizer.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qagame/corpus.hpp"
#include "qagame/retrieval.hpp"
#include "qagame/text.hpp"

namespace brute {

struct Ranked {
    std::string paragraph_id;
    double score = 0.0;
};

class Bm25 {
public:
    explicit Bm25(const qagame::Corpus& corpus, double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {
        std::size_t total = 0;
        for (const auto& p : corpus.paragraphs()) {
            Doc d{p.paragraph_id, {}, 0};
            for (auto& t : qagame::tokenize_terms(p.text)) {
                ++d.tf[t];
                ++d.len;
            }
            total += d.len;
            docs_.push_back(std::move(d));
        }
        avgdl_ = static_cast<double>(total) / static_cast<double>(docs_.size());
    }

    std::size_t df(const std::string& term) const {
        std::size_t n = 0;
        for (const auto& d : docs_) n += d.tf.count(term);
        return n;
    }

    double idf(const std::string& term) const {
        double n = static_cast<double>(docs_.size());
        double k = static_cast<double>(df(term));
        return std::log(1.0 + (n - k + 0.5) / (k + 0.5));
    }

    double avgdl() const { return avgdl_; }

    std::vector<Ranked> top_k(const std::string& query, std::size_t k) const {
        auto terms = qagame::tokenize_terms(query);
        std::set<std::string> unique(terms.begin(), terms.end());
        std::map<std::string, double> idfs;
        for (const auto& t : unique) idfs[t] = idf(t);
        std::vector<Ranked> all;
        for (const auto& d : docs_) {
            double s = 0.0;
            for (const auto& t : unique) {
                auto it = d.tf.find(t);
                if (it == d.tf.end()) continue;
                double tf = it->second;
                s += idfs[t] * tf * (k1_ + 1) / (tf + k1_ * (1 - b_ + b_ * d.len / avgdl_));
            }
            if (s > 0) all.push_back({d.id, s});
        }
        std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
            return a.score != b.score ? a.score > b.score : a.paragraph_id < b.paragraph_id;
        });
        if (all.size() > k) all.resize(k);
        return all;
    }

private:
    struct Doc {
        std::string id;
        std::map<std::string, std::size_t> tf;
        std::size_t len;
    };
    double k1_, b_;
    double avgdl_ = 0.0;
    std::vector<Doc> docs_;
};

/// Dot product against every stored vector.
inline std::vector<Ranked> dense_top_k(const qagame::EmbeddingStore& store, const std::vector<double>& q,
                                       std::size_t k) {
    std::vector<Ranked> all;
    bool zero = std::all_of(q.begin(), q.end(), [](double x) { return x == 0.0; });
    if (zero) return all;
    for (std::size_t i = 0; i < store.size(); ++i) {
        auto v = store.vector(i);
        double s = 0.0;
        for (std::size_t c = 0; c < q.size(); ++c) s += q[c] * static_cast<double>(v[c]);
        all.push_back({std::string(store.ids()[i]), s});
    }
    std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
        return a.score != b.score ? a.score > b.score : a.paragraph_id < b.paragraph_id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace brute
