#include "qagame/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qagame/errors.hpp"

namespace qagame {
namespace {

constexpr std::string_view kIndexMagic = "CBIDX1";
constexpr std::string_view kEmbedMagic = "CBEMB1";

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
}

void select_top_k(std::vector<ScoredDoc>& docs, std::size_t k) {
    if (docs.size() > k) {
        std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(), ranks_before);
        docs.resize(k);
    } else {
        std::sort(docs.begin(), docs.end(), ranks_before);
    }
}

std::vector<SearchHit> resolve_hits(const std::vector<ScoredDoc>& scored, std::span<const std::string> ids,
                                    const Corpus& corpus, Engine engine) {
    std::vector<SearchHit> hits;
    hits.reserve(scored.size());
    for (const auto& sd : scored) {
        const auto& para = corpus.get_paragraph(ids[sd.doc]);
        const auto& page = corpus.get_page(para.page_id);
        hits.push_back({para.paragraph_id, para.page_id, page.title, sd.score, engine, hits.size() + 1});
    }
    return hits;
}

std::vector<std::size_t> paragraphs_by_id(const Corpus& corpus) {
    auto paras = corpus.paragraphs();
    std::vector<std::size_t> order(paras.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return paras[a].paragraph_id < paras[b].paragraph_id; });
    return order;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_le(std::istream& in, int bytes) {
    unsigned char b[8] = {};
    if (!in.read(reinterpret_cast<char*>(b), bytes)) throw LoadError("truncated embedding store");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

std::string_view to_string(Engine engine) { return engine == Engine::sparse ? "sparse" : "dense"; }

Engine parse_engine(std::string_view name) {
    if (name == "sparse") return Engine::sparse;
    if (name == "dense") return Engine::dense;
    throw std::invalid_argument("unknown engine \"" + std::string(name) + "\"");
}

// ---------------------------------------------------------------------------
// Sparse

InvertedIndex build_sparse_index(const Corpus& corpus, Bm25Params params) {
    if (corpus.paragraph_count() == 0) throw std::invalid_argument("cannot index an empty corpus");
    if (!(params.k1 > 0.0)) throw std::invalid_argument("k1 must be positive");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw std::invalid_argument("b must lie in [0, 1]");

    InvertedIndex index;
    index.params_ = params;
    auto paras = corpus.paragraphs();
    auto order = paragraphs_by_id(corpus);
    index.doc_ids_.reserve(order.size());
    index.doc_lengths_.reserve(order.size());

    std::uint64_t total = 0;
    std::unordered_map<std::string, std::uint32_t> tf;
    for (std::uint32_t doc = 0; doc < order.size(); ++doc) {
        const auto& para = paras[order[doc]];
        auto tokens = tokenize_terms(para.text);
        index.doc_ids_.push_back(para.paragraph_id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total += tokens.size();
        tf.clear();
        for (auto& t : tokens) ++tf[std::move(t)];
        for (auto& [term, count] : tf) index.postings_[term].push_back({doc, count});
    }
    index.avgdl_ = static_cast<double>(total) / static_cast<double>(order.size());
    return index;
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return {};
    return it->second;
}

double InvertedIndex::idf(std::string_view term) const {
    auto n = static_cast<double>(size());
    auto df = static_cast<double>(document_frequency(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::vector<ScoredDoc> InvertedIndex::top_k(std::string_view query, std::size_t k) const {
    if (k == 0 || doc_ids_.empty()) return {};
    auto terms = tokenize_terms(query);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    std::vector<double> acc(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    const double k1 = params_.k1;
    const double b = params_.b;
    for (const auto& term : terms) {
        auto list = postings(term);
        if (list.empty()) continue;
        const double w = idf(term);
        for (const auto& p : list) {
            const double tf = p.tf;
            const double norm = 1.0 - b + b * static_cast<double>(doc_lengths_[p.doc]) / avgdl_;
            if (acc[p.doc] == 0.0) touched.push_back(p.doc);
            acc[p.doc] += w * tf * (k1 + 1.0) / (tf + k1 * norm);
        }
    }

    std::vector<ScoredDoc> scored;
    scored.reserve(touched.size());
    for (auto doc : touched) {
        if (acc[doc] > 0.0) scored.push_back({doc, acc[doc]});
    }
    select_top_k(scored, k);
    return scored;
}

std::size_t InvertedIndex::find_doc(std::string_view paragraph_id) const {
    auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), paragraph_id,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == doc_ids_.end() || *it != paragraph_id) return size();
    return static_cast<std::size_t>(it - doc_ids_.begin());
}

void InvertedIndex::save(std::ostream& out) const {
    using nlohmann::json;
    out << kIndexMagic << '\n';
    out << json{{"k1", params_.k1}, {"b", params_.b}, {"N", doc_ids_.size()}, {"avgdl", avgdl_},
                {"terms", postings_.size()}}
               .dump()
        << '\n';
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        out << json::array({doc_ids_[i], doc_lengths_[i]}).dump() << '\n';
    }
    std::map<std::string_view, const std::vector<Posting>*> sorted;
    for (const auto& [term, list] : postings_) sorted.emplace(term, &list);
    for (const auto& [term, list] : sorted) {
        json flat = json::array();
        for (const auto& p : *list) {
            flat.push_back(p.doc);
            flat.push_back(p.tf);
        }
        out << json::array({term, std::move(flat)}).dump() << '\n';
    }
}

InvertedIndex InvertedIndex::load(std::istream& in) {
    using nlohmann::json;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kIndexMagic) throw LoadError("missing CBIDX1 header", 1);
    InvertedIndex index;
    try {
        ++line_no;
        if (!std::getline(in, line)) throw LoadError("missing index header record", line_no);
        auto header = json::parse(line);
        index.params_ = {header.at("k1").get<double>(), header.at("b").get<double>()};
        index.avgdl_ = header.at("avgdl").get<double>();
        auto n = header.at("N").get<std::size_t>();
        auto terms = header.at("terms").get<std::size_t>();
        for (std::size_t i = 0; i < n; ++i) {
            ++line_no;
            if (!std::getline(in, line)) throw LoadError("truncated document table", line_no);
            auto rec = json::parse(line);
            index.doc_ids_.push_back(rec.at(0).get<std::string>());
            index.doc_lengths_.push_back(rec.at(1).get<std::uint32_t>());
        }
        for (std::size_t i = 0; i < terms; ++i) {
            ++line_no;
            if (!std::getline(in, line)) throw LoadError("truncated postings", line_no);
            auto rec = json::parse(line);
            const auto& flat = rec.at(1);
            std::vector<Posting> list;
            list.reserve(flat.size() / 2);
            for (std::size_t j = 0; j + 1 < flat.size(); j += 2) {
                auto doc = flat[j].get<std::uint32_t>();
                if (doc >= n) throw LoadError("posting references unknown document", line_no);
                list.push_back({doc, flat[j + 1].get<std::uint32_t>()});
            }
            index.postings_.emplace(rec.at(0).get<std::string>(), std::move(list));
        }
    } catch (const json::exception& e) {
        throw LoadError(e.what(), line_no);
    }
    return index;
}

std::vector<SearchHit> search_sparse(const InvertedIndex& index, const Corpus& corpus, std::string_view query,
                                     std::size_t k) {
    return resolve_hits(index.top_k(query, k), index.doc_ids(), corpus, Engine::sparse);
}

// ---------------------------------------------------------------------------
// Dense

std::uint64_t embed_hash(std::string_view token, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> embed(std::string_view text, const EmbedConfig& config, const InvertedIndex& idf_source) {
    if (config.dim < 16) throw std::invalid_argument("embedding dim must be at least 16");
    std::vector<double> v(config.dim, 0.0);
    std::map<std::string, std::size_t> tf;
    for (auto& t : tokenize_terms(text)) ++tf[std::move(t)];
    for (const auto& [term, count] : tf) {
        const double w = (1.0 + std::log(static_cast<double>(count))) * idf_source.idf(term);
        const std::uint64_t h = embed_hash(term, config.seed);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[h % config.dim] += sign * w;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return std::vector<double>(config.dim, 0.0);
    for (double& x : v) x /= norm;
    return v;
}

EmbeddingStore build_embedding_store(const Corpus& corpus, const InvertedIndex& idf_source, EmbedConfig config) {
    if (config.dim < 16) throw std::invalid_argument("embedding dim must be at least 16");
    EmbeddingStore store;
    store.config_ = config;
    auto paras = corpus.paragraphs();
    auto order = paragraphs_by_id(corpus);
    store.ids_.reserve(order.size());
    store.data_.reserve(order.size() * config.dim);
    for (auto i : order) {
        store.ids_.push_back(paras[i].paragraph_id);
        for (double x : embed(paras[i].text, config, idf_source)) store.data_.push_back(static_cast<float>(x));
    }
    return store;
}

std::vector<ScoredDoc> EmbeddingStore::top_k(std::span<const double> query, std::size_t k) const {
    if (k == 0 || query.size() != config_.dim) return {};
    if (std::all_of(query.begin(), query.end(), [](double x) { return x == 0.0; })) return {};
    std::vector<ScoredDoc> scored;
    scored.reserve(ids_.size());
    for (std::uint32_t doc = 0; doc < ids_.size(); ++doc) {
        auto v = vector(doc);
        double dot = 0.0;
        for (std::size_t d = 0; d < config_.dim; ++d) dot += static_cast<double>(v[d]) * query[d];
        scored.push_back({doc, dot});
    }
    select_top_k(scored, k);
    return scored;
}

void EmbeddingStore::save(std::ostream& out) const {
    static_assert(sizeof(float) == 4);
    out.write(kEmbedMagic.data(), static_cast<std::streamsize>(kEmbedMagic.size()));
    write_u32(out, static_cast<std::uint32_t>(config_.dim));
    write_u64(out, config_.seed);
    write_u32(out, static_cast<std::uint32_t>(ids_.size()));
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        write_u32(out, static_cast<std::uint32_t>(ids_[i].size()));
        out.write(ids_[i].data(), static_cast<std::streamsize>(ids_[i].size()));
        for (float x : vector(i)) write_u32(out, std::bit_cast<std::uint32_t>(x));
    }
}

EmbeddingStore EmbeddingStore::load(std::istream& in) {
    char magic[6];
    if (!in.read(magic, 6) || std::string_view(magic, 6) != kEmbedMagic) {
        throw LoadError("missing CBEMB1 header");
    }
    EmbeddingStore store;
    store.config_.dim = static_cast<std::size_t>(read_le(in, 4));
    store.config_.seed = read_le(in, 8);
    if (store.config_.dim < 16) throw LoadError("embedding dim below 16");
    auto count = static_cast<std::size_t>(read_le(in, 4));
    for (std::size_t i = 0; i < count; ++i) {
        auto len = static_cast<std::size_t>(read_le(in, 4));
        std::string id(len, '\0');
        if (!in.read(id.data(), static_cast<std::streamsize>(len))) throw LoadError("truncated embedding store");
        store.ids_.push_back(std::move(id));
        for (std::size_t d = 0; d < store.config_.dim; ++d) {
            store.data_.push_back(std::bit_cast<float>(static_cast<std::uint32_t>(read_le(in, 4))));
        }
    }
    return store;
}

std::vector<SearchHit> search_dense(const EmbeddingStore& store, const InvertedIndex& idf_source,
                                    const Corpus& corpus, std::string_view query, std::size_t k) {
    auto q = embed(query, store.config(), idf_source);
    return resolve_hits(store.top_k(q, k), store.ids(), corpus, Engine::dense);
}

SearchEngines SearchEngines::build(const Corpus& corpus, Bm25Params params, EmbedConfig config) {
    auto sparse = build_sparse_index(corpus, params);
    auto dense = build_embedding_store(corpus, sparse, config);
    return SearchEngines(corpus, std::move(sparse), std::move(dense));
}

std::vector<SearchHit> SearchEngines::search(Engine engine, std::string_view query, std::size_t k) const {
    if (engine == Engine::sparse) return search_sparse(sparse_, *corpus_, query, k);
    return search_dense(dense_, sparse_, *corpus_, query, k);
}

}  // namespace qagame
