#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qagame/corpus.hpp"

namespace qagame {

enum class Engine { sparse, dense };

std::string_view to_string(Engine engine);
/// Throws std::invalid_argument.
Engine parse_engine(std::string_view name);

struct SearchHit {
    std::string paragraph_id;
    std::string page_id;
    std::string page_title;
    double score = 0.0;
    Engine engine = Engine::sparse;
    std::size_t rank = 0;  // 1-based

    bool operator==(const SearchHit&) const = default;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
    bool operator==(const Bm25Params&) const = default;
};

struct Posting {
    std::uint32_t doc = 0;  // position in InvertedIndex::doc_ids()
    std::uint32_t tf = 0;
    bool operator==(const Posting&) const = default;
};

/// Document number plus score, before resolution to a SearchHit.
struct ScoredDoc {
    std::uint32_t doc = 0;
    double score = 0.0;
};

// BM25 index over paragraphs. Documents are numbered in ascending
// paragraph_id order, so posting lists and tie-breaks both follow
// paragraph_id.
class InvertedIndex {
public:
    std::span<const std::string> doc_ids() const { return doc_ids_; }
    std::span<const std::uint32_t> doc_lengths() const { return doc_lengths_; }
    std::size_t size() const { return doc_ids_.size(); }
    double avgdl() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }
    std::size_t vocabulary_size() const { return postings_.size(); }

    std::span<const Posting> postings(std::string_view term) const;
    std::size_t document_frequency(std::string_view term) const { return postings(term).size(); }

    /// ln(1 + (N - df + 0.5) / (df + 0.5)); unseen terms use df = 0.
    double idf(std::string_view term) const;

    /// Top-k by BM25 over unique query terms; zero scores omitted.
    std::vector<ScoredDoc> top_k(std::string_view query, std::size_t k) const;

    std::size_t find_doc(std::string_view paragraph_id) const;  // size() when absent

    void save(std::ostream& out) const;
    static InvertedIndex load(std::istream& in);

    bool operator==(const InvertedIndex&) const = default;

private:
    friend InvertedIndex build_sparse_index(const Corpus&, Bm25Params);

    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avgdl_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

/// Throws std::invalid_argument on an empty corpus or out-of-range params.
InvertedIndex build_sparse_index(const Corpus& corpus, Bm25Params params = {});

std::vector<SearchHit> search_sparse(const InvertedIndex& index, const Corpus& corpus,
                                     std::string_view query, std::size_t k);

// Published hash seed for the dense stand-in.
inline constexpr std::uint64_t kEmbedSeed = 0x9e3779b97f4a7c15ULL;
inline constexpr std::size_t kDefaultEmbedDim = 256;

struct EmbedConfig {
    std::size_t dim = kDefaultEmbedDim;
    std::uint64_t seed = kEmbedSeed;
    bool operator==(const EmbedConfig&) const = default;
};

/// FNV-1a 64 over the token bytes, offset basis xor seed.
std::uint64_t embed_hash(std::string_view token, std::uint64_t seed);

// Hashed tf-idf projection: each unique token adds (1 + ln tf) * idf at
// component hash % dim with sign from hash bit 63 (set = negative). Result
// is unit length, or all zeros when nothing accumulated.
std::vector<double> embed(std::string_view text, const EmbedConfig& config, const InvertedIndex& idf_source);

class EmbeddingStore {
public:
    std::size_t dim() const { return config_.dim; }
    std::uint64_t seed() const { return config_.seed; }
    const EmbedConfig& config() const { return config_; }
    std::size_t size() const { return ids_.size(); }
    std::span<const std::string> ids() const { return ids_; }
    std::span<const float> vector(std::size_t i) const {
        return {data_.data() + i * config_.dim, config_.dim};
    }

    std::vector<ScoredDoc> top_k(std::span<const double> query, std::size_t k) const;

    /// Binary layout: "CBEMB1", u32 dim, u64 seed, u32 count, then per record
    /// u32 id length, id bytes, dim little-endian f32.
    void save(std::ostream& out) const;
    static EmbeddingStore load(std::istream& in);

    bool operator==(const EmbeddingStore&) const = default;

private:
    friend EmbeddingStore build_embedding_store(const Corpus&, const InvertedIndex&, EmbedConfig);

    EmbedConfig config_;
    std::vector<std::string> ids_;  // ascending paragraph_id
    std::vector<float> data_;
};

/// Throws std::invalid_argument when dim < 16.
EmbeddingStore build_embedding_store(const Corpus& corpus, const InvertedIndex& idf_source,
                                     EmbedConfig config = {});

std::vector<SearchHit> search_dense(const EmbeddingStore& store, const InvertedIndex& idf_source,
                                    const Corpus& corpus, std::string_view query, std::size_t k);

/// Both engines over one corpus.
class SearchEngines {
public:
    SearchEngines(const Corpus& corpus, InvertedIndex sparse, EmbeddingStore dense)
        : corpus_(&corpus), sparse_(std::move(sparse)), dense_(std::move(dense)) {}

    static SearchEngines build(const Corpus& corpus, Bm25Params params = {}, EmbedConfig config = {});

    std::vector<SearchHit> search(Engine engine, std::string_view query, std::size_t k) const;

    const Corpus& corpus() const { return *corpus_; }
    const InvertedIndex& sparse() const { return sparse_; }
    const EmbeddingStore& dense() const { return dense_; }

private:
    const Corpus* corpus_;
    InvertedIndex sparse_;
    EmbeddingStore dense_;
};

}  // namespace qagame
