// qagame: index building, the game server, session analysis and
// reasoning-path conversion.
//
// Exit codes: 0 success, 2 usage error, 3 input parse/load error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qagame/analysis.hpp"
#include "qagame/convert.hpp"
#include "qagame/errors.hpp"
#include "qagame/http_api.hpp"
#include "qagame/service.hpp"

namespace {

using namespace qagame;

constexpr int kUsageError = 2;
constexpr int kParseError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

SearchEngines load_engines(const Corpus& corpus, const std::string& index_path, const std::string& embed_path,
                           Bm25Params params, std::size_t dim) {
    InvertedIndex sparse;
    if (!index_path.empty() && std::filesystem::exists(index_path)) {
        std::ifstream in(index_path);
        sparse = InvertedIndex::load(in);
    } else {
        sparse = build_sparse_index(corpus, params);
    }
    EmbeddingStore dense;
    if (!embed_path.empty() && std::filesystem::exists(embed_path)) {
        std::ifstream in(embed_path, std::ios::binary);
        dense = EmbeddingStore::load(in);
    } else {
        dense = build_embedding_store(corpus, sparse, EmbedConfig{dim, kEmbedSeed});
    }
    return SearchEngines(corpus, std::move(sparse), std::move(dense));
}

std::pair<std::string, int> split_listen(const std::string& listen) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw UsageError("--listen must be host:port");
    try {
        return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("--listen must be host:port");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qagame: search game server and session analysis"};
    app.require_subcommand(1);

    // index
    std::string corpus_path, index_out, embed_out;
    double k1 = 1.2, b = 0.75;
    std::size_t dim = kDefaultEmbedDim;
    auto* index_cmd = app.add_subcommand("index", "Build and persist the sparse and dense indexes");
    index_cmd->add_option("--corpus", corpus_path, "Corpus file (one page per line)")->required();
    index_cmd->add_option("--index-out", index_out, "Sparse index output path")->required();
    index_cmd->add_option("--embeddings-out", embed_out, "Embedding store output path");
    index_cmd->add_option("--k1", k1, "BM25 k1")->check(CLI::PositiveNumber);
    index_cmd->add_option("--b", b, "BM25 b")->check(CLI::Range(0.0, 1.0));
    index_cmd->add_option("--dim", dim, "Embedding dimension")->check(CLI::Range(16, 1 << 16));

    // serve
    std::string index_path, embed_path, questions_path, listen = "127.0.0.1:8080", data_dir, static_dir;
    std::uint64_t seed = 0x5eed;
    bool run_filter = false;
    auto* serve_cmd = app.add_subcommand("serve", "Run the game server");
    serve_cmd->add_option("--corpus", corpus_path, "Corpus file")->envname("QAGAME_CORPUS")->required();
    serve_cmd->add_option("--index", index_path, "Sparse index file (built in memory when absent)")
        ->envname("QAGAME_INDEX");
    serve_cmd->add_option("--embeddings", embed_path, "Embedding store file")->envname("QAGAME_EMBEDDINGS");
    serve_cmd->add_option("--questions", questions_path, "Question pool file")->envname("QAGAME_QUESTIONS")->required();
    serve_cmd->add_option("--listen", listen, "host:port")->envname("QAGAME_LISTEN");
    serve_cmd->add_option("--data-dir", data_dir, "Event log directory")->envname("QAGAME_DATA_DIR")->required();
    serve_cmd->add_option("--static-dir", static_dir, "Static UI assets")->envname("QAGAME_STATIC_DIR");
    serve_cmd->add_option("--seed", seed, "Question assignment seed");
    serve_cmd->add_flag("--filter", run_filter, "Apply the single-hop filter to the pool at startup");

    // filter
    std::string out_path;
    std::size_t filter_k = kSingleHopFilterK;
    auto* filter_cmd = app.add_subcommand("filter", "Keep the two hardest clues and drop single-hop questions");
    filter_cmd->add_option("--corpus", corpus_path, "Corpus file")->required();
    filter_cmd->add_option("--questions", questions_path, "Raw question file")->required();
    filter_cmd->add_option("--k", filter_k, "Hits checked per probe")->check(CLI::PositiveNumber);
    filter_cmd->add_option("--out", out_path, "Output path (stdout when absent)");

    // analyze
    std::string sessions_path, suggestions_path, format = "text";
    auto* analyze_cmd = app.add_subcommand("analyze", "Session statistics");
    analyze_cmd->add_option("--sessions", sessions_path, "Action-path export file")->required();
    analyze_cmd->add_option("--questions", questions_path, "Question pool file")->required();
    analyze_cmd->add_option("--corpus", corpus_path, "Corpus file, needed to attribute evidence words");
    analyze_cmd->add_option("--suggestions", suggestions_path, "Shown-suggestions export");
    analyze_cmd->add_option("--format", format, "text | records");
    analyze_cmd->add_option("--out", out_path, "Output path (stdout when absent)");

    // convert
    std::optional<std::size_t> step;
    auto* convert_cmd = app.add_subcommand("convert", "Convert action paths to reasoning paths");
    convert_cmd->add_option("--sessions", sessions_path, "Action-path export file")->required();
    convert_cmd->add_option("--corpus", corpus_path, "Corpus file")->required();
    convert_cmd->add_option("--step", step, "Only reports with exactly this many steps (Q_l)")
        ->check(CLI::Range(0, static_cast<int>(kMaxReasoningStep)));
    convert_cmd->add_option("--out", out_path, "Output path (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*index_cmd) {
            auto corpus = load_corpus(corpus_path);
            auto sparse = build_sparse_index(corpus, {k1, b});
            {
                std::ofstream out(index_out);
                if (!out) throw UsageError("cannot write " + index_out);
                sparse.save(out);
            }
            if (!embed_out.empty()) {
                std::ofstream out(embed_out, std::ios::binary);
                if (!out) throw UsageError("cannot write " + embed_out);
                build_embedding_store(corpus, sparse, EmbedConfig{dim, kEmbedSeed}).save(out);
            }
            std::cerr << "indexed " << corpus.paragraph_count() << " paragraphs, avgdl " << sparse.avgdl() << "\n";
        } else if (*serve_cmd) {
            auto corpus = load_corpus(corpus_path);
            auto engines = load_engines(corpus, index_path, embed_path, {}, kDefaultEmbedDim);
            auto pool = load_questions(questions_path);
            if (run_filter) pool = filter_questions(std::move(pool), engines.sparse(), corpus);
            auto [host, port] = split_listen(listen);
            ServiceConfig config;
            config.data_dir = data_dir;
            config.seed = seed;
            GameService service(engines, std::move(pool), config);
            std::optional<std::filesystem::path> assets;
            if (!static_dir.empty()) assets = static_dir;
            HttpApi api(service, assets);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!api.listen(host, port)) {
                std::cerr << "cannot listen on " << listen << "\n";
                return 1;
            }
        } else if (*filter_cmd) {
            auto corpus = load_corpus(corpus_path);
            auto index = build_sparse_index(corpus);
            auto kept = filter_questions(load_questions(questions_path), index, corpus, filter_k);
            Output out(out_path);
            for (const auto& q : kept) out.stream() << serialize_question_record(q) << '\n';
        } else if (*analyze_cmd) {
            ReportFormat fmt;
            try {
                fmt = parse_report_format(format);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            SessionCorpus sessions;
            sessions.paths = load_sessions(sessions_path);
            for (auto& q : load_questions(questions_path)) sessions.questions.emplace(q.question_id, std::move(q));
            if (!suggestions_path.empty()) sessions.suggestions_log = load_suggestions_log(suggestions_path);
            Corpus corpus = corpus_path.empty() ? Corpus{} : load_corpus(corpus_path);
            StatReport report;
            try {
                report = compute_report(sessions, corpus);
            } catch (const std::invalid_argument& e) {
                throw LoadError(e.what());
            }
            Output out(out_path);
            out.stream() << emit_tables(report, fmt);
        } else if (*convert_cmd) {
            auto corpus = load_corpus(corpus_path);
            Output out(out_path);
            for (const auto& path : load_sessions(sessions_path)) {
                for (const auto& report : convert_all(path, corpus)) {
                    if (step && report.l != *step) continue;
                    out.stream() << serialize(report) << '\n';
                }
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return EXIT_SUCCESS;
}
