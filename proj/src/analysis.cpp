#include "qagame/analysis.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qagame/errors.hpp"

namespace qagame {
namespace {

using ojson = nlohmann::ordered_json;

Share make_share(std::size_t count, std::size_t denominator) {
    Share s;
    s.count = count;
    s.denominator = denominator;
    s.percent = denominator == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(denominator);
    return s;
}

std::string joined_tokens(std::string_view text) {
    std::string out;
    for (const auto& t : tokenize_terms(text)) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

constexpr std::array<QueryOrigin, 4> kOrigins = {QueryOrigin::typed, QueryOrigin::suggestion_golden,
                                                 QueryOrigin::suggestion_irrr, QueryOrigin::highlight_shortcut};

ojson share_json(const Share& s) { return {{"percent", s.percent}, {"count", s.count}, {"denominator", s.denominator}}; }

Share share_from(const ojson& j) {
    return {j.at("percent").get<double>(), j.at("count").get<std::size_t>(), j.at("denominator").get<std::size_t>()};
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

template <typename F>
void read_lines(const std::filesystem::path& path, F&& parse_line) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            parse_line(line);
        } catch (const ParseError& e) {
            throw LoadError(e.what(), line_no);
        }
    }
}

}  // namespace

void SessionCorpus::validate() const {
    for (const auto& p : paths) {
        if (!questions.contains(p.question_id)) {
            throw std::invalid_argument("path references unknown question \"" + p.question_id + "\"");
        }
    }
}

StatReport compute_report(const SessionCorpus& sessions, const Corpus& corpus) {
    if (sessions.paths.empty()) throw std::invalid_argument("session corpus is empty");
    sessions.validate();

    std::map<std::pair<std::size_t, std::size_t>, std::vector<const ShownSuggestions*>> shown_by_query;
    for (const auto& entry : sessions.suggestions_log) shown_by_query[{entry.path, entry.query_index}].push_back(&entry);

    StatReport r;
    r.path_count = sessions.paths.size();
    std::uint64_t len_sum = 0;
    std::uint64_t len_sq_sum = 0;
    std::size_t q_word = 0, q_content = 0, e_word = 0, novel = 0, sparse = 0;
    std::map<QueryOrigin, std::size_t> origins;
    std::map<std::string, std::pair<std::size_t, std::size_t>> accuracy;  // source -> (correct, answered)

    for (std::size_t pi = 0; pi < sessions.paths.size(); ++pi) {
        const auto& path = sessions.paths[pi];
        const auto& question = sessions.questions.at(path.question_id);
        auto question_tokens = token_set(path.question_text);

        if (path.answer && normalize_answer(*path.answer).size() > 0) {
            auto& [correct, answered] = accuracy[std::string(to_string(question.source))];
            ++answered;
            if (path.correct.value_or(false)) ++correct;
        }

        for (std::size_t qi = 0; qi < path.queries.size(); ++qi) {
            const auto& query = path.queries[qi];
            std::vector<std::string> shown;
            std::optional<std::string> golden_match, irrr_match;
            auto norm = joined_tokens(query.text);
            if (auto it = shown_by_query.find({pi, qi}); it != shown_by_query.end()) {
                for (const auto* entry : it->second) {
                    if (entry->golden) {
                        shown.push_back(*entry->golden);
                        if (joined_tokens(*entry->golden) == norm) golden_match = entry->golden;
                    }
                    if (entry->irrr) {
                        shown.push_back(*entry->irrr);
                        if (joined_tokens(*entry->irrr) == norm) irrr_match = entry->irrr;
                    }
                }
            }
            auto attr = attribute_query(path, qi, question_tokens, shown, corpus);

            auto len = static_cast<std::uint64_t>(attr.per_token.size());
            len_sum += len;
            len_sq_sum += len * len;
            q_word += attr.has_question_word;
            q_content += attr.has_question_content_word;
            e_word += attr.has_evidence_word;
            novel += attr.has_novel_word;
            sparse += query.engine == Engine::sparse;

            QueryOrigin origin = query.origin;
            if (origin == QueryOrigin::typed || origin == QueryOrigin::highlight_shortcut) {
                if (golden_match) {
                    origin = QueryOrigin::suggestion_golden;
                } else if (irrr_match) {
                    origin = QueryOrigin::suggestion_irrr;
                }
            }
            ++origins[origin];
            ++r.query_count;
        }

        if (!path.queries.empty()) ++r.chain_count_histogram[segment_chains(path, corpus).size()];
    }

    const std::size_t n = r.query_count;
    if (n > 0) {
        const auto dn = static_cast<double>(n);
        r.query_len_mean = static_cast<double>(len_sum) / dn;
        // Integer moments keep the result independent of path order.
        const double numer = static_cast<double>(n * len_sq_sum - len_sum * len_sum);
        r.query_len_std = std::sqrt(numer) / dn;
    }
    r.has_question_word = make_share(q_word, n);
    r.has_question_content_word = make_share(q_content, n);
    r.has_evidence_word = make_share(e_word, n);
    r.has_novel_word = make_share(novel, n);
    r.engine_share_sparse = make_share(sparse, n);
    for (const auto& [source, counts] : accuracy) r.accuracy_by_source[source] = make_share(counts.first, counts.second);
    for (auto o : kOrigins) r.query_origin_shares[std::string(to_string(o))] = make_share(origins[o], n);
    return r;
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "text") return ReportFormat::text;
    if (name == "records") return ReportFormat::records;
    throw std::invalid_argument("unknown format \"" + std::string(name) + "\" (expected text or records)");
}

std::string emit_tables(const StatReport& r, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::records) {
        out << ojson{{"table", "summary"}, {"paths", r.path_count}, {"queries", r.query_count},
                     {"query_len_mean", r.query_len_mean}, {"query_len_std", r.query_len_std}}
                   .dump()
            << '\n';
        const std::pair<const char*, const Share*> flags[] = {
            {"has_question_word", &r.has_question_word},
            {"has_question_content_word", &r.has_question_content_word},
            {"has_evidence_word", &r.has_evidence_word},
            {"has_novel_word", &r.has_novel_word},
            {"engine_share_sparse", &r.engine_share_sparse}};
        for (const auto& [name, share] : flags) {
            ojson j{{"table", "share"}, {"metric", name}};
            j.update(share_json(*share));
            out << j.dump() << '\n';
        }
        for (const auto& [source, share] : r.accuracy_by_source) {
            ojson j{{"table", "accuracy"}, {"source", source}};
            j.update(share_json(share));
            out << j.dump() << '\n';
        }
        for (const auto& [chains, paths] : r.chain_count_histogram) {
            out << ojson{{"table", "chains"}, {"chains", chains}, {"paths", paths}}.dump() << '\n';
        }
        for (const auto& [origin, share] : r.query_origin_shares) {
            ojson j{{"table", "origin"}, {"origin", origin}};
            j.update(share_json(share));
            out << j.dump() << '\n';
        }
        return out.str();
    }

    out << "Sessions: " << r.path_count << " paths, " << r.query_count << " queries\n";
    out << "Query length: mean " << fixed(r.query_len_mean, 4) << ", std " << fixed(r.query_len_std, 4)
        << " (population)\n\n";
    auto share_row = [&](std::string_view label, const Share& s) {
        out << std::left << std::setw(34) << label << std::right << std::setw(9) << fixed(s.percent, 2) << "%"
            << std::setw(8) << s.count << " /" << std::setw(7) << s.denominator << '\n';
    };
    out << "Query sources\n";
    share_row("has question word", r.has_question_word);
    share_row("has question word (no stopwords)", r.has_question_content_word);
    share_row("has evidence word", r.has_evidence_word);
    share_row("has novel word", r.has_novel_word);
    out << "\nEngines\n";
    share_row("sparse", r.engine_share_sparse);
    out << "\nAccuracy by source\n";
    for (const auto& [source, share] : r.accuracy_by_source) share_row(source, share);
    out << "\nSearch chains per path\n";
    for (const auto& [chains, paths] : r.chain_count_histogram) {
        out << std::left << std::setw(34) << chains << std::right << std::setw(9) << paths << '\n';
    }
    out << "\nQuery origins\n";
    for (const auto& [origin, share] : r.query_origin_shares) share_row(origin, share);
    return out.str();
}

StatReport parse_report_records(std::string_view records) {
    StatReport r;
    std::istringstream in{std::string(records)};
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t line_start = offset;
        offset += line.size() + 1;
        if (line.empty()) continue;
        try {
            auto j = ojson::parse(line);
            auto table = j.at("table").get<std::string>();
            if (table == "summary") {
                r.path_count = j.at("paths").get<std::size_t>();
                r.query_count = j.at("queries").get<std::size_t>();
                r.query_len_mean = j.at("query_len_mean").get<double>();
                r.query_len_std = j.at("query_len_std").get<double>();
            } else if (table == "share") {
                auto metric = j.at("metric").get<std::string>();
                Share s = share_from(j);
                if (metric == "has_question_word") r.has_question_word = s;
                else if (metric == "has_question_content_word") r.has_question_content_word = s;
                else if (metric == "has_evidence_word") r.has_evidence_word = s;
                else if (metric == "has_novel_word") r.has_novel_word = s;
                else if (metric == "engine_share_sparse") r.engine_share_sparse = s;
                else throw ParseError("unknown metric \"" + metric + "\"", line_start);
            } else if (table == "accuracy") {
                r.accuracy_by_source[j.at("source").get<std::string>()] = share_from(j);
            } else if (table == "chains") {
                r.chain_count_histogram[j.at("chains").get<std::size_t>()] = j.at("paths").get<std::size_t>();
            } else if (table == "origin") {
                r.query_origin_shares[j.at("origin").get<std::string>()] = share_from(j);
            } else {
                throw ParseError("unknown table \"" + table + "\"", line_start);
            }
        } catch (const ojson::parse_error& e) {
            throw ParseError(e.what(), line_start + e.byte);
        } catch (const ojson::exception& e) {
            throw ParseError(e.what(), line_start);
        }
    }
    return r;
}

std::vector<ActionPath> load_sessions(const std::filesystem::path& path) {
    std::vector<ActionPath> out;
    read_lines(path, [&](const std::string& line) { out.push_back(deserialize(line)); });
    return out;
}

std::string serialize(const ShownSuggestions& entry) {
    ojson j;
    j["path"] = entry.path;
    j["query_index"] = entry.query_index;
    j["golden"] = entry.golden ? ojson(*entry.golden) : ojson(nullptr);
    j["irrr"] = entry.irrr ? ojson(*entry.irrr) : ojson(nullptr);
    return j.dump();
}

ShownSuggestions parse_shown_suggestions(std::string_view line) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    try {
        ShownSuggestions s;
        s.path = j.at("path").get<std::size_t>();
        s.query_index = j.at("query_index").get<std::size_t>();
        if (j.contains("golden") && !j["golden"].is_null()) s.golden = j["golden"].get<std::string>();
        if (j.contains("irrr") && !j["irrr"].is_null()) s.irrr = j["irrr"].get<std::string>();
        return s;
    } catch (const ojson::exception& e) {
        throw ParseError(e.what(), 0);
    }
}

std::vector<ShownSuggestions> load_suggestions_log(const std::filesystem::path& path) {
    std::vector<ShownSuggestions> out;
    read_lines(path, [&](const std::string& line) { out.push_back(parse_shown_suggestions(line)); });
    return out;
}

}  // namespace qagame
