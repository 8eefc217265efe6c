#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qagame/action_path.hpp"
#include "qagame/corpus.hpp"
#include "qagame/game.hpp"

namespace qagame {

/// Suggestions shown before a query was issued. `path` is the 0-based
/// position of the path in the sessions file.
struct ShownSuggestions {
    std::size_t path = 0;
    std::size_t query_index = 0;
    std::optional<std::string> golden;
    std::optional<std::string> irrr;

    bool operator==(const ShownSuggestions&) const = default;
};

struct SessionCorpus {
    std::vector<ActionPath> paths;
    std::map<std::string, GameQuestion> questions;
    std::vector<ShownSuggestions> suggestions_log;

    /// Throws std::invalid_argument when a path's question_id does not resolve.
    void validate() const;
};

/// A percentage with the population it was computed over.
struct Share {
    double percent = 0.0;
    std::size_t count = 0;
    std::size_t denominator = 0;
    bool operator==(const Share&) const = default;
};

struct StatReport {
    std::size_t path_count = 0;
    std::size_t query_count = 0;
    double query_len_mean = 0.0;
    double query_len_std = 0.0;  // population
    Share has_question_word;          // stopwords count as question words
    Share has_question_content_word;  // stopwords excluded
    Share has_evidence_word;
    Share has_novel_word;
    Share engine_share_sparse;
    std::map<std::string, Share> accuracy_by_source;
    std::map<std::size_t, std::size_t> chain_count_histogram;  // chains per path -> paths
    std::map<std::string, Share> query_origin_shares;

    bool operator==(const StatReport&) const = default;
};

/// Throws std::invalid_argument on an empty corpus.
StatReport compute_report(const SessionCorpus& sessions, const Corpus& corpus);

enum class ReportFormat { text, records };
/// Throws std::invalid_argument for anything but "text" or "records".
ReportFormat parse_report_format(std::string_view name);

std::string emit_tables(const StatReport& report, ReportFormat format);
/// Inverse of the records rendering. Throws ParseError.
StatReport parse_report_records(std::string_view records);

std::vector<ActionPath> load_sessions(const std::filesystem::path& path);  // LoadError with line
std::vector<ShownSuggestions> load_suggestions_log(const std::filesystem::path& path);
std::string serialize(const ShownSuggestions& entry);
ShownSuggestions parse_shown_suggestions(std::string_view line);

}  // namespace qagame
