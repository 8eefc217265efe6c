#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qagame/action_path.hpp"
#include "qagame/corpus.hpp"
#include "qagame/suggesters.hpp"

namespace qagame {

/// A_j = (q0, E1, q1, ..., q_j), trimmed from a source path.
struct PartialActionPath {
    const ActionPath* source = nullptr;
    std::size_t j = 0;

    std::span<const QueryRecord> queries() const { return {source->queries.data(), j + 1}; }
    /// E1..E_j.
    std::span<const std::vector<EvidenceRecord>> evidence_sets() const { return {source->evidence_sets.data(), j}; }
};

/// Throws std::out_of_range unless j < query count.
PartialActionPath trim(const ActionPath& path, std::size_t j);

enum class SelectionReason { answer_source, query_source, manual, manual_fallback };
std::string_view to_string(SelectionReason reason);

struct CrucialSelection {
    std::string paragraph_id;
    SelectionReason reason = SelectionReason::manual;
    std::size_t evidence_set = 0;  // 1-based i of E_i

    bool operator==(const CrucialSelection&) const = default;
};

// Picks one document from E_i (1-based) of a finalized path, by priority:
// the normalized answer occurs in the paragraph, a query issued after E_i
// occurs in it or shares two content tokens with it, it was recorded
// manually. Earliest record wins within a tier; with no tier the earliest
// record is taken as manual_fallback.
std::optional<CrucialSelection> select_crucial(const ActionPath& path, std::size_t evidence_set,
                                               const Corpus& corpus);

struct ConversionReport {
    std::string question_id;
    std::size_t j = 0;  // queries kept are q0..q_j; j == query count means the whole path
    ReasoningPath reasoning_path;
    std::vector<CrucialSelection> selected;
    std::vector<std::size_t> skipped;  // 1-based indices of empty E_i
    std::size_t l = 0;
};

ConversionReport to_reasoning_path(const PartialActionPath& partial, std::string_view question, const Corpus& corpus);

/// Conversion over every evidence set of the path, E1..Ek.
ConversionReport to_reasoning_path(const ActionPath& path, std::string_view question, const Corpus& corpus);

/// Every A_j of the path plus the whole-path conversion; empty for zero queries.
std::vector<ConversionReport> convert_all(const ActionPath& path, const Corpus& corpus);

inline constexpr std::size_t kMaxReasoningStep = 2;

/// Q_0..Q_2: question ids with some conversion reaching at least l steps.
std::array<std::set<std::string>, kMaxReasoningStep + 1> question_sets(const std::vector<ConversionReport>& reports);

std::string serialize(const ConversionReport& report);

}  // namespace qagame
