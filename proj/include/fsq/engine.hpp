#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fsq/context.hpp"
#include "fsq/lattice.hpp"
#include "fsq/sqlf.hpp"

namespace fsq {

enum class Correspondence { Exact, False, Indecision };

std::string_view to_string(Correspondence verdict);

struct SummaryMember {
    std::size_t object;
    std::string id;
    /// Membership in the concept (min over its intent).
    double concept_degree;
    /// Oracle satisfaction of the query, when a query was involved.
    std::optional<double> satisfaction;

    friend bool operator==(const SummaryMember&, const SummaryMember&) = default;
};

/// Alpha-cut of a concept's extent.
struct AlphaSummary {
    ConceptId concept_id = 0;
    std::vector<LabelRef> intent;
    std::vector<SummaryMember> members;
    double alpha = 0.0;
    double sd = 0.0;
    /// Recursion depth at which the summary was reached (lattice level for a bare alpha_summary).
    std::size_t level = 0;
    /// Intent restricted to the query's output attributes.
    std::map<std::string, std::vector<std::string>> output_description;
};

/// Exact: the alpha-cut is non-empty and every member satisfies the query at
/// alpha. False: no extent object satisfies the query at alpha, so no
/// descendant can either. Indecision otherwise.
Correspondence coresp(const FuzzyFormalContext& ctx, const FuzzyConcept& node, const NormalizedQuery& query,
                      double alpha);
Correspondence coresp(const FuzzyFormalContext& ctx, const FuzzyConcept& node, const NormalizedQuery& query);

/// Extent entries with degree >= alpha, degrees unchanged; sd and level from the lattice.
AlphaSummary alpha_summary(const ConceptLattice& lattice, ConceptId id, double alpha);

struct EvaluationOptions {
    /// Skip the sub-lattice under False concepts. Turning this off only
    /// costs time; results are identical.
    bool prune_false = true;
};

/// Descends from `start`: Exact concepts yield their alpha-summary and stop
/// the descent, Indecision concepts recurse into their children, False ones
/// yield nothing. Sorted by sd desc, level asc, concept id asc; equal member
/// mappings keep only their first entry.
std::vector<AlphaSummary> pertinent_result(const FuzzyFormalContext& ctx, const ConceptLattice& lattice,
                                           ConceptId start, std::size_t level, double alpha,
                                           const NormalizedQuery& query, EvaluationOptions options = {});

struct ResultList {
    double alpha = 0.0;
    std::optional<std::size_t> k;
    /// Pertinent summaries before truncation to k.
    std::size_t available = 0;
    std::vector<AlphaSummary> summaries;
};

/// Top-k alpha-summaries from the lattice top. Throws ValidationError when
/// the lattice was not built over `ctx`.
ResultList fuzzy_k_query(const FuzzyFormalContext& ctx, const ConceptLattice& lattice, std::optional<std::size_t> k,
                         double alpha, const NormalizedQuery& query, EvaluationOptions options = {});
/// Uses the query's own k and alpha.
ResultList fuzzy_k_query(const FuzzyFormalContext& ctx, const ConceptLattice& lattice, const NormalizedQuery& query,
                         EvaluationOptions options = {});

nlohmann::json result_to_json(const ResultList& result);
/// Aligned-column rendering, one row per summary.
std::string format_result_table(const ResultList& result);

}  // namespace fsq
