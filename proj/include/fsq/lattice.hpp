#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsq/context.hpp"

namespace fsq {

using ConceptId = std::size_t;

/// A formal concept of the T-thresholded context, decorated with the fuzzy
/// membership of each extent object (min over the intent, 1 for an empty intent).
struct FuzzyConcept {
    ConceptId id = 0;
    LabelSet intent;
    ObjectSet extent;
    /// One entry per context object; 0 outside the extent.
    std::vector<double> degrees;
    /// Longest covering-path distance from the top concept.
    std::size_t level = 0;

    double degree(std::size_t object) const { return degrees[object]; }

    friend bool operator==(const FuzzyConcept&, const FuzzyConcept&) = default;
};

struct Edge {
    ConceptId parent;
    ConceptId child;
    double score;
};

/// Concepts ordered by the covering relation (parent -> child, child is the
/// sub-concept), with per-edge fuzzy scores and per-concept satisfaction
/// degrees. Immutable after construction.
class ConceptLattice {
  public:
    ConceptLattice() = default;

    /// `children[i]` lists the lower covers of `concepts[i]`; concept ids
    /// must equal their positions. Levels, edge scores and satisfaction
    /// degrees are derived here. Throws ValidationError if the edges contain
    /// a cycle or the order has no unique top or bottom.
    ConceptLattice(std::vector<std::string> objects, std::vector<LabelRef> labels, double threshold,
                   std::vector<FuzzyConcept> concepts, std::vector<std::vector<ConceptId>> children);

    const std::vector<std::string>& objects() const noexcept { return objects_; }
    const std::vector<LabelRef>& labels() const noexcept { return labels_; }
    double threshold() const noexcept { return threshold_; }

    std::size_t size() const noexcept { return concepts_.size(); }
    std::span<const FuzzyConcept> concepts() const noexcept { return concepts_; }
    /// Throws LookupError for an unknown id.
    const FuzzyConcept& at(ConceptId id) const;

    ConceptId top_id() const noexcept { return top_; }
    ConceptId bottom_id() const noexcept { return bottom_; }
    const FuzzyConcept& top() const { return concepts_[top_]; }
    const FuzzyConcept& bottom() const { return concepts_[bottom_]; }

    std::span<const ConceptId> parents(ConceptId id) const;
    std::span<const ConceptId> children(ConceptId id) const;

    std::size_t edge_count() const noexcept;
    std::vector<Edge> edges() const;
    /// Throws LookupError if (parent, child) is not a covering edge.
    double edge_score(ConceptId parent, ConceptId child) const;
    double satisfaction_degree(ConceptId id) const;

    friend bool operator==(const ConceptLattice& a, const ConceptLattice& b);

  private:
    std::vector<std::string> objects_;
    std::vector<LabelRef> labels_;
    double threshold_ = 0.0;
    std::vector<FuzzyConcept> concepts_;
    std::vector<std::vector<ConceptId>> children_;
    std::vector<std::vector<ConceptId>> parents_;
    std::vector<std::vector<double>> child_scores_;
    std::vector<double> sd_;
    ConceptId top_ = 0;
    ConceptId bottom_ = 0;
};

/// All concepts of the thresholded context (closure enumeration in lectic
/// order), ids assigned by lexicographic order of intents.
ConceptLattice build_lattice(const FuzzyFormalContext& ctx);

/// Fuzzy Jaccard of two extents: sum of min over sum of max; 1 when both are empty.
double fuzzy_score(const FuzzyConcept& a, const FuzzyConcept& b);

/// Max over top-to-concept covering paths of the summed edge scores.
double satisfaction_degree(const ConceptLattice& lattice, ConceptId id);

struct Neighbors {
    std::vector<ConceptId> parents;
    std::vector<ConceptId> children;
};

Neighbors navigate(const ConceptLattice& lattice, ConceptId id);

/// Structured export: objects, labels, concepts {id, intent, extent, level, sd}
/// and edges {parent, child, score}.
nlohmann::json lattice_to_json(const ConceptLattice& lattice);
/// Inverse of lattice_to_json; stored levels, scores and sd must agree with
/// the recomputed ones.
ConceptLattice lattice_from_json(const nlohmann::json& doc);

/// Graphviz rendering: intent as node label, edge score as edge label.
void write_dot(std::ostream& out, const ConceptLattice& lattice);

/// Throws ValidationError unless `lattice` was built over the objects and
/// labels of `ctx`.
void check_compatible(const FuzzyFormalContext& ctx, const ConceptLattice& lattice);

}  // namespace fsq
