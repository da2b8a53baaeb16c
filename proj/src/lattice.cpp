#include "fsq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include <fmt/format.h>

#include "fsq/error.hpp"

namespace fsq {

namespace {

std::vector<std::size_t> members(const IndexSet& set)
{
    std::vector<std::size_t> out;
    for (auto i = set.find_first(); i != IndexSet::npos; i = set.find_next(i)) {
        out.push_back(i);
    }
    return out;
}

LabelSet closure(const FuzzyFormalContext& ctx, const LabelSet& labels)
{
    return derive_intent(ctx, derive_extent(ctx, labels));
}

/// Ganter's NextClosure over the label side; returns every closed intent.
std::vector<LabelSet> enumerate_intents(const FuzzyFormalContext& ctx)
{
    const std::size_t m = ctx.label_count();
    std::vector<LabelSet> intents;
    LabelSet current = closure(ctx, LabelSet(m));
    intents.push_back(current);
    while (true) {
        bool advanced = false;
        for (std::size_t i = m; i-- > 0;) {
            if (current.test(i)) {
                continue;
            }
            LabelSet prefix = current;
            for (std::size_t j = i; j < m; ++j) {
                prefix.reset(j);
            }
            LabelSet candidate = prefix;
            candidate.set(i);
            candidate = closure(ctx, candidate);
            // canonicity: the closure adds nothing below i
            bool canonical = true;
            for (std::size_t j = 0; j < i && canonical; ++j) {
                canonical = candidate.test(j) == prefix.test(j);
            }
            if (canonical) {
                current = std::move(candidate);
                intents.push_back(current);
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            break;
        }
    }
    return intents;
}

}  // namespace

ConceptLattice::ConceptLattice(std::vector<std::string> objects, std::vector<LabelRef> labels, double threshold,
                               std::vector<FuzzyConcept> concepts, std::vector<std::vector<ConceptId>> children)
    : objects_(std::move(objects)),
      labels_(std::move(labels)),
      threshold_(threshold),
      concepts_(std::move(concepts)),
      children_(std::move(children))
{
    const std::size_t n = concepts_.size();
    if (n == 0) {
        throw ValidationError("concepts", "a lattice has at least one concept");
    }
    if (children_.size() != n) {
        throw ValidationError("edges", "adjacency size does not match concept count");
    }
    parents_.assign(n, {});
    for (ConceptId id = 0; id < n; ++id) {
        const auto& c = concepts_[id];
        if (c.id != id) {
            throw ValidationError(fmt::format("concepts[{}]", id), "concept id does not match its position");
        }
        if (c.degrees.size() != objects_.size() || c.extent.size() != objects_.size() ||
            c.intent.size() != labels_.size()) {
            throw ValidationError(fmt::format("concepts[{}]", id), "extent or intent size mismatch");
        }
        std::sort(children_[id].begin(), children_[id].end());
        if (std::adjacent_find(children_[id].begin(), children_[id].end()) != children_[id].end()) {
            throw ValidationError(fmt::format("concepts[{}]", id), "duplicate edge");
        }
        for (ConceptId child : children_[id]) {
            if (child >= n || child == id) {
                throw ValidationError(fmt::format("concepts[{}]", id), fmt::format("invalid child {}", child));
            }
            parents_[child].push_back(id);
        }
    }
    for (auto& p : parents_) {
        std::sort(p.begin(), p.end());
    }

    std::vector<ConceptId> tops;
    std::vector<ConceptId> bottoms;
    for (ConceptId id = 0; id < n; ++id) {
        if (parents_[id].empty()) {
            tops.push_back(id);
        }
        if (children_[id].empty()) {
            bottoms.push_back(id);
        }
    }
    if (tops.size() != 1 || bottoms.size() != 1) {
        throw ValidationError("edges", fmt::format("order has {} maximal and {} minimal concepts; expected one each",
                                                   tops.size(), bottoms.size()));
    }
    top_ = tops.front();
    bottom_ = bottoms.front();

    // Kahn's order from the top; levels are longest path lengths.
    std::vector<std::size_t> pending(n);
    for (ConceptId id = 0; id < n; ++id) {
        pending[id] = parents_[id].size();
    }
    std::vector<ConceptId> order;
    std::deque<ConceptId> ready{top_};
    while (!ready.empty()) {
        ConceptId id = ready.front();
        ready.pop_front();
        order.push_back(id);
        for (ConceptId child : children_[id]) {
            if (--pending[child] == 0) {
                ready.push_back(child);
            }
        }
    }
    if (order.size() != n) {
        throw ValidationError("edges", "covering relation contains a cycle");
    }

    child_scores_.assign(n, {});
    sd_.assign(n, 0.0);
    for (auto& c : concepts_) {
        c.level = 0;
    }
    for (ConceptId id : order) {
        auto& scores = child_scores_[id];
        for (ConceptId child : children_[id]) {
            double score = fuzzy_score(concepts_[id], concepts_[child]);
            scores.push_back(score);
            concepts_[child].level = std::max(concepts_[child].level, concepts_[id].level + 1);
        }
    }
    for (ConceptId id : order) {
        if (id == top_) {
            continue;
        }
        double best = -1.0;
        for (ConceptId parent : parents_[id]) {
            best = std::max(best, sd_[parent] + edge_score(parent, id));
        }
        sd_[id] = best;
    }
}

const FuzzyConcept& ConceptLattice::at(ConceptId id) const
{
    if (id >= concepts_.size()) {
        throw LookupError(fmt::format("unknown concept id {}", id));
    }
    return concepts_[id];
}

std::span<const ConceptId> ConceptLattice::parents(ConceptId id) const
{
    at(id);
    return parents_[id];
}

std::span<const ConceptId> ConceptLattice::children(ConceptId id) const
{
    at(id);
    return children_[id];
}

std::size_t ConceptLattice::edge_count() const noexcept
{
    std::size_t count = 0;
    for (const auto& c : children_) {
        count += c.size();
    }
    return count;
}

std::vector<Edge> ConceptLattice::edges() const
{
    std::vector<Edge> out;
    for (ConceptId parent = 0; parent < children_.size(); ++parent) {
        for (std::size_t k = 0; k < children_[parent].size(); ++k) {
            out.push_back({parent, children_[parent][k], child_scores_[parent][k]});
        }
    }
    return out;
}

double ConceptLattice::edge_score(ConceptId parent, ConceptId child) const
{
    at(parent);
    const auto& kids = children_[parent];
    auto it = std::lower_bound(kids.begin(), kids.end(), child);
    if (it == kids.end() || *it != child) {
        throw LookupError(fmt::format("no covering edge {} -> {}", parent, child));
    }
    return child_scores_[parent][static_cast<std::size_t>(it - kids.begin())];
}

double ConceptLattice::satisfaction_degree(ConceptId id) const
{
    at(id);
    return sd_[id];
}

bool operator==(const ConceptLattice& a, const ConceptLattice& b)
{
    return a.objects_ == b.objects_ && a.labels_ == b.labels_ && a.threshold_ == b.threshold_ &&
           a.concepts_ == b.concepts_ && a.children_ == b.children_;
}

ConceptLattice build_lattice(const FuzzyFormalContext& ctx)
{
    auto intents = enumerate_intents(ctx);
    std::sort(intents.begin(), intents.end(),
              [](const LabelSet& a, const LabelSet& b) { return members(a) < members(b); });

    std::map<LabelSet, ConceptId> by_intent;
    std::vector<FuzzyConcept> concepts;
    for (ConceptId id = 0; id < intents.size(); ++id) {
        FuzzyConcept c;
        c.id = id;
        c.intent = intents[id];
        c.extent = derive_extent(ctx, c.intent);
        c.degrees.assign(ctx.object_count(), 0.0);
        for (auto g = c.extent.find_first(); g != ObjectSet::npos; g = c.extent.find_next(g)) {
            c.degrees[g] = concept_membership(ctx, g, c.intent);
        }
        by_intent.emplace(c.intent, id);
        concepts.push_back(std::move(c));
    }

    // Lower covers of (A, B) are the minimal closures of B + {m}, m not in B.
    std::vector<std::vector<ConceptId>> children(concepts.size());
    for (const auto& c : concepts) {
        std::vector<ConceptId> candidates;
        for (std::size_t m = 0; m < ctx.label_count(); ++m) {
            if (c.intent.test(m)) {
                continue;
            }
            LabelSet next = c.intent;
            next.set(m);
            candidates.push_back(by_intent.at(closure(ctx, next)));
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (ConceptId x : candidates) {
            bool minimal = std::none_of(candidates.begin(), candidates.end(), [&](ConceptId y) {
                return y != x && concepts[y].intent.is_proper_subset_of(concepts[x].intent);
            });
            if (minimal) {
                children[c.id].push_back(x);
            }
        }
    }
    return ConceptLattice(ctx.objects(), ctx.vocabulary().labels(), ctx.threshold(), std::move(concepts),
                          std::move(children));
}

double fuzzy_score(const FuzzyConcept& a, const FuzzyConcept& b)
{
    const std::size_t n = std::max(a.degrees.size(), b.degrees.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
        double x = g < a.degrees.size() ? a.degrees[g] : 0.0;
        double y = g < b.degrees.size() ? b.degrees[g] : 0.0;
        num += std::min(x, y);
        den += std::max(x, y);
    }
    return den == 0.0 ? 1.0 : num / den;
}

double satisfaction_degree(const ConceptLattice& lattice, ConceptId id)
{
    return lattice.satisfaction_degree(id);
}

Neighbors navigate(const ConceptLattice& lattice, ConceptId id)
{
    auto parents = lattice.parents(id);
    auto children = lattice.children(id);
    return {{parents.begin(), parents.end()}, {children.begin(), children.end()}};
}

void check_compatible(const FuzzyFormalContext& ctx, const ConceptLattice& lattice)
{
    if (lattice.objects() != ctx.objects()) {
        throw ValidationError("lattice", "lattice objects differ from the context's tuples");
    }
    if (lattice.labels() != ctx.vocabulary().labels()) {
        throw ValidationError("lattice", "lattice labels differ from the context's vocabulary");
    }
}

}  // namespace fsq
