#include "fsq/engine.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fsq/error.hpp"
#include "fsq/oracle.hpp"

namespace fsq {

std::string_view to_string(Correspondence verdict)
{
    switch (verdict) {
        case Correspondence::Exact: return "Exact";
        case Correspondence::False: return "False";
        case Correspondence::Indecision: return "Indecision";
    }
    return "?";
}

Correspondence coresp(const FuzzyFormalContext& ctx, const FuzzyConcept& node, const NormalizedQuery& query,
                      double alpha)
{
    bool cut_nonempty = false;
    bool cut_all_pass = true;
    bool any_pass = false;
    for (auto g = node.extent.find_first(); g != ObjectSet::npos; g = node.extent.find_next(g)) {
        bool passes = tuple_satisfaction(ctx, g, query) >= alpha;
        any_pass = any_pass || passes;
        if (node.degrees[g] >= alpha) {
            cut_nonempty = true;
            cut_all_pass = cut_all_pass && passes;
        }
    }
    if (cut_nonempty && cut_all_pass) {
        return Correspondence::Exact;
    }
    return any_pass ? Correspondence::Indecision : Correspondence::False;
}

Correspondence coresp(const FuzzyFormalContext& ctx, const FuzzyConcept& node, const NormalizedQuery& query)
{
    return coresp(ctx, node, query, query.alpha);
}

AlphaSummary alpha_summary(const ConceptLattice& lattice, ConceptId id, double alpha)
{
    const auto& node = lattice.at(id);
    AlphaSummary summary;
    summary.concept_id = id;
    summary.alpha = alpha;
    summary.sd = lattice.satisfaction_degree(id);
    summary.level = node.level;
    for (auto m = node.intent.find_first(); m != LabelSet::npos; m = node.intent.find_next(m)) {
        summary.intent.push_back(lattice.labels()[m]);
    }
    for (auto g = node.extent.find_first(); g != ObjectSet::npos; g = node.extent.find_next(g)) {
        if (node.degrees[g] >= alpha) {
            summary.members.push_back({g, lattice.objects()[g], node.degrees[g], std::nullopt});
        }
    }
    return summary;
}

namespace {

bool ranks_before(const AlphaSummary& a, const AlphaSummary& b)
{
    if (a.sd != b.sd) {
        return a.sd > b.sd;
    }
    if (a.level != b.level) {
        return a.level < b.level;
    }
    return a.concept_id < b.concept_id;
}

bool same_members(const AlphaSummary& a, const AlphaSummary& b)
{
    return std::equal(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                      [](const SummaryMember& x, const SummaryMember& y) {
                          return x.object == y.object && x.concept_degree == y.concept_degree;
                      });
}

}  // namespace

std::vector<AlphaSummary> pertinent_result(const FuzzyFormalContext& ctx, const ConceptLattice& lattice,
                                           ConceptId start, std::size_t level, double alpha,
                                           const NormalizedQuery& query, EvaluationOptions options)
{
    lattice.at(start);
    const auto& vocab = ctx.vocabulary();
    std::vector<bool> is_output(vocab.attribute_count(), false);
    for (const auto& name : query.outputs) {
        if (auto a = vocab.find_attribute(name)) {
            is_output[*a] = true;
        }
    }

    std::vector<AlphaSummary> found;
    std::vector<bool> seen(lattice.size(), false);
    // Breadth first, so each concept is classified once at its smallest depth.
    std::deque<std::pair<ConceptId, std::size_t>> queue{{start, level}};
    seen[start] = true;
    while (!queue.empty()) {
        auto [id, depth] = queue.front();
        queue.pop_front();
        auto verdict = coresp(ctx, lattice.at(id), query, alpha);
        if (verdict == Correspondence::Exact) {
            auto summary = alpha_summary(lattice, id, alpha);
            summary.level = depth;
            for (auto& member : summary.members) {
                member.satisfaction = tuple_satisfaction(ctx, member.object, query);
            }
            const auto& intent = lattice.at(id).intent;
            for (auto m = intent.find_first(); m != LabelSet::npos; m = intent.find_next(m)) {
                auto a = vocab.attribute_of(m);
                if (is_output[a]) {
                    summary.output_description[vocab.attributes()[a].name].push_back(vocab.label(m).label);
                }
            }
            found.push_back(std::move(summary));
            continue;
        }
        if (verdict == Correspondence::False && options.prune_false) {
            continue;
        }
        for (ConceptId child : lattice.children(id)) {
            if (!seen[child]) {
                seen[child] = true;
                queue.emplace_back(child, depth + 1);
            }
        }
    }

    std::sort(found.begin(), found.end(), ranks_before);
    std::vector<AlphaSummary> unique;
    for (auto& summary : found) {
        bool duplicate = std::any_of(unique.begin(), unique.end(),
                                     [&](const AlphaSummary& kept) { return same_members(kept, summary); });
        if (!duplicate) {
            unique.push_back(std::move(summary));
        }
    }
    return unique;
}

ResultList fuzzy_k_query(const FuzzyFormalContext& ctx, const ConceptLattice& lattice, std::optional<std::size_t> k,
                         double alpha, const NormalizedQuery& query, EvaluationOptions options)
{
    check_compatible(ctx, lattice);
    if (k && *k == 0) {
        throw PreconditionError("k must be positive");
    }
    ResultList result;
    result.alpha = alpha;
    result.k = k;
    result.summaries = pertinent_result(ctx, lattice, lattice.top_id(), 0, alpha, query, options);
    result.available = result.summaries.size();
    if (k && result.summaries.size() > *k) {
        result.summaries.resize(*k);
    }
    return result;
}

ResultList fuzzy_k_query(const FuzzyFormalContext& ctx, const ConceptLattice& lattice, const NormalizedQuery& query,
                         EvaluationOptions options)
{
    return fuzzy_k_query(ctx, lattice, query.k, query.alpha, query, options);
}

nlohmann::json result_to_json(const ResultList& result)
{
    using nlohmann::json;
    json doc;
    doc["alpha"] = result.alpha;
    doc["k"] = result.k ? json(*result.k) : json(nullptr);
    doc["available"] = result.available;
    json rows = json::array();
    for (std::size_t i = 0; i < result.summaries.size(); ++i) {
        const auto& s = result.summaries[i];
        json intent = json::array();
        for (const auto& ref : s.intent) {
            intent.push_back(ref.str());
        }
        json members = json::array();
        for (const auto& m : s.members) {
            members.push_back({{"id", m.id},
                               {"concept_degree", m.concept_degree},
                               {"satisfaction_degree", m.satisfaction ? json(*m.satisfaction) : json(nullptr)}});
        }
        rows.push_back({{"rank", i + 1},
                        {"concept_id", s.concept_id},
                        {"intent", intent},
                        {"output_description", s.output_description},
                        {"sd", s.sd},
                        {"level", s.level},
                        {"members", members}});
    }
    doc["results"] = rows;
    return doc;
}

std::string format_result_table(const ResultList& result)
{
    struct Row {
        std::string rank, concept_id, sd, intent, output, members;
    };
    std::vector<Row> rows{{"rank", "concept", "sd", "intent", "output", "members"}};
    for (std::size_t i = 0; i < result.summaries.size(); ++i) {
        const auto& s = result.summaries[i];
        std::vector<std::string> intent;
        for (const auto& ref : s.intent) {
            intent.push_back(ref.str());
        }
        std::vector<std::string> output;
        for (const auto& [attr, labels] : s.output_description) {
            output.push_back(fmt::format("{}={}", attr, fmt::join(labels, "|")));
        }
        std::vector<std::string> members;
        for (const auto& m : s.members) {
            members.push_back(m.satisfaction ? fmt::format("{}:{:g}({:g})", m.id, m.concept_degree, *m.satisfaction)
                                             : fmt::format("{}:{:g}", m.id, m.concept_degree));
        }
        rows.push_back({std::to_string(i + 1), fmt::format("c{}", s.concept_id), fmt::format("{:.4f}", s.sd),
                        fmt::format("{{{}}}", fmt::join(intent, ", ")),
                        output.empty() ? "-" : fmt::format("{}", fmt::join(output, " ")),
                        fmt::format("{{{}}}", fmt::join(members, ", "))});
    }
    std::size_t w[5] = {};
    for (const auto& r : rows) {
        w[0] = std::max(w[0], r.rank.size());
        w[1] = std::max(w[1], r.concept_id.size());
        w[2] = std::max(w[2], r.sd.size());
        w[3] = std::max(w[3], r.intent.size());
        w[4] = std::max(w[4], r.output.size());
    }
    std::string out;
    for (const auto& r : rows) {
        out += fmt::format("{:<{}}  {:<{}}  {:<{}}  {:<{}}  {:<{}}  {}\n", r.rank, w[0], r.concept_id, w[1], r.sd, w[2],
                           r.intent, w[3], r.output, w[4], r.members);
    }
    if (result.summaries.empty()) {
        out += "(no summary satisfies the query)\n";
    }
    return out;
}

}  // namespace fsq
