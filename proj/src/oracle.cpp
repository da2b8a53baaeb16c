#include "fsq/oracle.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "fsq/error.hpp"

namespace fsq {

double tuple_satisfaction(const FuzzyFormalContext& ctx, std::size_t object, const NormalizedQuery& query)
{
    if (object >= ctx.object_count()) {
        throw LookupError(fmt::format("object index {} out of range", object));
    }
    double result = 1.0;
    for (const auto& clause : query.proposition) {
        double best = 0.0;
        for (auto m : clause.labels) {
            best = std::max(best, ctx.degree(object, m));
        }
        result = std::min(result, best);
    }
    return result;
}

double tuple_satisfaction(const FuzzyFormalContext& ctx, std::string_view object, const NormalizedQuery& query)
{
    return tuple_satisfaction(ctx, ctx.object_index(object), query);
}

OracleAnswer brute_force_answer(const FuzzyFormalContext& ctx, const NormalizedQuery& query)
{
    OracleAnswer answer;
    answer.alpha = query.alpha;
    for (std::size_t g = 0; g < ctx.object_count(); ++g) {
        double s = tuple_satisfaction(ctx, g, query);
        if (s >= query.alpha) {
            answer.members.emplace_back(ctx.objects()[g], s);
        }
    }
    return answer;
}

}  // namespace fsq
