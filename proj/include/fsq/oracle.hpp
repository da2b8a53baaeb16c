#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsq/context.hpp"
#include "fsq/sqlf.hpp"

namespace fsq {

/// Reference semantics by full tuple scan. Each clause is the max over its
/// labels, clauses combine by min; no clauses gives 1.
double tuple_satisfaction(const FuzzyFormalContext& ctx, std::size_t object, const NormalizedQuery& query);
/// Throws LookupError for an unknown id.
double tuple_satisfaction(const FuzzyFormalContext& ctx, std::string_view object, const NormalizedQuery& query);

struct OracleAnswer {
    double alpha = 0.0;
    /// (object id, satisfaction degree), context order; every degree >= alpha.
    std::vector<std::pair<std::string, double>> members;
};

OracleAnswer brute_force_answer(const FuzzyFormalContext& ctx, const NormalizedQuery& query);

}  // namespace fsq
