#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsq/context.hpp"

namespace fsq {

/// `attribute IN (label, ...)`
struct Condition {
    std::string attribute;
    std::vector<std::string> labels;

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// Parsed form of
///
///   query := SELECT [DISTINCT] [calib] proj FROM name WHERE cond (AND cond)* ";"
///   calib := INT | NUM | INT NUM
///   proj  := "*" | name ("," name)*
///   cond  := name IN "(" name ("," name)* ")"
struct QueryAst {
    bool distinct = false;
    std::optional<std::size_t> k;
    std::optional<double> alpha;
    /// Empty optional stands for `*`.
    std::optional<std::vector<std::string>> projection;
    std::string relation;
    std::vector<Condition> conditions;

    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

/// Throws QueryError with a 1-based line/column and the set of tokens that
/// would have been accepted.
QueryAst parse_query(std::string_view text);

/// Canonical single-line text; parse_query(pretty_print(ast)) == ast.
std::string pretty_print(const QueryAst& ast);

/// One conjunct of the alpha-cut proposition: the object passes when any of
/// `labels` (flattened vocabulary indices) reaches alpha.
struct Clause {
    std::size_t attribute;
    std::vector<std::size_t> labels;

    friend bool operator==(const Clause&, const Clause&) = default;
};

struct NormalizedQuery {
    std::string relation;
    bool distinct = false;
    /// Condition attributes, vocabulary order. Includes vacuous ones.
    std::vector<std::string> inputs;
    /// Projected attributes that are not inputs, vocabulary order.
    std::vector<std::string> outputs;
    /// Conditions naming every label of a multi-label attribute; they constrain nothing.
    std::vector<std::string> vacuous;
    /// Required characteristics per non-vacuous input attribute (canonical label names).
    std::map<std::string, std::vector<std::string>> required;
    double alpha = 0.0;
    bool alpha_is_default = false;
    /// Unset means unlimited.
    std::optional<std::size_t> k;
    std::vector<Clause> proposition;

    friend bool operator==(const NormalizedQuery&, const NormalizedQuery&) = default;
};

/// 1 / (largest label count among the clause attributes). Throws
/// PreconditionError for an empty clause list.
double default_alpha(std::span<const Clause> clauses, const LinguisticVocabulary& vocab);

/// Resolves names against `vocab`. When `relation` is non-empty the query
/// must name it. Throws QueryError (line/column 0) on unknown relation,
/// attribute or label, or when every condition is vacuous and no alpha is given.
NormalizedQuery normalize(const QueryAst& ast, const LinguisticVocabulary& vocab, std::string_view relation = {});

/// Parse + normalize against a context's vocabulary and relation name.
NormalizedQuery compile_query(std::string_view text, const FuzzyFormalContext& ctx);

/// Human-readable alpha-cut form, e.g.
/// `(0.3-cut(Income.PI) OR 0.3-cut(Income.MI))`.
std::string describe_proposition(const NormalizedQuery& query, const LinguisticVocabulary& vocab);

}  // namespace fsq
