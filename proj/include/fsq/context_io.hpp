#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fsq/context.hpp"

namespace fsq {

/// Structured form:
///
///   { "relation": "Employees", "threshold": 0.4,
///     "attributes": [ {"name": "Age", "labels": ["YA", {"name": "AA", "aliases": ["Adult"]}]} ],
///     "tuples": [ {"id": "t1", "memberships": {"Age": {"YA": 0.5, "AA": 0.5}}} ] }
///
/// `relation` and `threshold` are optional (threshold defaults to 0.5).
/// Missing membership cells are 0.
FuzzyFormalContext context_from_json(const nlohmann::json& doc);
nlohmann::json context_to_json(const FuzzyFormalContext& ctx);

/// Tabular form: header `id, Attr.label, ...`, one row per tuple, empty cell = 0.
FuzzyFormalContext context_from_table(std::string_view text, std::string relation = {},
                                      double threshold = FuzzyFormalContext::default_threshold);

/// Parses either form; a document whose first non-blank character is `{`
/// is structured, anything else is tabular.
FuzzyFormalContext load_context(std::string_view text);
FuzzyFormalContext load_context_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace fsq
