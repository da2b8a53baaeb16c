#include "fsq/context_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fsq/error.hpp"
#include "text_util.hpp"

namespace fsq {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(where, fmt::format("missing field '{}'", key));
    }
    return obj.at(key);
}

std::string require_string(const json& value, const std::string& where)
{
    if (!value.is_string()) {
        throw ValidationError(where, "expected a string");
    }
    return value.get<std::string>();
}

double require_number(const json& value, const std::string& where)
{
    if (!value.is_number()) {
        throw ValidationError(where, "expected a number");
    }
    return value.get<double>();
}

Label parse_label(const json& value, const std::string& where)
{
    if (value.is_string()) {
        return {value.get<std::string>(), {}};
    }
    Label label{require_string(require(value, "name", where), where + ".name"), {}};
    if (value.contains("aliases")) {
        const auto& aliases = value.at("aliases");
        if (!aliases.is_array()) {
            throw ValidationError(where + ".aliases", "expected a list");
        }
        for (std::size_t i = 0; i < aliases.size(); ++i) {
            label.aliases.push_back(require_string(aliases[i], fmt::format("{}.aliases[{}]", where, i)));
        }
    }
    return label;
}

}  // namespace

FuzzyFormalContext context_from_json(const json& doc)
{
    if (!doc.is_object()) {
        throw ValidationError("", "context document must be an object");
    }
    std::string relation;
    if (doc.contains("relation")) {
        relation = require_string(doc.at("relation"), "relation");
    }
    double threshold = FuzzyFormalContext::default_threshold;
    if (doc.contains("threshold")) {
        threshold = require_number(doc.at("threshold"), "threshold");
    }

    const auto& attrs = require(doc, "attributes", "");
    if (!attrs.is_array()) {
        throw ValidationError("attributes", "expected a list");
    }
    std::vector<Attribute> attributes;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        std::string where = fmt::format("attributes[{}]", a);
        Attribute attr{require_string(require(attrs[a], "name", where), where + ".name"), {}};
        const auto& labels = require(attrs[a], "labels", where);
        if (!labels.is_array()) {
            throw ValidationError(where + ".labels", "expected a list");
        }
        for (std::size_t j = 0; j < labels.size(); ++j) {
            attr.labels.push_back(parse_label(labels[j], fmt::format("{}.labels[{}]", where, j)));
        }
        attributes.push_back(std::move(attr));
    }
    LinguisticVocabulary vocab(std::move(attributes));

    const auto& tuples = require(doc, "tuples", "");
    if (!tuples.is_array()) {
        throw ValidationError("tuples", "expected a list");
    }
    std::vector<std::string> objects;
    std::vector<double> degrees(tuples.size() * vocab.label_count(), 0.0);
    for (std::size_t g = 0; g < tuples.size(); ++g) {
        std::string where = fmt::format("tuples[{}]", g);
        objects.push_back(require_string(require(tuples[g], "id", where), where + ".id"));
        if (!tuples[g].contains("memberships")) {
            continue;
        }
        const auto& memberships = tuples[g].at("memberships");
        if (!memberships.is_object()) {
            throw ValidationError(where + ".memberships", "expected an object");
        }
        for (const auto& [attr_name, cells] : memberships.items()) {
            std::string attr_where = fmt::format("{}.memberships.{}", where, attr_name);
            auto attribute = vocab.find_attribute(attr_name);
            if (!attribute) {
                throw ValidationError(attr_where, fmt::format("unknown attribute '{}'", attr_name));
            }
            if (!cells.is_object()) {
                throw ValidationError(attr_where, "expected an object of label degrees");
            }
            for (const auto& [label_name, value] : cells.items()) {
                std::string cell_where = attr_where + "." + label_name;
                auto label = vocab.find_label(*attribute, label_name);
                if (!label) {
                    throw ValidationError(cell_where, fmt::format("unknown label '{}'", label_name));
                }
                double d = require_number(value, cell_where);
                if (!(d >= 0.0 && d <= 1.0)) {
                    throw ValidationError(cell_where, fmt::format("degree {} outside [0, 1]", d));
                }
                degrees[g * vocab.label_count() + *label] = d;
            }
        }
    }
    return FuzzyFormalContext(std::move(relation), std::move(vocab), std::move(objects), std::move(degrees),
                              threshold);
}

json context_to_json(const FuzzyFormalContext& ctx)
{
    json doc;
    if (!ctx.relation().empty()) {
        doc["relation"] = ctx.relation();
    }
    doc["threshold"] = ctx.threshold();
    json attrs = json::array();
    for (const auto& attr : ctx.vocabulary().attributes()) {
        json labels = json::array();
        for (const auto& label : attr.labels) {
            if (label.aliases.empty()) {
                labels.push_back(label.name);
            } else {
                labels.push_back({{"name", label.name}, {"aliases", label.aliases}});
            }
        }
        attrs.push_back({{"name", attr.name}, {"labels", labels}});
    }
    doc["attributes"] = attrs;
    json tuples = json::array();
    const auto& vocab = ctx.vocabulary();
    for (std::size_t g = 0; g < ctx.object_count(); ++g) {
        json memberships = json::object();
        for (std::size_t m = 0; m < ctx.label_count(); ++m) {
            double d = ctx.degree(g, m);
            if (d > 0.0) {
                const auto& ref = vocab.label(m);
                memberships[ref.attribute][ref.label] = d;
            }
        }
        tuples.push_back({{"id", ctx.objects()[g]}, {"memberships", memberships}});
    }
    doc["tuples"] = tuples;
    return doc;
}

FuzzyFormalContext context_from_table(std::string_view text, std::string relation, double threshold)
{
    auto lines = detail::split_lines(text);
    std::size_t header_line = 0;
    while (header_line < lines.size() && detail::trim(lines[header_line]).empty()) {
        ++header_line;
    }
    if (header_line == lines.size()) {
        throw ValidationError("line 1", "missing header row");
    }
    auto header = detail::split_csv_row(lines[header_line]);
    if (header.empty() || header[0] != "id") {
        throw ValidationError(fmt::format("line {}", header_line + 1), "header must start with 'id'");
    }

    // columns in header order; attributes in order of first appearance
    std::vector<Attribute> attributes;
    std::vector<std::pair<std::size_t, std::size_t>> columns;  // (attribute, position within attribute)
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto& cell = header[c];
        auto dot = cell.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == cell.size()) {
            throw ValidationError(fmt::format("line {}, column {}", header_line + 1, c + 1),
                                  fmt::format("header cell '{}' is not of the form attribute.label", cell));
        }
        std::string attr_name = cell.substr(0, dot);
        std::string label_name = cell.substr(dot + 1);
        auto it = std::find_if(attributes.begin(), attributes.end(),
                               [&](const Attribute& a) { return a.name == attr_name; });
        if (it == attributes.end()) {
            attributes.push_back({attr_name, {}});
            it = std::prev(attributes.end());
        }
        it->labels.push_back({label_name, {}});
        columns.emplace_back(static_cast<std::size_t>(it - attributes.begin()), it->labels.size() - 1);
    }
    LinguisticVocabulary vocab(std::move(attributes));

    std::vector<std::string> objects;
    std::vector<double> degrees;
    for (std::size_t line = header_line + 1; line < lines.size(); ++line) {
        if (detail::trim(lines[line]).empty()) {
            continue;
        }
        auto cells = detail::split_csv_row(lines[line]);
        if (cells.size() > header.size()) {
            throw ValidationError(fmt::format("line {}", line + 1),
                                  fmt::format("{} cells, header has {}", cells.size(), header.size()));
        }
        cells.resize(header.size());
        objects.push_back(cells[0]);
        std::size_t base = degrees.size();
        degrees.resize(base + vocab.label_count(), 0.0);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                continue;
            }
            auto [attribute, position] = columns[c - 1];
            std::string where = fmt::format("line {}, column {}", line + 1, header[c]);
            auto value = detail::parse_double(cells[c]);
            if (!value) {
                throw ValidationError(where, fmt::format("'{}' is not a number", cells[c]));
            }
            if (!(*value >= 0.0 && *value <= 1.0)) {
                throw ValidationError(where, fmt::format("degree {} outside [0, 1]", *value));
            }
            degrees[base + vocab.label_range(attribute).first + position] = *value;
        }
    }
    return FuzzyFormalContext(std::move(relation), std::move(vocab), std::move(objects), std::move(degrees),
                              threshold);
}

FuzzyFormalContext load_context(std::string_view text)
{
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError(fmt::format("byte {}", e.byte), "malformed JSON document");
        }
        return context_from_json(doc);
    }
    return context_from_table(text);
}

FuzzyFormalContext load_context_file(const std::filesystem::path& path)
{
    std::string text = read_text_file(path);
    try {
        return load_context(text);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + (e.location().empty() ? "" : ": " + e.location()), e.message());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(path.string(), "cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace fsq
