#include <cmath>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "fsq/error.hpp"
#include "fsq/lattice.hpp"

namespace fsq {

using nlohmann::json;

json lattice_to_json(const ConceptLattice& lattice)
{
    json doc;
    doc["threshold"] = lattice.threshold();
    doc["objects"] = lattice.objects();
    json labels = json::array();
    for (const auto& ref : lattice.labels()) {
        labels.push_back({{"attribute", ref.attribute}, {"label", ref.label}});
    }
    doc["labels"] = labels;
    json concepts = json::array();
    for (const auto& c : lattice.concepts()) {
        json intent = json::array();
        for (auto m = c.intent.find_first(); m != LabelSet::npos; m = c.intent.find_next(m)) {
            intent.push_back(lattice.labels()[m].str());
        }
        json extent = json::array();
        for (auto g = c.extent.find_first(); g != ObjectSet::npos; g = c.extent.find_next(g)) {
            extent.push_back({{"id", lattice.objects()[g]}, {"degree", c.degrees[g]}});
        }
        concepts.push_back({{"id", c.id},
                            {"intent", intent},
                            {"extent", extent},
                            {"level", c.level},
                            {"sd", lattice.satisfaction_degree(c.id)}});
    }
    doc["concepts"] = concepts;
    json edges = json::array();
    for (const auto& e : lattice.edges()) {
        edges.push_back({{"parent", e.parent}, {"child", e.child}, {"score", e.score}});
    }
    doc["edges"] = edges;
    return doc;
}

namespace {

const json& field(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(where, fmt::format("missing field '{}'", key));
    }
    return obj.at(key);
}

template <typename T>
T as(const json& value, const std::string& where)
{
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where, "unexpected value type");
    }
}

std::size_t as_index(const json& value, const std::string& where)
{
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        throw ValidationError(where, "expected a non-negative integer");
    }
    return value.get<std::size_t>();
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9; }

}  // namespace

ConceptLattice lattice_from_json(const json& doc)
{
    double threshold = as<double>(field(doc, "threshold", ""), "threshold");
    auto objects = as<std::vector<std::string>>(field(doc, "objects", ""), "objects");
    std::map<std::string, std::size_t> object_index;
    for (std::size_t g = 0; g < objects.size(); ++g) {
        if (!object_index.emplace(objects[g], g).second) {
            throw ValidationError("objects", fmt::format("duplicate object '{}'", objects[g]));
        }
    }

    std::vector<LabelRef> labels;
    std::map<std::string, std::size_t> label_index;
    const auto& label_docs = field(doc, "labels", "");
    for (std::size_t m = 0; m < label_docs.size(); ++m) {
        std::string where = fmt::format("labels[{}]", m);
        LabelRef ref{as<std::string>(field(label_docs[m], "attribute", where), where),
                     as<std::string>(field(label_docs[m], "label", where), where)};
        if (!label_index.emplace(ref.str(), m).second) {
            throw ValidationError(where, fmt::format("duplicate label '{}'", ref.str()));
        }
        labels.push_back(std::move(ref));
    }

    const auto& concept_docs = field(doc, "concepts", "");
    std::vector<FuzzyConcept> concepts;
    std::vector<double> stored_sd;
    std::vector<std::size_t> stored_level;
    for (std::size_t i = 0; i < concept_docs.size(); ++i) {
        std::string where = fmt::format("concepts[{}]", i);
        const auto& cd = concept_docs[i];
        FuzzyConcept c;
        c.id = as_index(field(cd, "id", where), where + ".id");
        c.intent = LabelSet(labels.size());
        c.extent = ObjectSet(objects.size());
        c.degrees.assign(objects.size(), 0.0);
        for (const auto& name : field(cd, "intent", where)) {
            auto it = label_index.find(as<std::string>(name, where + ".intent"));
            if (it == label_index.end()) {
                throw ValidationError(where + ".intent", fmt::format("unknown label {}", name.dump()));
            }
            c.intent.set(it->second);
        }
        for (const auto& member : field(cd, "extent", where)) {
            auto id = as<std::string>(field(member, "id", where + ".extent"), where + ".extent");
            auto it = object_index.find(id);
            if (it == object_index.end()) {
                throw ValidationError(where + ".extent", fmt::format("unknown object '{}'", id));
            }
            double degree = as<double>(field(member, "degree", where + ".extent"), where + ".extent");
            if (!(degree >= 0.0 && degree <= 1.0)) {
                throw ValidationError(where + ".extent", fmt::format("degree {} outside [0, 1]", degree));
            }
            c.extent.set(it->second);
            c.degrees[it->second] = degree;
        }
        stored_level.push_back(as_index(field(cd, "level", where), where + ".level"));
        stored_sd.push_back(as<double>(field(cd, "sd", where), where + ".sd"));
        concepts.push_back(std::move(c));
    }

    std::vector<std::vector<ConceptId>> children(concepts.size());
    std::vector<std::tuple<ConceptId, ConceptId, double>> stored_edges;
    const auto& edge_docs = field(doc, "edges", "");
    for (std::size_t i = 0; i < edge_docs.size(); ++i) {
        std::string where = fmt::format("edges[{}]", i);
        auto parent = as_index(field(edge_docs[i], "parent", where), where + ".parent");
        auto child = as_index(field(edge_docs[i], "child", where), where + ".child");
        if (parent >= concepts.size() || child >= concepts.size()) {
            throw ValidationError(where, "edge references an unknown concept");
        }
        children[parent].push_back(child);
        stored_edges.emplace_back(parent, child, as<double>(field(edge_docs[i], "score", where), where + ".score"));
    }

    ConceptLattice lattice(std::move(objects), std::move(labels), threshold, std::move(concepts),
                           std::move(children));
    for (const auto& c : lattice.concepts()) {
        if (c.level != stored_level[c.id] || !close(lattice.satisfaction_degree(c.id), stored_sd[c.id])) {
            throw ValidationError(fmt::format("concepts[{}]", c.id), "stored level or sd disagrees with the edges");
        }
    }
    for (const auto& [parent, child, score] : stored_edges) {
        if (!close(lattice.edge_score(parent, child), score)) {
            throw ValidationError(fmt::format("edge {} -> {}", parent, child), "stored score disagrees with extents");
        }
    }
    return lattice;
}

namespace {

std::string dot_escape(std::string_view text)
{
    std::string out;
    for (char ch : text) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch;
    }
    return out;
}

}  // namespace

void write_dot(std::ostream& out, const ConceptLattice& lattice)
{
    out << "digraph lattice {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box];\n";
    for (const auto& c : lattice.concepts()) {
        std::string intent;
        for (auto m = c.intent.find_first(); m != LabelSet::npos; m = c.intent.find_next(m)) {
            intent += (intent.empty() ? "" : ", ") + lattice.labels()[m].str();
        }
        std::string extent;
        for (auto g = c.extent.find_first(); g != ObjectSet::npos; g = c.extent.find_next(g)) {
            extent += fmt::format("{}{}:{:.2f}", extent.empty() ? "" : " ", lattice.objects()[g], c.degrees[g]);
        }
        out << fmt::format("  c{} [label=\"{{{}}}\\n{}\"];\n", c.id, dot_escape(intent), dot_escape(extent));
    }
    for (const auto& e : lattice.edges()) {
        out << fmt::format("  c{} -> c{} [label=\"{:.2f}\"];\n", e.parent, e.child, e.score);
    }
    out << "}\n";
}

}  // namespace fsq
