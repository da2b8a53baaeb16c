#include "fsq/context.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "fsq/error.hpp"

namespace fsq {

LinguisticVocabulary::LinguisticVocabulary(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes))
{
    std::unordered_set<std::string> attribute_names;
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
        const auto& attr = attributes_[a];
        std::string where = fmt::format("attributes[{}]", a);
        if (attr.name.empty()) {
            throw ValidationError(where, "attribute name is empty");
        }
        if (!attribute_names.insert(attr.name).second) {
            throw ValidationError(where, fmt::format("duplicate attribute '{}'", attr.name));
        }
        if (attr.labels.empty()) {
            throw ValidationError(where, fmt::format("attribute '{}' has no labels", attr.name));
        }
        // names and aliases share one namespace per attribute
        std::unordered_set<std::string> spellings;
        for (const auto& label : attr.labels) {
            if (label.name.empty()) {
                throw ValidationError(where, "label name is empty");
            }
            if (!spellings.insert(label.name).second) {
                throw ValidationError(where, fmt::format("duplicate label '{}' in attribute '{}'",
                                                         label.name, attr.name));
            }
        }
        for (const auto& label : attr.labels) {
            for (const auto& alias : label.aliases) {
                if (!spellings.insert(alias).second) {
                    throw ValidationError(where, fmt::format("alias '{}' of label '{}' clashes with another label",
                                                             alias, label.name));
                }
            }
        }
        first_.push_back(flat_.size());
        for (const auto& label : attr.labels) {
            flat_.push_back({attr.name, label.name});
            owner_.push_back(a);
        }
    }
}

std::pair<std::size_t, std::size_t> LinguisticVocabulary::label_range(std::size_t attribute) const
{
    std::size_t begin = first_.at(attribute);
    return {begin, begin + attributes_[attribute].labels.size()};
}

std::optional<std::size_t> LinguisticVocabulary::find_attribute(std::string_view name) const
{
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
        if (attributes_[a].name == name) {
            return a;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> LinguisticVocabulary::find_label(std::size_t attribute, std::string_view name) const
{
    const auto& labels = attributes_.at(attribute).labels;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j].name == name) {
            return first_[attribute] + j;
        }
    }
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const auto& aliases = labels[j].aliases;
        if (std::find(aliases.begin(), aliases.end(), name) != aliases.end()) {
            return first_[attribute] + j;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> LinguisticVocabulary::find_label(const LabelRef& ref) const
{
    auto attribute = find_attribute(ref.attribute);
    if (!attribute) {
        return std::nullopt;
    }
    return find_label(*attribute, ref.label);
}

FuzzyFormalContext::FuzzyFormalContext(std::string relation, LinguisticVocabulary vocabulary,
                                       std::vector<std::string> objects, std::vector<double> degrees,
                                       double threshold)
    : relation_(std::move(relation)),
      vocabulary_(std::move(vocabulary)),
      objects_(std::move(objects)),
      degrees_(std::move(degrees)),
      threshold_(threshold)
{
    if (!(threshold_ >= 0.0 && threshold_ <= 1.0)) {
        throw ValidationError("threshold", fmt::format("threshold {} outside [0, 1]", threshold_));
    }
    if (degrees_.size() != objects_.size() * vocabulary_.label_count()) {
        throw ValidationError("memberships", fmt::format("expected {} degrees, got {}",
                                                         objects_.size() * vocabulary_.label_count(),
                                                         degrees_.size()));
    }
    std::unordered_set<std::string> seen;
    for (std::size_t g = 0; g < objects_.size(); ++g) {
        if (objects_[g].empty()) {
            throw ValidationError(fmt::format("tuples[{}]", g), "empty object id");
        }
        if (!seen.insert(objects_[g]).second) {
            throw ValidationError(fmt::format("tuples[{}]", g), fmt::format("duplicate object id '{}'", objects_[g]));
        }
        for (std::size_t m = 0; m < vocabulary_.label_count(); ++m) {
            double d = degree(g, m);
            if (!(d >= 0.0 && d <= 1.0)) {
                throw ValidationError(fmt::format("{}.{}", objects_[g], vocabulary_.label(m).str()),
                                      fmt::format("degree {} outside [0, 1]", d));
            }
        }
    }
}

std::optional<std::size_t> FuzzyFormalContext::find_object(std::string_view id) const
{
    auto it = std::find(objects_.begin(), objects_.end(), id);
    if (it == objects_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - objects_.begin());
}

std::size_t FuzzyFormalContext::object_index(std::string_view id) const
{
    if (auto g = find_object(id)) {
        return *g;
    }
    throw LookupError(fmt::format("unknown object id '{}'", id));
}

std::size_t FuzzyFormalContext::label_index(const LabelRef& ref) const
{
    auto attribute = vocabulary_.find_attribute(ref.attribute);
    if (!attribute) {
        throw LookupError(fmt::format("unknown attribute '{}'", ref.attribute));
    }
    if (auto m = vocabulary_.find_label(*attribute, ref.label)) {
        return *m;
    }
    throw LookupError(fmt::format("unknown label '{}'", ref.str()));
}

FuzzyFormalContext FuzzyFormalContext::with_threshold(double threshold) const
{
    return FuzzyFormalContext(relation_, vocabulary_, objects_, degrees_, threshold);
}

ObjectSet make_object_set(const FuzzyFormalContext& ctx, std::span<const std::string> ids)
{
    ObjectSet set(ctx.object_count());
    for (const auto& id : ids) {
        set.set(ctx.object_index(id));
    }
    return set;
}

LabelSet make_label_set(const FuzzyFormalContext& ctx, std::span<const LabelRef> labels)
{
    LabelSet set(ctx.label_count());
    for (const auto& ref : labels) {
        set.set(ctx.label_index(ref));
    }
    return set;
}

std::vector<std::string> object_ids(const FuzzyFormalContext& ctx, const ObjectSet& set)
{
    std::vector<std::string> out;
    for (auto g = set.find_first(); g != ObjectSet::npos; g = set.find_next(g)) {
        out.push_back(ctx.objects()[g]);
    }
    return out;
}

std::vector<LabelRef> label_refs(const LinguisticVocabulary& vocab, const LabelSet& set)
{
    std::vector<LabelRef> out;
    for (auto m = set.find_first(); m != LabelSet::npos; m = set.find_next(m)) {
        out.push_back(vocab.label(m));
    }
    return out;
}

namespace {

void check_size(const IndexSet& set, std::size_t expected, const char* what)
{
    if (set.size() != expected) {
        throw LookupError(fmt::format("{} set has {} slots, context has {}", what, set.size(), expected));
    }
}

}  // namespace

LabelSet derive_intent(const FuzzyFormalContext& ctx, const ObjectSet& objects)
{
    check_size(objects, ctx.object_count(), "object");
    LabelSet intent(ctx.label_count());
    intent.set();
    for (auto g = objects.find_first(); g != ObjectSet::npos; g = objects.find_next(g)) {
        for (std::size_t m = 0; m < ctx.label_count(); ++m) {
            if (!ctx.related(g, m)) {
                intent.reset(m);
            }
        }
    }
    return intent;
}

ObjectSet derive_extent(const FuzzyFormalContext& ctx, const LabelSet& labels)
{
    check_size(labels, ctx.label_count(), "label");
    ObjectSet extent(ctx.object_count());
    for (std::size_t g = 0; g < ctx.object_count(); ++g) {
        bool all = true;
        for (auto m = labels.find_first(); m != LabelSet::npos && all; m = labels.find_next(m)) {
            all = ctx.related(g, m);
        }
        extent[g] = all;
    }
    return extent;
}

double concept_membership(const FuzzyFormalContext& ctx, std::size_t object, const LabelSet& labels)
{
    check_size(labels, ctx.label_count(), "label");
    if (object >= ctx.object_count()) {
        throw LookupError(fmt::format("object index {} out of range", object));
    }
    double degree = 1.0;
    for (auto m = labels.find_first(); m != LabelSet::npos; m = labels.find_next(m)) {
        if (!ctx.related(object, m)) {
            throw PreconditionError(fmt::format("object '{}' is not related to '{}' at T={}",
                                                ctx.objects()[object], ctx.vocabulary().label(m).str(),
                                                ctx.threshold()));
        }
        degree = std::min(degree, ctx.degree(object, m));
    }
    return degree;
}

}  // namespace fsq
