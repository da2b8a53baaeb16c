#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace fsq {

/// Subset of a context's objects or labels, indexed by position.
using IndexSet = boost::dynamic_bitset<>;
using ObjectSet = IndexSet;
using LabelSet = IndexSet;

/// One element of the flattened attribute set M: an (attribute, label) pair.
struct LabelRef {
    std::string attribute;
    std::string label;

    std::string str() const { return attribute + "." + label; }
    friend auto operator<=>(const LabelRef&, const LabelRef&) = default;
};

struct Label {
    std::string name;
    /// Alternative spellings accepted in queries, e.g. "Young" for "YA".
    std::vector<std::string> aliases;

    friend bool operator==(const Label&, const Label&) = default;
};

struct Attribute {
    std::string name;
    std::vector<Label> labels;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered attributes, each with an ordered, non-empty list of linguistic
/// labels. Labels are also addressed by a flattened index in
/// attribute-major order.
class LinguisticVocabulary {
  public:
    LinguisticVocabulary() = default;

    /// Throws ValidationError on duplicate names, alias clashes or an
    /// attribute without labels.
    explicit LinguisticVocabulary(std::vector<Attribute> attributes);

    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    std::size_t attribute_count() const noexcept { return attributes_.size(); }
    std::size_t label_count() const noexcept { return flat_.size(); }

    const LabelRef& label(std::size_t index) const { return flat_.at(index); }
    const std::vector<LabelRef>& labels() const noexcept { return flat_; }

    std::size_t attribute_of(std::size_t label_index) const { return owner_.at(label_index); }

    /// Half-open range of flattened label indices belonging to `attribute`.
    std::pair<std::size_t, std::size_t> label_range(std::size_t attribute) const;

    std::optional<std::size_t> find_attribute(std::string_view name) const;

    /// Resolves a label by name or alias within one attribute.
    std::optional<std::size_t> find_label(std::size_t attribute, std::string_view name) const;
    std::optional<std::size_t> find_label(const LabelRef& ref) const;

    friend bool operator==(const LinguisticVocabulary& a, const LinguisticVocabulary& b)
    {
        return a.attributes_ == b.attributes_;
    }

  private:
    std::vector<Attribute> attributes_;
    std::vector<LabelRef> flat_;
    std::vector<std::size_t> owner_;
    std::vector<std::size_t> first_;
};

/// Objects x (attribute, label) membership degrees with a confidence
/// threshold T. Immutable once constructed.
class FuzzyFormalContext {
  public:
    static constexpr double default_threshold = 0.5;

    FuzzyFormalContext() = default;

    /// `degrees` is row-major, objects x vocabulary.label_count(). Throws
    /// ValidationError when a degree or T leaves [0,1] or ids repeat.
    FuzzyFormalContext(std::string relation, LinguisticVocabulary vocabulary,
                       std::vector<std::string> objects, std::vector<double> degrees,
                       double threshold = default_threshold);

    const std::string& relation() const noexcept { return relation_; }
    const LinguisticVocabulary& vocabulary() const noexcept { return vocabulary_; }
    const std::vector<std::string>& objects() const noexcept { return objects_; }
    std::size_t object_count() const noexcept { return objects_.size(); }
    std::size_t label_count() const noexcept { return vocabulary_.label_count(); }
    double threshold() const noexcept { return threshold_; }

    double degree(std::size_t object, std::size_t label) const
    {
        return degrees_[object * label_count() + label];
    }

    std::span<const double> row(std::size_t object) const
    {
        return {degrees_.data() + object * label_count(), label_count()};
    }

    /// (g, m) belongs to the thresholded relation: mu >= T and mu > 0.
    bool related(std::size_t object, std::size_t label) const
    {
        double d = degree(object, label);
        return d > 0.0 && d >= threshold_;
    }

    std::optional<std::size_t> find_object(std::string_view id) const;
    /// Throws LookupError for an unknown id.
    std::size_t object_index(std::string_view id) const;
    /// Throws LookupError for an unknown attribute or label.
    std::size_t label_index(const LabelRef& ref) const;

    FuzzyFormalContext with_threshold(double threshold) const;

    friend bool operator==(const FuzzyFormalContext&, const FuzzyFormalContext&) = default;

  private:
    std::string relation_;
    LinguisticVocabulary vocabulary_;
    std::vector<std::string> objects_;
    std::vector<double> degrees_;
    double threshold_ = default_threshold;
};

ObjectSet make_object_set(const FuzzyFormalContext& ctx, std::span<const std::string> ids);
LabelSet make_label_set(const FuzzyFormalContext& ctx, std::span<const LabelRef> labels);
std::vector<std::string> object_ids(const FuzzyFormalContext& ctx, const ObjectSet& set);
std::vector<LabelRef> label_refs(const LinguisticVocabulary& vocab, const LabelSet& set);

/// A* = { m | for all g in A: (g, m) related }.
LabelSet derive_intent(const FuzzyFormalContext& ctx, const ObjectSet& objects);

/// B* = { g | for all m in B: (g, m) related }.
ObjectSet derive_extent(const FuzzyFormalContext& ctx, const LabelSet& labels);

/// min over B of mu(g, m); 1 for empty B. Throws PreconditionError when
/// g is not in B*.
double concept_membership(const FuzzyFormalContext& ctx, std::size_t object, const LabelSet& labels);

}  // namespace fsq
