#include "fsq/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "fsq/error.hpp"
#include "text_util.hpp"

namespace fsq {

void ClusteringConfig::validate() const
{
    if (cluster_count == 0) {
        throw ValidationError("cluster_count", "must be positive");
    }
    if (labels.size() != cluster_count) {
        throw ValidationError("labels", fmt::format("{} labels for {} clusters", labels.size(), cluster_count));
    }
    if (!(fuzzifier > 1.0) || !std::isfinite(fuzzifier)) {
        throw ValidationError("fuzzifier", fmt::format("fuzzifier {} must be > 1", fuzzifier));
    }
    if (!(tolerance > 0.0)) {
        throw ValidationError("tolerance", "must be > 0");
    }
    if (max_iterations == 0) {
        throw ValidationError("max_iterations", "must be positive");
    }
}

std::vector<double> fcm_membership(double x, std::span<const double> centers, double fuzzifier)
{
    std::vector<double> u(centers.size(), 0.0);
    std::vector<double> dist2(centers.size());
    std::size_t zero = 0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        dist2[k] = (x - centers[k]) * (x - centers[k]);
        zero += dist2[k] == 0.0;
    }
    if (zero > 0) {
        for (std::size_t k = 0; k < centers.size(); ++k) {
            u[k] = dist2[k] == 0.0 ? 1.0 / static_cast<double>(zero) : 0.0;
        }
        return u;
    }
    double exponent = 1.0 / (fuzzifier - 1.0);
    for (std::size_t k = 0; k < centers.size(); ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            sum += std::pow(dist2[k] / dist2[j], exponent);
        }
        u[k] = 1.0 / sum;
    }
    return u;
}

FcmResult fuzzy_c_means(std::span<const ScalarSample> values, const ClusteringConfig& config)
{
    config.validate();
    const std::size_t n = values.size();
    const std::size_t c = config.cluster_count;
    for (const auto& [id, x] : values) {
        if (!std::isfinite(x)) {
            throw PreconditionError(fmt::format("value of '{}' is not finite", id));
        }
    }

    // Work in (value, id) order so results do not depend on input order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(values[a].second, values[a].first) < std::tie(values[b].second, values[b].first);
    });
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = values[order[i]].second;
    }

    std::vector<double> distinct;
    std::unique_copy(xs.begin(), xs.end(), std::back_inserter(distinct));
    if (distinct.size() < c) {
        throw PreconditionError(fmt::format("{} distinct values cannot form {} clusters", distinct.size(), c));
    }

    std::vector<double> centers;
    std::mt19937_64 rng(config.seed);
    std::sample(distinct.begin(), distinct.end(), std::back_inserter(centers), static_cast<std::ptrdiff_t>(c), rng);
    std::sort(centers.begin(), centers.end());

    FcmResult result;
    std::vector<double> u(n * c);
    const double m = config.fuzzifier;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = fcm_membership(xs[i], centers, m);
            for (std::size_t k = 0; k < c; ++k) {
                u[i * c + k] = row[k];
                objective += std::pow(row[k], m) * (xs[i] - centers[k]) * (xs[i] - centers[k]);
            }
        }
        result.objective_history.push_back(objective);
        result.iterations = iter;
        if (std::abs(previous - objective) < config.tolerance) {
            result.converged = true;
            break;
        }
        previous = objective;
        if (iter == config.max_iterations) {
            break;
        }
        for (std::size_t k = 0; k < c; ++k) {
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double w = std::pow(u[i * c + k], m);
                num += w * xs[i];
                den += w;
            }
            if (den > 0.0) {
                centers[k] = num / den;
            }
        }
    }

    result.centers = centers;
    result.memberships.clusters = c;
    result.memberships.objects.resize(n);
    result.memberships.values.resize(n * c);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t original = order[i];
        result.memberships.objects[original] = values[original].first;
        std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(i * c), c,
                    result.memberships.values.begin() + static_cast<std::ptrdiff_t>(original * c));
    }
    return result;
}

LabeledPartition label_partition(const MembershipMatrix& matrix, std::span<const double> centers,
                                 std::span<const std::string> labels)
{
    if (centers.size() != matrix.clusters) {
        throw PreconditionError(fmt::format("{} centers for {} clusters", centers.size(), matrix.clusters));
    }
    if (labels.size() != centers.size()) {
        throw PreconditionError(fmt::format("{} labels for {} clusters", labels.size(), centers.size()));
    }
    std::vector<std::size_t> order(centers.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return centers[a] < centers[b]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (centers[order[k]] == centers[order[k - 1]]) {
            throw PreconditionError(fmt::format("clusters {} and {} share center {}; cannot order labels",
                                                order[k - 1], order[k], centers[order[k]]));
        }
    }

    LabeledPartition out;
    out.labels.assign(labels.begin(), labels.end());
    out.memberships.objects = matrix.objects;
    out.memberships.clusters = matrix.clusters;
    out.memberships.values.resize(matrix.values.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        out.centers.push_back(centers[order[rank]]);
        for (std::size_t i = 0; i < matrix.objects.size(); ++i) {
            out.memberships.values[i * matrix.clusters + rank] = matrix.at(i, order[rank]);
        }
    }
    return out;
}

NumericTable parse_numeric_table(std::string_view text)
{
    auto lines = detail::split_lines(text);
    NumericTable table;
    bool have_header = false;
    std::set<std::string> seen_ids;
    for (std::size_t line = 0; line < lines.size(); ++line) {
        if (detail::trim(lines[line]).empty()) {
            continue;
        }
        auto cells = detail::split_csv_row(lines[line]);
        if (!have_header) {
            if (cells.size() < 2 || cells[0] != "id") {
                throw ValidationError(fmt::format("line {}", line + 1),
                                      "header must be 'id' followed by at least one attribute");
            }
            table.attributes.assign(cells.begin() + 1, cells.end());
            std::set<std::string> names(table.attributes.begin(), table.attributes.end());
            if (names.size() != table.attributes.size()) {
                throw ValidationError(fmt::format("line {}", line + 1), "duplicate attribute in header");
            }
            have_header = true;
            continue;
        }
        if (cells.size() != table.attributes.size() + 1) {
            throw ValidationError(fmt::format("line {}", line + 1),
                                  fmt::format("{} cells, expected {}", cells.size(), table.attributes.size() + 1));
        }
        if (!seen_ids.insert(cells[0]).second) {
            throw ValidationError(fmt::format("line {}", line + 1), fmt::format("duplicate id '{}'", cells[0]));
        }
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            auto value = detail::parse_double(cells[c]);
            if (!value || !std::isfinite(*value)) {
                throw ValidationError(fmt::format("line {}, column {}", line + 1, table.attributes[c - 1]),
                                      fmt::format("'{}' is not a finite number", cells[c]));
            }
            row.push_back(*value);
        }
        table.ids.push_back(cells[0]);
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw ValidationError("line 1", "missing header row");
    }
    return table;
}

namespace {

void apply_parameters(const nlohmann::json& obj, ClusteringConfig& cfg, const std::string& where)
{
    auto number = [&](const char* key) {
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            throw ValidationError(where + "." + key, "expected a number");
        }
        return v.get<double>();
    };
    auto count = [&](const char* key) {
        const auto& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ValidationError(where + "." + key, "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    };
    if (obj.contains("fuzzifier")) {
        cfg.fuzzifier = number("fuzzifier");
    }
    if (obj.contains("tolerance")) {
        cfg.tolerance = number("tolerance");
    }
    if (obj.contains("max_iterations")) {
        cfg.max_iterations = count("max_iterations");
    }
    if (obj.contains("seed")) {
        cfg.seed = count("seed");
    }
}

}  // namespace

ClusteringPlan clustering_plan_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object()) {
        throw ValidationError("", "clustering config must be an object");
    }
    ClusteringPlan plan;
    if (doc.contains("relation")) {
        if (!doc.at("relation").is_string()) {
            throw ValidationError("relation", "expected a string");
        }
        plan.relation = doc.at("relation").get<std::string>();
    }
    if (doc.contains("threshold")) {
        if (!doc.at("threshold").is_number()) {
            throw ValidationError("threshold", "expected a number");
        }
        plan.threshold = doc.at("threshold").get<double>();
    }
    ClusteringConfig defaults;
    if (doc.contains("defaults")) {
        apply_parameters(doc.at("defaults"), defaults, "defaults");
    }
    if (!doc.contains("attributes") || !doc.at("attributes").is_object()) {
        throw ValidationError("attributes", "missing object of per-attribute settings");
    }
    for (const auto& [name, entry] : doc.at("attributes").items()) {
        std::string where = "attributes." + name;
        if (!entry.is_object() || !entry.contains("labels") || !entry.at("labels").is_array()) {
            throw ValidationError(where, "missing 'labels' list");
        }
        ClusteringConfig cfg = defaults;
        cfg.labels.clear();
        for (const auto& label : entry.at("labels")) {
            if (!label.is_string()) {
                throw ValidationError(where + ".labels", "labels must be strings");
            }
            cfg.labels.push_back(label.get<std::string>());
        }
        cfg.cluster_count = cfg.labels.size();
        if (entry.contains("cluster_count")) {
            const auto& v = entry.at("cluster_count");
            if (!v.is_number_integer() || v.get<long long>() <= 0) {
                throw ValidationError(where + ".cluster_count", "expected a positive integer");
            }
            cfg.cluster_count = v.get<std::size_t>();
        }
        apply_parameters(entry, cfg, where);
        try {
            cfg.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(where + "." + e.location(), e.message());
        }
        plan.attributes.emplace(name, std::move(cfg));
    }
    return plan;
}

FuzzyFormalContext cluster_table(const NumericTable& table, const ClusteringPlan& plan)
{
    for (const auto& [name, cfg] : plan.attributes) {
        if (std::find(table.attributes.begin(), table.attributes.end(), name) == table.attributes.end()) {
            throw ValidationError("attributes." + name, "attribute not present in the table");
        }
    }
    std::vector<Attribute> attributes;
    std::vector<LabeledPartition> partitions;
    for (std::size_t a = 0; a < table.attributes.size(); ++a) {
        const auto& name = table.attributes[a];
        auto it = plan.attributes.find(name);
        if (it == plan.attributes.end()) {
            throw ValidationError("attributes." + name, "no clustering settings for this column");
        }
        std::vector<ScalarSample> samples;
        for (std::size_t i = 0; i < table.ids.size(); ++i) {
            samples.emplace_back(table.ids[i], table.rows[i][a]);
        }
        FcmResult fcm;
        try {
            fcm = fuzzy_c_means(samples, it->second);
        } catch (const PreconditionError& e) {
            throw ValidationError("attributes." + name, e.what());
        }
        partitions.push_back(label_partition(fcm.memberships, fcm.centers, it->second.labels));
        Attribute attr{name, {}};
        for (const auto& label : it->second.labels) {
            attr.labels.push_back({label, {}});
        }
        attributes.push_back(std::move(attr));
    }
    LinguisticVocabulary vocab(std::move(attributes));
    std::vector<double> degrees(table.ids.size() * vocab.label_count(), 0.0);
    for (std::size_t a = 0; a < partitions.size(); ++a) {
        auto first = vocab.label_range(a).first;
        const auto& part = partitions[a];
        for (std::size_t i = 0; i < table.ids.size(); ++i) {
            for (std::size_t k = 0; k < part.memberships.clusters; ++k) {
                // clamp rounding spill so the context invariant holds
                degrees[i * vocab.label_count() + first + k] = std::clamp(part.memberships.at(i, k), 0.0, 1.0);
            }
        }
    }
    return FuzzyFormalContext(plan.relation, std::move(vocab), table.ids, std::move(degrees), plan.threshold);
}

}  // namespace fsq
