#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fsq/context.hpp"

namespace fsq {

/// Fuzzy c-means parameters for one attribute.
struct ClusteringConfig {
    std::size_t cluster_count = 2;
    /// Assigned in ascending order of cluster center.
    std::vector<std::string> labels;
    double fuzzifier = 2.0;
    double tolerance = 1e-6;
    std::size_t max_iterations = 300;
    std::uint64_t seed = 0;

    /// Throws ValidationError.
    void validate() const;
};

/// Objects x clusters; each row sums to 1.
struct MembershipMatrix {
    std::vector<std::string> objects;
    std::size_t clusters = 0;
    std::vector<double> values;

    double at(std::size_t object, std::size_t cluster) const { return values[object * clusters + cluster]; }
    std::span<const double> row(std::size_t object) const { return {values.data() + object * clusters, clusters}; }
};

struct FcmResult {
    MembershipMatrix memberships;
    std::vector<double> centers;
    /// Objective after each membership update; non-increasing.
    std::vector<double> objective_history;
    std::size_t iterations = 0;
    bool converged = false;
};

using ScalarSample = std::pair<std::string, double>;

/// Standard fuzzy c-means on scalar values. Deterministic given the seed and
/// independent of input order. Throws PreconditionError when there are
/// fewer distinct values than clusters or a value is not finite.
FcmResult fuzzy_c_means(std::span<const ScalarSample> values, const ClusteringConfig& config);

/// Membership of a point to each center under fuzzifier m.
std::vector<double> fcm_membership(double x, std::span<const double> centers, double fuzzifier);

struct LabeledPartition {
    std::vector<std::string> labels;
    std::vector<double> centers;  // ascending
    MembershipMatrix memberships; // columns follow `labels`
};

/// Orders clusters by center and attaches `labels` in that order. Throws
/// PreconditionError on a label-count mismatch or tied centers.
LabeledPartition label_partition(const MembershipMatrix& matrix, std::span<const double> centers,
                                 std::span<const std::string> labels);

/// Plain numeric relation: header `id, attr1, attr2, ...`.
struct NumericTable {
    std::vector<std::string> attributes;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
};

NumericTable parse_numeric_table(std::string_view text);

struct ClusteringPlan {
    std::string relation;
    double threshold = FuzzyFormalContext::default_threshold;
    std::map<std::string, ClusteringConfig> attributes;
};

/// { "relation": ..., "threshold": ..., "defaults": {fuzzifier, tolerance, max_iterations, seed},
///   "attributes": { "Age": {"cluster_count": 2, "labels": ["Young", "Adult"], ...} } }
ClusteringPlan clustering_plan_from_json(const nlohmann::json& doc);

/// Clusters every column of `table` and assembles the labeled memberships
/// into a context. Every column needs a plan entry.
FuzzyFormalContext cluster_table(const NumericTable& table, const ClusteringPlan& plan);

}  // namespace fsq
