#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hl/core/model.hpp"

namespace hl {

struct ReasonRecord {
    std::string game_id;
    std::string statement;
    std::optional<std::vector<double>> embedding;
};

void to_json(Json& j, const ReasonRecord& r);
void from_json(const Json& j, ReasonRecord& r);

// Flattens judged games into one record per reason statement.
std::vector<ReasonRecord> collect_reasons(const std::vector<TuringGame>& games);

inline constexpr int kNoise = -1;

struct Cluster {
    int id = 0;
    std::vector<std::size_t> members;  // ascending
    std::size_t medoid = 0;
};

struct ClusterParams {
    std::size_t min_cluster_size = 5;
    std::size_t min_samples = 5;
};

struct ClusterResult {
    std::vector<int> assignments;  // cluster id or kNoise, per record
    std::vector<Cluster> clusters;  // ids 0..k-1, ordered by smallest member
    double epsilon = 0.0;
    ClusterParams params;

    std::vector<std::size_t> noise() const;
};

Json to_json(const ClusterResult& r);

double cosine_distance(std::span<const double> u, std::span<const double> v);

// Density clustering under cosine distance: core distances from the
// min_samples-th neighbour, mutual-reachability MST, then a single cut at the
// lower end of the widest gap between consecutive sorted MST edge weights.
// Components smaller than min_cluster_size are noise.
ClusterResult cluster_embeddings(const std::vector<std::vector<double>>& points, ClusterParams params);

ClusterResult cluster_reasons(const std::vector<ReasonRecord>& records, ClusterParams params);

// Member minimizing the summed cosine distance to the other members; ties go
// to the lowest index.
std::size_t medoid(const std::vector<std::vector<double>>& points, std::span<const std::size_t> members);
std::size_t medoid(const std::vector<ReasonRecord>& records, std::span<const std::size_t> members);

}  // namespace hl
