#include "hl/traits/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hl/error.hpp"

namespace hl {

void to_json(Json& j, const ReasonRecord& r) {
    j = Json{{"game_id", r.game_id}, {"statement", r.statement}};
    if (r.embedding) j["embedding"] = *r.embedding;
}

void from_json(const Json& j, ReasonRecord& r) {
    r.game_id = j.at("game_id").get<std::string>();
    r.statement = j.at("statement").get<std::string>();
    if (trim(r.statement).empty()) throw ValidationError("reason statement is empty");
    r.embedding.reset();
    if (j.contains("embedding") && !j["embedding"].is_null()) {
        r.embedding = j["embedding"].get<std::vector<double>>();
        double ss = 0.0;
        for (double x : *r.embedding) ss += x * x;
        if (std::abs(std::sqrt(ss) - 1.0) > 1e-6) throw ValidationError("reason embedding is not unit-norm");
    }
}

std::vector<ReasonRecord> collect_reasons(const std::vector<TuringGame>& games) {
    std::vector<ReasonRecord> out;
    for (const auto& g : games) {
        if (!g.reasons) continue;
        for (const auto& s : *g.reasons) out.push_back({g.id, s, std::nullopt});
    }
    return out;
}

std::vector<std::size_t> ClusterResult::noise() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == kNoise) out.push_back(i);
    return out;
}

Json to_json(const ClusterResult& r) {
    Json j;
    j["params"] = {{"min_cluster_size", r.params.min_cluster_size},
                   {"min_samples", r.params.min_samples},
                   {"epsilon", r.epsilon}};
    j["clusters"] = Json::array();
    for (const auto& c : r.clusters) j["clusters"].push_back({{"id", c.id}, {"members", c.members}, {"medoid", c.medoid}});
    j["noise"] = r.noise();
    return j;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return std::max(0.0, 1.0 - dot);
}

namespace {

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

struct Edge {
    std::size_t u, v;
    double w;
};

}  // namespace

ClusterResult cluster_embeddings(const std::vector<std::vector<double>>& points, ClusterParams params) {
    if (params.min_cluster_size < 2) throw ValidationError("min_cluster_size must be >= 2");
    if (params.min_samples < 1) throw ValidationError("min_samples must be >= 1");
    const std::size_t n = points.size();
    for (const auto& p : points)
        if (p.size() != points.front().size()) throw ValidationError("embeddings have mixed dimensions");

    ClusterResult result;
    result.params = params;
    result.assignments.assign(n, kNoise);
    if (n < params.min_cluster_size) return result;

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist[i * n + j] = dist[j * n + i] = cosine_distance(points[i], points[j]);

    // Core distance: distance to the k-th nearest other point.
    const std::size_t k = std::min(params.min_samples, n - 1);
    std::vector<double> core(n);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row.push_back(dist[i * n + j]);
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
        core[i] = row[k - 1];
    }
    auto reach = [&](std::size_t i, std::size_t j) { return std::max({core[i], core[j], dist[i * n + j]}); };

    // Prim's algorithm on the dense mutual-reachability graph.
    std::vector<Edge> mst;
    mst.reserve(n - 1);
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j) best[j] = reach(0, j);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j] && (pick == n || best[j] < best[pick])) pick = j;
        in_tree[pick] = true;
        mst.push_back({from[pick], pick, best[pick]});
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double r = reach(pick, j);
            if (r < best[j]) {
                best[j] = r;
                from[j] = pick;
            }
        }
    }

    std::vector<double> weights;
    weights.reserve(mst.size());
    for (const auto& e : mst) weights.push_back(e.w);
    std::sort(weights.begin(), weights.end());
    double epsilon = weights.front();
    double widest = -1.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        const double gap = weights[i + 1] - weights[i];
        if (gap > widest) {
            widest = gap;
            epsilon = weights[i];
        }
    }
    result.epsilon = epsilon;

    DisjointSet sets(n);
    for (const auto& e : mst)
        if (e.w <= epsilon) sets.unite(e.u, e.v);

    // Roots are the smallest member of each component, so scanning in index
    // order numbers clusters by their smallest member.
    std::vector<std::vector<std::size_t>> components(n);
    for (std::size_t i = 0; i < n; ++i) components[sets.find(i)].push_back(i);
    for (std::size_t root = 0; root < n; ++root) {
        auto& members = components[root];
        if (members.size() < params.min_cluster_size) continue;
        Cluster c;
        c.id = static_cast<int>(result.clusters.size());
        c.members = members;
        c.medoid = medoid(points, c.members);
        for (auto m : c.members) result.assignments[m] = c.id;
        result.clusters.push_back(std::move(c));
    }
    return result;
}

ClusterResult cluster_reasons(const std::vector<ReasonRecord>& records, ClusterParams params) {
    std::vector<std::vector<double>> points;
    points.reserve(records.size());
    for (const auto& r : records) {
        if (!r.embedding) throw ValidationError("reason record from game '" + r.game_id + "' has no embedding");
        points.push_back(*r.embedding);
    }
    return cluster_embeddings(points, params);
}

std::size_t medoid(const std::vector<std::vector<double>>& points, std::span<const std::size_t> members) {
    if (members.empty()) throw ValidationError("medoid of an empty member set");
    std::vector<std::size_t> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t best_index = sorted.front();
    double best_sum = std::numeric_limits<double>::infinity();
    for (auto c : sorted) {
        double sum = 0.0;
        for (auto m : sorted)
            if (m != c) sum += cosine_distance(points.at(c), points.at(m));
        if (sum < best_sum) {
            best_sum = sum;
            best_index = c;
        }
    }
    return best_index;
}

std::size_t medoid(const std::vector<ReasonRecord>& records, std::span<const std::size_t> members) {
    std::vector<std::vector<double>> points(records.size());
    for (auto m : members) {
        if (!records.at(m).embedding) throw ValidationError("medoid member has no embedding");
        points[m] = *records[m].embedding;
    }
    return medoid(points, members);
}

}  // namespace hl
