#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "knnd/geometry.hpp"

namespace knnd {

/// The kNN digraph of a point set: arc (u,v) present iff v is one of the k
/// nearest neighbours of u. Every vertex has outdegree exactly k; heads of
/// a vertex are stored in increasing-distance order.
struct KnnDigraph {
    std::int32_t n = 0;
    int k = 0;
    int dim = 0;
    std::vector<std::int32_t> heads;     // n*k; heads[v*k + r] = rank-r neighbour of v
    std::vector<std::int32_t> indegree;  // length n
    std::int64_t tie_events = 0;

    std::int32_t head(std::int32_t v, int rank) const {
        return heads[static_cast<std::size_t>(v) * k + rank];
    }
    std::span<const std::int32_t> row(std::int32_t v) const {
        return {heads.data() + static_cast<std::size_t>(v) * k, static_cast<std::size_t>(k)};
    }
    std::int64_t arc_count() const { return static_cast<std::int64_t>(n) * k; }
    bool has_arc(std::int32_t tail, std::int32_t head_id) const {
        for (std::int32_t h : row(tail))
            if (h == head_id) return true;
        return false;
    }
    std::int32_t max_indegree() const;
};

/// Builds the digraph with an exact index; parallelises over query vertices
/// (result independent of the worker count). Throws InsufficientPoints
/// when card(ps) < k+1.
KnnDigraph build_knn_digraph(const PointSet& ps, int k, int threads = 0);

/// As above but reusing an already-built index over the same point set.
KnnDigraph build_knn_digraph(const PointSet& ps, const KnnIndex& index, int k, int threads = 0);

/// Q_j vector: Q_j = #{v : indegree(v) = j}, j = 0..kappa'(d)*k when a
/// bound is known for the source dimension (an observed indegree beyond the
/// bound is a hard error); otherwise sized by the maximum observed indegree.
std::vector<std::int64_t> indegree_histogram(const KnnDigraph& g);

/// Number of unordered pairs that are kNN of each other.
std::int64_t count_reflexive(const KnnDigraph& g);

/// Q = sum_v C(indegree(v), 2), the number of shared-kNN triplets.
std::int64_t count_shared(const KnnDigraph& g);

/// Component id per vertex (ids are 0..count-1 in order of first vertex).
std::vector<std::int32_t> weak_components(const KnnDigraph& g);
std::int32_t weak_component_count(const KnnDigraph& g);

/// Undirected edge set of the underlying graph, deduplicated, as sorted
/// (min,max) pairs. Edge count equals nk - R.
std::vector<std::pair<std::int32_t, std::int32_t>> underlying_graph(const KnnDigraph& g);

/// Vertex marks in [1, m] plus the sampling distribution over classes.
struct MarkVector {
    std::vector<std::int32_t> marks;   // values in [1, num_classes]
    std::int32_t num_classes = 0;

    void validate(std::int64_t n) const;
};

/// N_ij: arcs whose tail has mark i and head has mark j (classes 1-based).
std::int64_t count_marked_arcs(const KnnDigraph& g, const MarkVector& marks, std::int32_t i,
                               std::int32_t j);

}  // namespace knnd
