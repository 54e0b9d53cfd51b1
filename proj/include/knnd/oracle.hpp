#pragma once

#include <cstdint>
#include <vector>

#include "knnd/digraph.hpp"
#include "knnd/motifs.hpp"

// Brute-force reference implementations, used only by tests and
// cross-checks. Clarity over speed; size guards are hard errors.
namespace knnd::oracle {

/// Full distance sort, take the k smallest (ties by smaller id).
std::vector<std::int32_t> brute_knn(const PointSet& ps, std::int32_t v, int k);

/// Subdigraph copies of p in g by exhaustive subset/labelling enumeration.
/// Guards: n <= 30, s <= 4.
std::int64_t brute_count_motif(const KnnDigraph& g, const MotifPattern& p);

std::int64_t brute_reflexive(const KnnDigraph& g);
std::int64_t brute_shared(const KnnDigraph& g);
std::int64_t brute_indegree_count(const KnnDigraph& g, int j);

}  // namespace knnd::oracle
