#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "knnd/digraph.hpp"

namespace knnd {

/// A small weakly connected digraph pattern,
/// vertices labelled 1..s in the file format, 0..s-1 internally.
class MotifPattern {
public:
    static constexpr int kMaxVertices = 6;

    /// arcs are 1-based (tail, head) pairs over {1..s}.
    MotifPattern(int s, std::vector<std::pair<int, int>> arcs);

    static MotifPattern single_vertex();
    static MotifPattern single_arc();           // 1 -> 2
    static MotifPattern mutual_pair();          // 1 <-> 2 (reflexive pair)
    static MotifPattern shared_head();          // 1 -> 2 <- 3 (shared pair)
    static MotifPattern in_star(int tails);     // tails arcs into one head
    static MotifPattern directed_cycle(int s);

    int s() const noexcept { return s_; }
    int arc_count() const noexcept { return static_cast<int>(arcs_.size()); }
    /// 0-based internal arcs.
    const std::vector<std::pair<int, int>>& arcs() const noexcept { return arcs_; }
    bool has_arc(int a, int b) const noexcept { return (adj_[a] >> b) & 1u; }

    bool operator==(const MotifPattern& o) const noexcept {
        return s_ == o.s_ && arcs_ == o.arcs_;
    }

private:
    int s_ = 0;
    std::vector<std::pair<int, int>> arcs_;  // 0-based, sorted
    std::uint32_t adj_[kMaxVertices] = {};   // out-adjacency bitmask per vertex
};

/// |Aut(p)| by exhaustive permutation check (s <= 6).
int automorphism_count(const MotifPattern& p);

/// H_D: number of subdigraphs of g isomorphic to p (extra host arcs
/// allowed). Computed as the number of injective arc-preserving maps
/// p -> g divided by |Aut(p)|, enumerated from per-vertex anchors using
/// the bounded total degree.
std::int64_t count_motif(const KnnDigraph& g, const MotifPattern& p, int threads = 0);

/// h_D(V, v): copies of p containing vertex v.
std::int64_t local_motif_count(const KnnDigraph& g, const MotifPattern& p, std::int32_t v);

/// Linear combination H = sum_i a_i * H_{D_i} (the functional of the
/// LLN/CLT statement).
struct StatisticSpec {
    std::vector<std::pair<double, MotifPattern>> terms;

    void validate() const;
};

double evaluate_statistic(const KnnDigraph& g, const StatisticSpec& spec, int threads = 0);

/// Q_j by inclusion-exclusion over in-star counts:
/// Q_j = sum_{i=j}^{kappa'k} (-1)^{i-j} C(i,j) H_{D_i}, with
/// H_{D_i} = sum_v C(indegree(v), i) in closed form.
std::int64_t qj_via_inclusion_exclusion(const KnnDigraph& g, int j);

/// Upper bound C(K, s) = K^{s-1} * s! on local counts, with K = k*(kappa'+1).
double local_count_bound(int dim, int k, int s);

/// Change in the statistic caused by inserting a point: H(ps + {at}) - H(ps),
/// both sides built from scratch. Throws when `at` coincides with an
/// existing point.
double add_one_cost(const PointSet& ps, int k, const StatisticSpec& stat,
                    std::span<const double> at);

}  // namespace knnd
