#include "knnd/motifs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "knnd/closedform.hpp"

namespace knnd {

MotifPattern::MotifPattern(int s, std::vector<std::pair<int, int>> arcs) : s_(s) {
    if (s < 1 || s > kMaxVertices)
        throw InvalidArgument("pattern size must be in [1, " + std::to_string(kMaxVertices) + "]");
    arcs_.reserve(arcs.size());
    for (auto [a, b] : arcs) {
        if (a < 1 || a > s || b < 1 || b > s) throw InvalidArgument("pattern arc endpoint out of range");
        if (a == b) throw InvalidArgument("pattern has a self-loop");
        arcs_.emplace_back(a - 1, b - 1);
    }
    std::sort(arcs_.begin(), arcs_.end());
    if (std::adjacent_find(arcs_.begin(), arcs_.end()) != arcs_.end())
        throw InvalidArgument("pattern has a duplicate arc");
    for (auto [a, b] : arcs_) adj_[a] |= 1u << b;

    // weak connectivity of the underlying graph
    std::uint32_t reached = 1u;
    for (int pass = 0; pass < s_; ++pass)
        for (auto [a, b] : arcs_) {
            if (reached & (1u << a)) reached |= 1u << b;
            if (reached & (1u << b)) reached |= 1u << a;
        }
    if (reached != (s_ == 32 ? ~0u : ((1u << s_) - 1)))
        throw InvalidArgument("pattern must be weakly connected");
}

MotifPattern MotifPattern::single_vertex() { return MotifPattern(1, {}); }
MotifPattern MotifPattern::single_arc() { return MotifPattern(2, {{1, 2}}); }
MotifPattern MotifPattern::mutual_pair() { return MotifPattern(2, {{1, 2}, {2, 1}}); }
MotifPattern MotifPattern::shared_head() { return MotifPattern(3, {{1, 2}, {3, 2}}); }

MotifPattern MotifPattern::in_star(int tails) {
    if (tails < 1 || tails + 1 > kMaxVertices)
        throw InvalidArgument("in_star supports 1.." + std::to_string(kMaxVertices - 1) + " tails");
    std::vector<std::pair<int, int>> arcs;
    for (int t = 1; t <= tails; ++t) arcs.emplace_back(t, tails + 1);
    return MotifPattern(tails + 1, std::move(arcs));
}

MotifPattern MotifPattern::directed_cycle(int s) {
    if (s < 2 || s > kMaxVertices) throw InvalidArgument("cycle size out of range");
    std::vector<std::pair<int, int>> arcs;
    for (int i = 1; i <= s; ++i) arcs.emplace_back(i, i % s + 1);
    return MotifPattern(s, std::move(arcs));
}

int automorphism_count(const MotifPattern& p) {
    const int s = p.s();
    std::array<int, MotifPattern::kMaxVertices> perm{};
    std::iota(perm.begin(), perm.begin() + s, 0);
    int count = 0;
    do {
        bool ok = true;
        for (int a = 0; a < s && ok; ++a)
            for (int b = 0; b < s && ok; ++b)
                if (a != b && p.has_arc(a, b) != p.has_arc(perm[a], perm[b])) ok = false;
        if (ok) ++count;
    } while (std::next_permutation(perm.begin(), perm.begin() + s));
    return count;
}

namespace {

// In-neighbour lists (CSR) of the host digraph; out-neighbours are g.row().
struct InLists {
    std::vector<std::int32_t> offsets;
    std::vector<std::int32_t> neighbors;

    explicit InLists(const KnnDigraph& g) {
        offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
        for (std::int32_t h : g.heads) ++offsets[h + 1];
        for (std::int32_t v = 0; v < g.n; ++v) offsets[v + 1] += offsets[v];
        neighbors.resize(g.heads.size());
        std::vector<std::int32_t> cursor(offsets.begin(), offsets.end() - 1);
        for (std::int32_t v = 0; v < g.n; ++v)
            for (std::int32_t u : g.row(v)) neighbors[cursor[u]++] = v;
    }
    std::span<const std::int32_t> of(std::int32_t v) const {
        return {neighbors.data() + offsets[v],
                static_cast<std::size_t>(offsets[v + 1] - offsets[v])};
    }
};

// A pattern-vertex visit order in which every vertex after the first is
// adjacent (in the underlying graph) to an earlier one, starting at `root`.
std::vector<int> connected_order(const MotifPattern& p, int root) {
    const int s = p.s();
    std::vector<int> order{root};
    std::vector<bool> placed(s, false);
    placed[root] = true;
    while (static_cast<int>(order.size()) < s) {
        for (int v = 0; v < s; ++v) {
            if (placed[v]) continue;
            bool touches = false;
            for (int u : order)
                if (p.has_arc(u, v) || p.has_arc(v, u)) {
                    touches = true;
                    break;
                }
            if (touches) {
                order.push_back(v);
                placed[v] = true;
                break;
            }
        }
    }
    return order;
}

// Counts injective arc-preserving maps phi with phi(order[0]) = anchor.
// Candidates for each new pattern vertex come from the host adjacency of an
// already-mapped neighbour, so work per anchor is O(K^{s-1} s).
std::int64_t count_maps_from(const KnnDigraph& g, const InLists& in, const MotifPattern& p,
                             std::span<const int> order, std::int32_t anchor) {
    const int s = p.s();
    std::array<std::int32_t, MotifPattern::kMaxVertices> image{};
    std::array<std::int32_t, MotifPattern::kMaxVertices> pos_of{};  // pattern vertex -> order pos
    for (int i = 0; i < s; ++i) pos_of[order[i]] = i;

    std::int64_t found = 0;
    // iterative DFS over candidate lists
    struct Level {
        std::span<const std::int32_t> cands;
        std::size_t next = 0;
    };
    std::array<Level, MotifPattern::kMaxVertices> levels;

    auto candidates_for = [&](int depth) -> std::span<const std::int32_t> {
        const int pv = order[depth];
        // any earlier-mapped pattern neighbour constrains pv; use the first
        for (int e = 0; e < depth; ++e) {
            const int pu = order[e];
            if (p.has_arc(pu, pv)) return g.row(image[pu]);   // image[pu] -> cand
            if (p.has_arc(pv, pu)) return in.of(image[pu]);   // cand -> image[pu]
        }
        return {};
    };
    auto consistent = [&](int depth, std::int32_t cand) {
        const int pv = order[depth];
        for (int e = 0; e < depth; ++e) {
            const int pu = order[e];
            if (image[pu] == cand) return false;
            if (p.has_arc(pu, pv) && !g.has_arc(image[pu], cand)) return false;
            if (p.has_arc(pv, pu) && !g.has_arc(cand, image[pu])) return false;
        }
        return true;
    };

    image[order[0]] = anchor;
    if (s == 1) return 1;
    int depth = 1;
    levels[1] = {candidates_for(1), 0};
    while (depth >= 1) {
        Level& lv = levels[depth];
        if (lv.next >= lv.cands.size()) {
            --depth;
            continue;
        }
        const std::int32_t cand = lv.cands[lv.next++];
        if (!consistent(depth, cand)) continue;
        image[order[depth]] = cand;
        if (depth + 1 == s) {
            ++found;
            continue;
        }
        ++depth;
        levels[depth] = {candidates_for(depth), 0};
    }
    return found;
}

}  // namespace

std::int64_t count_motif(const KnnDigraph& g, const MotifPattern& p, int threads) {
    const InLists in(g);
    const auto order = connected_order(p, 0);
    const int aut = automorphism_count(p);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, static_cast<int>(std::min<std::int64_t>(nthreads, g.n)));

    std::int64_t maps = 0;
    if (nthreads == 1 || g.n < 4096) {
        for (std::int32_t a = 0; a < g.n; ++a) maps += count_maps_from(g, in, p, order, a);
    } else {
        std::vector<std::int64_t> partial(nthreads, 0);
        std::atomic<std::int32_t> next{0};
        constexpr std::int32_t kChunk = 512;
        auto worker = [&](int tid) {
            std::int64_t local = 0;
            for (;;) {
                const std::int32_t begin = next.fetch_add(kChunk);
                if (begin >= g.n) break;
                const std::int32_t end = std::min<std::int32_t>(begin + kChunk, g.n);
                for (std::int32_t a = begin; a < end; ++a)
                    local += count_maps_from(g, in, p, order, a);
            }
            partial[tid] = local;
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
        for (std::int64_t x : partial) maps += x;  // integer sum, order-free
    }

    if (maps % aut != 0)
        throw Error("internal: injective map count not divisible by |Aut|");
    return maps / aut;
}

std::int64_t local_motif_count(const KnnDigraph& g, const MotifPattern& p, std::int32_t v) {
    if (v < 0 || v >= g.n) throw InvalidArgument("vertex id out of range");
    const InLists in(g);
    const int aut = automorphism_count(p);
    // each map containing v has exactly one pattern vertex on v
    std::int64_t maps = 0;
    for (int root = 0; root < p.s(); ++root) {
        const auto order = connected_order(p, root);
        maps += count_maps_from(g, in, p, order, v);
    }
    if (maps % aut != 0)
        throw Error("internal: injective map count not divisible by |Aut|");
    return maps / aut;
}

void StatisticSpec::validate() const {
    if (terms.empty()) throw InvalidArgument("statistic needs at least one term");
}

double evaluate_statistic(const KnnDigraph& g, const StatisticSpec& spec, int threads) {
    spec.validate();
    double total = 0.0;
    for (const auto& [coef, pattern] : spec.terms)
        total += coef * static_cast<double>(count_motif(g, pattern, threads));
    return total;
}

std::int64_t qj_via_inclusion_exclusion(const KnnDigraph& g, int j) {
    const int bound = [&] {
        if (const auto b = try_kappa_prime_bound(g.dim)) return *b * g.k;
        return static_cast<int>(g.max_indegree());
    }();
    if (j < 0 || j > bound)
        throw InvalidArgument("j out of range [0, " + std::to_string(bound) + "]");

    const int top = g.max_indegree();  // C(deg, i) = 0 beyond this
    // H_{D_i} = sum_v C(indegree(v), i); i = 0 is the single-vertex pattern
    std::vector<__int128> star_counts(static_cast<std::size_t>(top) + 1, 0);
    for (std::int32_t v = 0; v < g.n; ++v) {
        const int deg = g.indegree[v];
        __int128 binom = 1;
        star_counts[0] += 1;
        for (int i = 1; i <= deg; ++i) {
            binom = binom * (deg - i + 1) / i;  // exact: C(deg, i)
            star_counts[i] += binom;
        }
    }

    __int128 acc = 0;
    __int128 choose = 1;  // C(i, j), updated incrementally from i = j
    for (int i = j; i <= top; ++i) {
        if (i > j) choose = choose * i / (i - j);  // C(i,j) = C(i-1,j) * i / (i-j)
        const __int128 term = choose * star_counts[i];
        acc += (i - j) % 2 == 0 ? term : -term;
    }
    if (acc < INT64_MIN || acc > INT64_MAX) throw Error("inclusion-exclusion overflow");
    return static_cast<std::int64_t>(acc);
}

double local_count_bound(int dim, int k, int s) {
    const double K = static_cast<double>(k) * (kappa_prime_bound(dim) + 1);
    double f = 1.0;
    for (int i = 2; i <= s; ++i) f *= i;
    return std::pow(K, s - 1) * f;
}

double add_one_cost(const PointSet& ps, int k, const StatisticSpec& stat,
                    std::span<const double> at) {
    if (static_cast<int>(at.size()) != ps.dim())
        throw DimensionMismatch("insertion point dimension mismatch");
    for (std::int64_t i = 0; i < ps.size(); ++i)
        if (std::equal(at.begin(), at.end(), ps.point(i).begin()))
            throw InvalidArgument("insertion point coincides with existing point " + std::to_string(i));

    PointSet enlarged(ps.dim(), ps.coords());
    enlarged.add(at);
    const double before = evaluate_statistic(build_knn_digraph(ps, k), stat);
    const double after = evaluate_statistic(build_knn_digraph(enlarged, k), stat);
    return after - before;
}

}  // namespace knnd
