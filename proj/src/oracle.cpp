#include "knnd/oracle.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace knnd::oracle {

std::vector<std::int32_t> brute_knn(const PointSet& ps, std::int32_t v, int k) {
    const std::int64_t n = ps.size();
    if (k < 1) throw InvalidArgument("k must be positive");
    if (n < k + 1) throw InsufficientPoints("brute_knn needs at least k+1 points");
    if (v < 0 || v >= n) throw InvalidArgument("point id out of range");

    std::vector<std::pair<double, std::int32_t>> ranked;
    ranked.reserve(n - 1);
    for (std::int64_t u = 0; u < n; ++u) {
        if (u == v) continue;
        ranked.emplace_back(squared_distance(ps.point(v), ps.point(u)), static_cast<std::int32_t>(u));
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::int32_t> out(k);
    for (int i = 0; i < k; ++i) out[i] = ranked[i].second;
    return out;
}

std::int64_t brute_count_motif(const KnnDigraph& g, const MotifPattern& p) {
    if (g.n > 30) throw SizeGuard("brute_count_motif refuses n > 30 (got " + std::to_string(g.n) + ")");
    if (p.s() > 4) throw SizeGuard("brute_count_motif refuses patterns with s > 4");

    const int s = p.s();
    std::int64_t total = 0;

    // enumerate all s-subsets
    std::vector<std::int32_t> idx(s);
    for (int i = 0; i < s; ++i) idx[i] = i;
    if (g.n < s) return 0;
    for (;;) {
        // all injective labelings of this subset; a copy is a distinct
        // (vertex set, arc image) pair, so dedupe arc images per subset
        std::set<std::vector<std::pair<std::int32_t, std::int32_t>>> images;
        std::vector<int> perm(s);
        for (int i = 0; i < s; ++i) perm[i] = i;
        do {
            bool ok = true;
            std::vector<std::pair<std::int32_t, std::int32_t>> image;
            image.reserve(p.arcs().size());
            for (auto [a, b] : p.arcs()) {
                const std::int32_t ga = idx[perm[a]], gb = idx[perm[b]];
                if (!g.has_arc(ga, gb)) {
                    ok = false;
                    break;
                }
                image.emplace_back(ga, gb);
            }
            if (ok) {
                std::sort(image.begin(), image.end());
                images.insert(std::move(image));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += static_cast<std::int64_t>(images.size());

        // next subset
        int i = s - 1;
        while (i >= 0 && idx[i] == g.n - s + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int t = i + 1; t < s; ++t) idx[t] = idx[t - 1] + 1;
    }
    return total;
}

std::int64_t brute_reflexive(const KnnDigraph& g) {
    std::int64_t r = 0;
    for (std::int32_t u = 0; u < g.n; ++u)
        for (std::int32_t v = u + 1; v < g.n; ++v)
            if (g.has_arc(u, v) && g.has_arc(v, u)) ++r;
    return r;
}

std::int64_t brute_shared(const KnnDigraph& g) {
    // triplet scan: ({u,w}, v) with arcs u->v and w->v
    std::int64_t q = 0;
    for (std::int32_t v = 0; v < g.n; ++v)
        for (std::int32_t u = 0; u < g.n; ++u) {
            if (u == v || !g.has_arc(u, v)) continue;
            for (std::int32_t w = u + 1; w < g.n; ++w) {
                if (w == v) continue;
                if (g.has_arc(w, v)) ++q;
            }
        }
    return q;
}

std::int64_t brute_indegree_count(const KnnDigraph& g, int j) {
    std::int64_t count = 0;
    for (std::int32_t v = 0; v < g.n; ++v) {
        std::int64_t deg = 0;
        for (std::int32_t u = 0; u < g.n; ++u)
            if (u != v && g.has_arc(u, v)) ++deg;
        if (deg == j) ++count;
    }
    return count;
}

}  // namespace knnd::oracle
