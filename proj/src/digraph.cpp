#include "knnd/digraph.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <string>
#include <thread>

#include "knnd/closedform.hpp"

namespace knnd {

std::int32_t KnnDigraph::max_indegree() const {
    std::int32_t m = 0;
    for (std::int32_t v : indegree) m = std::max(m, v);
    return m;
}

KnnDigraph build_knn_digraph(const PointSet& ps, const KnnIndex& index, int k, int threads) {
    const std::int64_t n = ps.size();
    if (k < 1) throw InvalidArgument("k must be positive");
    if (n < k + 1)
        throw InsufficientPoints("building a " + std::to_string(k) + "NN digraph needs at least " +
                                 std::to_string(k + 1) + " points, got " + std::to_string(n));

    KnnDigraph g;
    g.n = static_cast<std::int32_t>(n);
    g.k = k;
    g.dim = ps.dim();
    g.heads.resize(static_cast<std::size_t>(n) * k);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, static_cast<int>(std::min<std::int64_t>(nthreads, n)));
    if (nthreads == 1 || n < 2048) {
        for (std::int64_t v = 0; v < n; ++v)
            index.query_into(static_cast<std::int32_t>(v), k, g.heads.data() + v * k);
    } else {
        std::atomic<std::int64_t> next{0};
        constexpr std::int64_t kChunk = 256;
        auto worker = [&] {
            for (;;) {
                const std::int64_t begin = next.fetch_add(kChunk);
                if (begin >= n) return;
                const std::int64_t end = std::min(begin + kChunk, n);
                for (std::int64_t v = begin; v < end; ++v)
                    index.query_into(static_cast<std::int32_t>(v), k, g.heads.data() + v * k);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    g.indegree.assign(n, 0);
    for (std::int32_t h : g.heads) ++g.indegree[h];
    g.tie_events = index.tie_events();
    return g;
}

KnnDigraph build_knn_digraph(const PointSet& ps, int k, int threads) {
    const KnnIndex index(ps);
    return build_knn_digraph(ps, index, k, threads);
}

std::vector<std::int64_t> indegree_histogram(const KnnDigraph& g) {
    const auto bound = try_kappa_prime_bound(g.dim);
    const std::int64_t len = bound ? static_cast<std::int64_t>(*bound) * g.k + 1
                                   : static_cast<std::int64_t>(g.max_indegree()) + 1;
    std::vector<std::int64_t> hist(len, 0);
    for (std::int32_t deg : g.indegree) {
        if (deg >= len)
            throw ImpossibleIndegree("observed indegree " + std::to_string(deg) +
                                     " exceeds kappa'(d)*k = " + std::to_string(len - 1) +
                                     "; this contradicts the indegree bound (or a tie went unhandled)");
        ++hist[deg];
    }
    return hist;
}

std::int64_t count_reflexive(const KnnDigraph& g) {
    std::int64_t r = 0;
    for (std::int32_t v = 0; v < g.n; ++v)
        for (std::int32_t u : g.row(v))
            if (u > v && g.has_arc(u, v)) ++r;
    return r;
}

std::int64_t count_shared(const KnnDigraph& g) {
    std::int64_t q = 0;
    for (std::int32_t v = 0; v < g.n; ++v) {
        const std::int64_t d = g.indegree[v];
        q += d * (d - 1) / 2;
    }
    return q;
}

namespace {
struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::int32_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::int32_t find(std::int32_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};
}  // namespace

std::vector<std::int32_t> weak_components(const KnnDigraph& g) {
    UnionFind uf(g.n);
    for (std::int32_t v = 0; v < g.n; ++v)
        for (std::int32_t u : g.row(v)) uf.unite(v, u);
    std::vector<std::int32_t> comp(g.n, -1);
    std::int32_t next_id = 0;
    for (std::int32_t v = 0; v < g.n; ++v) {
        const std::int32_t root = uf.find(v);
        if (comp[root] < 0) comp[root] = next_id++;
        comp[v] = comp[root];
    }
    return comp;
}

std::int32_t weak_component_count(const KnnDigraph& g) {
    const auto comp = weak_components(g);
    std::int32_t m = -1;
    for (std::int32_t c : comp) m = std::max(m, c);
    return m + 1;
}

std::vector<std::pair<std::int32_t, std::int32_t>> underlying_graph(const KnnDigraph& g) {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(g.heads.size());
    for (std::int32_t v = 0; v < g.n; ++v)
        for (std::int32_t u : g.row(v))
            edges.emplace_back(std::min(v, u), std::max(v, u));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

void MarkVector::validate(std::int64_t n) const {
    if (num_classes < 1) throw InvalidArgument("mark space needs at least one class");
    if (static_cast<std::int64_t>(marks.size()) != n)
        throw InvalidArgument("mark vector length does not match vertex count");
    for (std::int32_t m : marks)
        if (m < 1 || m > num_classes) throw InvalidArgument("mark out of range [1, m]");
}

std::int64_t count_marked_arcs(const KnnDigraph& g, const MarkVector& marks, std::int32_t i,
                               std::int32_t j) {
    marks.validate(g.n);
    if (i < 1 || i > marks.num_classes || j < 1 || j > marks.num_classes)
        throw InvalidArgument("mark class out of range");
    std::int64_t count = 0;
    for (std::int32_t v = 0; v < g.n; ++v) {
        if (marks.marks[v] != i) continue;
        for (std::int32_t u : g.row(v))
            if (marks.marks[u] == j) ++count;
    }
    return count;
}

}  // namespace knnd
