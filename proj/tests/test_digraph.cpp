#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "figure1.hpp"
#include "knnd/closedform.hpp"
#include "knnd/motifs.hpp"
#include "knnd/oracle.hpp"
#include "knnd/pointproc.hpp"
#include "knnd/verify.hpp"

using namespace knnd;

namespace {
PointSet random_points(int d, std::int64_t n, std::uint64_t seed) {
    ProcessSpec spec;
    spec.n = n;
    spec.region = Region::unit_cube(d);
    spec.seed = seed;
    return sample_binomial(spec);
}
}  // namespace

TEST_CASE("two points, k=1: mutual arcs") {
    PointSet ps(1, {0.0, 1.0});
    const KnnDigraph g = build_knn_digraph(ps, 1, 1);
    CHECK(g.arc_count() == 2);
    CHECK(g.has_arc(0, 1));
    CHECK(g.has_arc(1, 0));
    CHECK(count_reflexive(g) == 1);
    CHECK(weak_component_count(g) == 1);
    CHECK(underlying_graph(g).size() == 1);
    const auto hist = indegree_histogram(g);
    CHECK(hist[1] == 2);
}

TEST_CASE("insufficient points") {
    PointSet ps(1, {0.0, 1.0});
    CHECK_THROWS_AS(build_knn_digraph(ps, 2, 1), InsufficientPoints);
}

TEST_CASE("figure-1 statistics at k=1 and k=2") {
    const PointSet ps = testutil::figure1_points();

    const KnnDigraph g1 = build_knn_digraph(ps, 1, 1);
    CHECK(count_reflexive(g1) == 3);
    CHECK(count_shared(g1) == 3);
    const auto h1 = indegree_histogram(g1);
    CHECK(h1[0] == 3);
    CHECK(h1[1] == 4);
    CHECK(h1[2] == 3);
    for (std::size_t j = 3; j < h1.size(); ++j) CHECK(h1[j] == 0);
    CHECK(weak_component_count(g1) == 3);
    CHECK(underlying_graph(g1).size() == 10 - 3);  // nk - R

    const KnnDigraph g2 = build_knn_digraph(ps, 2, 1);
    CHECK(count_reflexive(g2) == 6);
    CHECK(count_shared(g2) == 17);
    const auto h2 = indegree_histogram(g2);
    CHECK(h2[0] == 1);
    CHECK(h2[1] == 3);
    CHECK(h2[2] == 2);
    CHECK(h2[3] == 3);
    CHECK(h2[4] == 1);
}

TEST_CASE("arc count and head ordering") {
    const PointSet ps = random_points(2, 80, 9);
    const KnnDigraph g = build_knn_digraph(ps, 3, 1);
    CHECK(g.arc_count() == 80 * 3);
    for (std::int32_t v = 0; v < g.n; ++v) {
        double prev = -1.0;
        for (std::int32_t u : g.row(v)) {
            const double d = distance(ps.point(v), ps.point(u));
            CHECK(d >= prev);
            prev = d;
        }
    }
}

TEST_CASE("random digraph equals brute-force ranking oracle") {
    const PointSet ps = random_points(2, 25, 123);
    const KnnDigraph g = build_knn_digraph(ps, 2, 1);
    for (std::int32_t v = 0; v < g.n; ++v) {
        const auto expect = oracle::brute_knn(ps, v, 2);
        const auto row = g.row(v);
        CHECK(std::vector<std::int32_t>(row.begin(), row.end()) == expect);
    }
}

TEST_CASE("deterministic identities hold on random instances") {
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + trial % 3;
        const int k = 1 + trial % 3;
        const PointSet ps = random_points(d, 60 + trial * 7, 500 + trial);
        const KnnDigraph g = build_knn_digraph(ps, k, 1);
        CHECK(!check_digraph_identities(g).has_value());

        // underlying graph: edge count + R == nk
        CHECK(static_cast<std::int64_t>(underlying_graph(g).size()) + count_reflexive(g) ==
              g.arc_count());
    }
}

TEST_CASE("k=1 component count equals reflexive count on 100 random sets") {
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + trial % 3;
        const PointSet ps = random_points(d, 40 + trial, 9000 + trial);
        const KnnDigraph g = build_knn_digraph(ps, 1, 1);
        CHECK(weak_component_count(g) == count_reflexive(g));
        // every 1NN component has at least two vertices
        const auto comp = weak_components(g);
        std::vector<int> sizes(weak_component_count(g), 0);
        for (std::int32_t c : comp) ++sizes[c];
        for (int s : sizes) CHECK(s >= 2);
    }
}

TEST_CASE("fault injection: corrupted digraph is caught by the identity check") {
    const PointSet ps = random_points(2, 60, 4242);
    KnnDigraph g = build_knn_digraph(ps, 2, 1);
    REQUIRE(!check_digraph_identities(g).has_value());
    // simulate a miscounted indegree: the arc total no longer matches
    ++g.indegree[0];
    const auto violated = check_digraph_identities(g);
    REQUIRE(violated.has_value());
    CHECK(*violated == "sum_j_Qj == nk");
}

TEST_CASE("d=4 uses the plain kissing number as the indegree bound") {
    const PointSet ps = random_points(4, 800, 314);
    const KnnDigraph g = build_knn_digraph(ps, 2, 1);
    const auto hist = indegree_histogram(g);
    CHECK(hist.size() == 24 * 2 + 1);
    CHECK(!check_digraph_identities(g).has_value());
}

TEST_CASE("unknown-bound dimensions fall back to a max-sized histogram") {
    const PointSet ps = random_points(5, 300, 315);
    const KnnDigraph g = build_knn_digraph(ps, 1, 1);
    const auto hist = indegree_histogram(g);
    CHECK(static_cast<std::int32_t>(hist.size()) == g.max_indegree() + 1);
    std::int64_t total = 0;
    for (const auto h : hist) total += h;
    CHECK(total == 300);
}

TEST_CASE("marked arcs") {
    const PointSet ps = random_points(2, 30, 88);
    const KnnDigraph g = build_knn_digraph(ps, 1, 1);

    MarkVector all_ones;
    all_ones.num_classes = 2;
    all_ones.marks.assign(30, 1);
    CHECK(count_marked_arcs(g, all_ones, 1, 1) == g.arc_count());
    CHECK(count_marked_arcs(g, all_ones, 1, 2) == 0);
    CHECK_THROWS_AS(count_marked_arcs(g, all_ones, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(count_marked_arcs(g, all_ones, 1, 3), InvalidArgument);

    // two classes: partition of arcs, and each N_ij equals a direct scan
    MarkVector mv;
    mv.num_classes = 2;
    Philox rng(7, 7);
    for (int i = 0; i < 30; ++i) mv.marks.push_back(1 + static_cast<int>(rng.next_below(2)));
    std::int64_t total = 0;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            const std::int64_t nij = count_marked_arcs(g, mv, i, j);
            std::int64_t scan = 0;
            for (std::int32_t v = 0; v < g.n; ++v)
                for (std::int32_t u : g.row(v))
                    if (mv.marks[v] == i && mv.marks[u] == j) ++scan;
            CHECK(nij == scan);
            total += nij;
        }
    CHECK(total == g.arc_count());
}

TEST_CASE("add-one cost: vertex count statistic always changes by one") {
    const PointSet ps = random_points(2, 50, 31);
    StatisticSpec count_vertices{{{1.0, MotifPattern::single_vertex()}}};
    const std::vector<double> center{0.5, 0.5};
    CHECK(add_one_cost(ps, 2, count_vertices, center) == 1.0);
}

TEST_CASE("add-one cost rejects a coincident insertion point") {
    const PointSet ps = random_points(2, 20, 32);
    StatisticSpec spec{{{1.0, MotifPattern::single_vertex()}}};
    const auto p0 = ps.point(0);
    CHECK_THROWS_AS(add_one_cost(ps, 1, spec, p0), InvalidArgument);
}

TEST_CASE("add-one cost on the paired-anchor configuration changes R by -k") {
    // E3-style: k points at each of two anchors, singletons just beyond,
    // every other anchor direction backed by a full far cluster.
    for (int k = 1; k <= 3; ++k) {
        const auto anchors = fixture_anchors(2);
        const int kappa = static_cast<int>(anchors.size());
        double rmin = 4.0;
        for (int a = 0; a < kappa; ++a)
            for (int b = a + 1; b < kappa; ++b)
                rmin = std::min(rmin, distance(anchors[a], anchors[b]));
        const double eps = (rmin - 1.0) / 16.0;

        PointSet ps(2);
        Philox rng(k, 0);
        auto sprinkle = [&](double cx, double cy, int count) {
            for (int t = 0; t < count; ++t)
                ps.add(std::vector<double>{cx + eps * (rng.next_double() - 0.5),
                                           cy + eps * (rng.next_double() - 0.5)});
        };
        for (int i = 0; i < kappa; ++i) {
            const int si = i < 2 ? k : 0;
            const double br = (3.0 + rmin) / 2.0;  // b_i beyond a_i, gap in (1, r)
            sprinkle(anchors[i][0], anchors[i][1], si);
            sprinkle(br * anchors[i][0], br * anchors[i][1], k + 1 - si);
        }
        sprinkle(40.0, 0.0, k + 1);  // remote crowd

        StatisticSpec reflexive{{{1.0, MotifPattern::mutual_pair()}}};
        const std::vector<double> origin{0.0, 0.0};
        CHECK(add_one_cost(ps, k, reflexive, origin) == doctest::Approx(-k));
    }
}

TEST_CASE("add-one cost of R is bounded by k(kappa'+1) on random sets") {
    StatisticSpec reflexive{{{1.0, MotifPattern::mutual_pair()}}};
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + trial % 2;
        const int k = 1 + trial % 3;
        const PointSet ps = random_points(d, 40 + trial, 7100 + trial);
        std::vector<double> center(d, 0.5);
        const double delta = add_one_cost(ps, k, reflexive, center);

        // recompute-both-sides oracle
        PointSet enlarged(d, ps.coords());
        enlarged.add(center);
        const double before = static_cast<double>(count_reflexive(build_knn_digraph(ps, k, 1)));
        const double after =
            static_cast<double>(count_reflexive(build_knn_digraph(enlarged, k, 1)));
        CHECK(delta == after - before);
        CHECK(std::abs(delta) <= k * (kappa_prime_bound(d) + 1));
    }
}
