#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "figure1.hpp"
#include "knnd/geometry.hpp"
#include "knnd/oracle.hpp"
#include "knnd/pointproc.hpp"
#include "knnd/rng.hpp"

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

TEST_CASE("distance basics") {
    CHECK(distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(5.0));
    const std::vector<double> p{1.25, -2.5, 7.0};
    CHECK(distance(p, p) == 0.0);
    CHECK_THROWS_AS(distance(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    DimensionMismatch);
}

TEST_CASE("distance squared equals coordinate-wise sum on random pairs") {
    Philox rng(42, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_below(5));
        std::vector<double> a(d), b(d);
        for (int i = 0; i < d; ++i) {
            a[i] = rng.next_double() * 20.0 - 10.0;
            b[i] = rng.next_double() * 20.0 - 10.0;
        }
        double sum = 0.0;
        for (int i = 0; i < d; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
        const double dist = distance(a, b);
        CHECK(dist * dist == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("regions") {
    const Region cube = Region::unit_cube(3);
    CHECK(cube.volume() == 1.0);
    CHECK(cube.contains(std::vector<double>{0.5, 0.5, 0.5}));
    CHECK(!cube.contains(std::vector<double>{1.5, 0.5, 0.5}));

    const Region ball = Region::unit_volume_ball(2);
    CHECK(ball.volume() == doctest::Approx(1.0));
    CHECK(ball.ball_radius() == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));

    CHECK_THROWS_AS(Region::box({0.0}, {0.0}), InvalidArgument);
    CHECK_THROWS_AS(Region::ball({0.0, 0.0}, -1.0), InvalidArgument);
}

TEST_CASE("single point index answers only k=0 style queries") {
    PointSet ps(2, {0.25, 0.75});
    const KnnIndex idx(ps);
    CHECK(idx.size() == 1);
    CHECK_THROWS_AS(idx.query(0, 1), InsufficientPoints);
}

TEST_CASE("collinear three points, nearest by inspection") {
    PointSet ps(1, {0.0, 1.0, 3.0});
    const KnnIndex idx(ps);
    CHECK(idx.query(0, 1) == std::vector<std::int32_t>{1});
    CHECK(idx.query(0, 2) == std::vector<std::int32_t>{1, 2});
    CHECK(idx.query(2, 1) == std::vector<std::int32_t>{1});
}

TEST_CASE("figure-1 nearest neighbours: v6 and v10 are mutual") {
    const PointSet ps = testutil::figure1_points();
    const KnnIndex idx(ps);
    CHECK(idx.query(5, 1) == std::vector<std::int32_t>{9});  // NN(v6) = v10
    CHECK(idx.query(9, 1) == std::vector<std::int32_t>{5});  // NN(v10) = v6
}

TEST_CASE("kd-tree equals brute force on random sets") {
    // large enough to use the tree path
    const PointSet ps = random_points(2, 1000, 7);
    const KnnIndex idx(ps);
    for (std::int32_t v = 0; v < 1000; ++v)
        CHECK(idx.query(v, 3) == oracle::brute_knn(ps, v, 3));
}

TEST_CASE("random queries equal brute force across dims and k") {
    Philox rng(99, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_below(3));
        const std::int64_t n = 5 + static_cast<std::int64_t>(rng.next_below(200));
        const PointSet ps = random_points(d, n, 1000 + trial);
        const KnnIndex idx(ps);
        const int k = 1 + static_cast<int>(rng.next_below(std::min<std::int64_t>(4, n - 1)));
        const auto v = static_cast<std::int32_t>(rng.next_below(n));
        CHECK(idx.query(v, k) == oracle::brute_knn(ps, v, k));
    }
}

TEST_CASE("query(k) is a prefix of query(k+1)") {
    const PointSet ps = random_points(2, 300, 11);
    const KnnIndex idx(ps);
    for (std::int32_t v = 0; v < 50; ++v) {
        const auto a = idx.query(v, 3);
        const auto b = idx.query(v, 4);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST_CASE("index is invariant under point permutation up to relabeling") {
    const PointSet ps = random_points(2, 400, 5);
    const std::int64_t n = ps.size();

    // reverse the point order
    PointSet rev(2);
    for (std::int64_t i = n - 1; i >= 0; --i) rev.add(ps.point(i));
    const KnnIndex a(ps);
    const KnnIndex b(rev);
    for (std::int32_t v = 0; v < n; ++v) {
        auto from_a = a.query(v, 3);
        auto from_b = b.query(static_cast<std::int32_t>(n - 1 - v), 3);
        for (auto& id : from_b) id = static_cast<std::int32_t>(n - 1 - id);
        CHECK(from_a == from_b);
    }
}

TEST_CASE("duplicate point surfaces a tie at query time") {
    PointSet ps(2);
    Philox rng(3, 0);
    for (int i = 0; i < 20; ++i)
        ps.add(std::vector<double>{rng.next_double(), rng.next_double()});
    ps.add(ps.point(4));  // exact duplicate
    const KnnIndex idx(ps);
    CHECK(idx.tie_events() == 0);
    for (std::int32_t v = 0; v < idx.size(); ++v) idx.query(v, 1);
    CHECK(idx.tie_events() > 0);
    // resolution is by smaller id: the duplicate pair are each other's NN
    CHECK(idx.query(4, 1) == std::vector<std::int32_t>{20});
    CHECK(idx.query(20, 1) == std::vector<std::int32_t>{4});
}

TEST_CASE("ties within tolerance are detected and resolved by id") {
    // 0 is equidistant from 1 and 2; k=1 must pick the smaller id
    PointSet ps(2, {0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 5.0, 5.0});
    const KnnIndex idx(ps);
    CHECK(idx.query(0, 1) == std::vector<std::int32_t>{1});
    CHECK(idx.tie_events() > 0);
}
