#include "knnd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace knnd {

PointSet::PointSet(int dim) : dim_(dim) {
    if (dim <= 0) throw InvalidArgument("PointSet dimension must be positive");
}

PointSet::PointSet(int dim, std::vector<double> flat_coords) : dim_(dim), coords_(std::move(flat_coords)) {
    if (dim <= 0) throw InvalidArgument("PointSet dimension must be positive");
    if (coords_.size() % dim != 0)
        throw DimensionMismatch("flat coordinate array length is not a multiple of dim");
    for (double c : coords_)
        if (!std::isfinite(c)) throw InvalidArgument("non-finite coordinate");
}

void PointSet::add(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim_)
        throw DimensionMismatch("point dimension does not match the set");
    for (double c : p)
        if (!std::isfinite(c)) throw InvalidArgument("non-finite coordinate");
    coords_.insert(coords_.end(), p.begin(), p.end());
}

double squared_distance(std::span<const double> p, std::span<const double> q) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("distance between points of unequal dimension");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]) || !std::isfinite(q[i]))
            throw InvalidArgument("non-finite coordinate in distance");
    return std::sqrt(squared_distance(p, q));
}

double unit_ball_volume(int dim) {
    if (dim <= 0) throw InvalidArgument("dimension must be positive");
    return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

Region Region::unit_cube(int dim) {
    if (dim <= 0) throw InvalidArgument("region dimension must be positive");
    Region r;
    r.kind_ = Kind::UnitCube;
    r.dim_ = dim;
    r.lo_.assign(dim, 0.0);
    r.hi_.assign(dim, 1.0);
    r.volume_ = 1.0;
    return r;
}

Region Region::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw DimensionMismatch("box bounds of unequal or zero dimension");
    Region r;
    r.kind_ = Kind::Box;
    r.dim_ = static_cast<int>(lo.size());
    r.volume_ = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] > lo[i])) throw InvalidArgument("box must have nonempty interior");
        r.volume_ *= hi[i] - lo[i];
    }
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

Region Region::ball(std::vector<double> center, double radius) {
    if (center.empty()) throw DimensionMismatch("ball center of zero dimension");
    if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
    Region r;
    r.kind_ = Kind::Ball;
    r.dim_ = static_cast<int>(center.size());
    r.center_ = std::move(center);
    r.radius_ = radius;
    r.volume_ = unit_ball_volume(r.dim_) * std::pow(radius, r.dim_);
    return r;
}

Region Region::unit_volume_ball(int dim) {
    const double radius = std::pow(1.0 / unit_ball_volume(dim), 1.0 / dim);
    return ball(std::vector<double>(dim, 0.0), radius);
}

std::vector<double> Region::center() const {
    if (kind_ == Kind::Ball) return center_;
    std::vector<double> c(dim_);
    for (int i = 0; i < dim_; ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
    return c;
}

bool Region::contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("point/region dimension mismatch");
    if (kind_ == Kind::Ball) {
        return squared_distance(p, center_) <= radius_ * radius_;
    }
    for (int i = 0; i < dim_; ++i)
        if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// KnnIndex

namespace {
struct Candidate {
    double d2;
    std::int32_t id;
    // "worse" ordering for the max-heap: larger distance first, larger id
    // breaking exact distance ties so the kept set is the lexicographic
    // minimum regardless of traversal order.
    bool operator<(const Candidate& o) const noexcept {
        return d2 < o.d2 || (d2 == o.d2 && id < o.id);
    }
};
}  // namespace

// Bounded max-heap of the `want` best candidates.
struct NeighborHeap {
    explicit NeighborHeap(int want) : want_(want) { data_.reserve(want); }

    double worst_d2() const noexcept {
        return full() ? data_.front().d2 : std::numeric_limits<double>::infinity();
    }
    bool full() const noexcept { return static_cast<int>(data_.size()) >= want_; }

    void offer(double d2, std::int32_t id) noexcept {
        if (!full()) {
            data_.push_back({d2, id});
            std::push_heap(data_.begin(), data_.end());
            return;
        }
        const Candidate c{d2, id};
        if (c < data_.front()) {
            std::pop_heap(data_.begin(), data_.end());
            data_.back() = c;
            std::push_heap(data_.begin(), data_.end());
        }
    }

    // ascending (d2, id)
    std::vector<Candidate> sorted() {
        std::vector<Candidate> out = data_;
        std::sort(out.begin(), out.end());
        return out;
    }

    int want_;
    std::vector<Candidate> data_;
};

KnnIndex::KnnIndex(const PointSet& ps) : n_(ps.size()), dim_(ps.dim()) {
    if (ps.empty()) throw InvalidArgument("cannot index an empty point set");
    ids_.resize(n_);
    for (std::int64_t i = 0; i < n_; ++i) ids_[i] = static_cast<std::int32_t>(i);
    pts_ = ps.coords();
    if (n_ >= kBruteForceCutoff) {
        nodes_.reserve(static_cast<std::size_t>(2 * n_ / 8 + 2));
        root_ = build(0, static_cast<std::int32_t>(n_));
    }
}

std::int32_t KnnIndex::build(std::int32_t begin, std::int32_t end) {
    constexpr std::int32_t kLeafSize = 16;
    const std::int32_t node_id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[node_id].begin = begin;
        nodes_[node_id].end = end;
        return node_id;
    }
    // widest-spread axis, median split
    int axis = 0;
    double best_spread = -1.0;
    for (int a = 0; a < dim_; ++a) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::int32_t i = begin; i < end; ++i) {
            const double c = pts_[static_cast<std::size_t>(ids_[i]) * dim_ + a];
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = a;
        }
    }
    const std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                         const double ca = pts_[static_cast<std::size_t>(a) * dim_ + axis];
                         const double cb = pts_[static_cast<std::size_t>(b) * dim_ + axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const double split = pts_[static_cast<std::size_t>(ids_[mid]) * dim_ + axis];
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    Node& nd = nodes_[node_id];
    nd.axis = axis;
    nd.split = split;
    nd.left = left;
    nd.right = right;
    return node_id;
}

void KnnIndex::search(std::span<const double> q, std::int32_t exclude,
                      NeighborHeap& heap) const {
    if (root_ < 0) {
        const double* base = pts_.data();
        for (std::int64_t i = 0; i < n_; ++i) {
            if (i == exclude) continue;
            const double d2 = squared_distance(q, {base + i * dim_, static_cast<std::size_t>(dim_)});
            heap.offer(d2, static_cast<std::int32_t>(i));
        }
        return;
    }

    struct Frame {
        std::int32_t node;
        double dist2;  // lower bound on distance^2 to the node's slab
    };
    Frame stack[128];
    int top = 0;
    stack[top++] = {root_, 0.0};
    while (top > 0) {
        const Frame f = stack[--top];
        if (f.dist2 > heap.worst_d2()) continue;
        const Node& nd = nodes_[f.node];
        if (nd.axis < 0) {
            for (std::int32_t i = nd.begin; i < nd.end; ++i) {
                const std::int32_t id = ids_[i];
                if (id == exclude) continue;
                const double d2 = squared_distance(
                    q, {pts_.data() + static_cast<std::size_t>(id) * dim_, static_cast<std::size_t>(dim_)});
                heap.offer(d2, id);
            }
            continue;
        }
        const double delta = q[nd.axis] - nd.split;
        const std::int32_t near = delta < 0.0 ? nd.left : nd.right;
        const std::int32_t far = delta < 0.0 ? nd.right : nd.left;
        const double far_d2 = delta * delta;
        // far child first so the near child is popped (and scanned) first
        if (far_d2 <= heap.worst_d2()) stack[top++] = {far, std::max(f.dist2, far_d2)};
        stack[top++] = {near, f.dist2};
    }
}

std::vector<std::int32_t> KnnIndex::query(std::int32_t v, int k) const {
    std::vector<std::int32_t> out(static_cast<std::size_t>(k));
    query_into(v, k, out.data());
    return out;
}

void KnnIndex::query_into(std::int32_t v, int k, std::int32_t* out) const {
    if (k <= 0) throw InvalidArgument("k must be positive");
    if (v < 0 || v >= n_) throw InvalidArgument("point id out of range");
    if (k >= n_)
        throw InsufficientPoints("k-NN query needs at least k+1 points");

    // Ask for one extra neighbour so a tie at the k-th rank is visible.
    const int want = static_cast<int>(std::min<std::int64_t>(k + 1, n_ - 1));
    NeighborHeap heap(want);
    const std::span<const double> q{pts_.data() + static_cast<std::size_t>(v) * dim_,
                                    static_cast<std::size_t>(dim_)};
    search(q, v, heap);
    auto best = heap.sorted();

    std::int64_t ties = 0;
    for (int i = 0; i + 1 < static_cast<int>(best.size()); ++i) {
        const double a = std::sqrt(best[i].d2), b = std::sqrt(best[i + 1].d2);
        if (b - a <= kTieRelTolerance * std::max(a, b)) ++ties;
    }
    if (ties > 0) tie_events_.fetch_add(ties, std::memory_order_relaxed);

    for (int i = 0; i < k; ++i) out[i] = best[i].id;
}

std::vector<std::int32_t> KnnIndex::query_point(std::span<const double> p, int k) const {
    if (k <= 0) throw InvalidArgument("k must be positive");
    if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("query point dimension mismatch");
    if (k > n_) throw InsufficientPoints("k-NN query needs at least k points");
    NeighborHeap heap(k);
    search(p, -1, heap);
    auto best = heap.sorted();
    std::vector<std::int32_t> out(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) out[i] = best[i].id;
    return out;
}

}  // namespace knnd
