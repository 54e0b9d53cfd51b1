#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "knnd/errors.hpp"

namespace knnd {

/// A finite set of points in R^d, stored row-major. A point's id is its
/// index in the set.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(int dim);
    PointSet(int dim, std::vector<double> flat_coords);

    int dim() const noexcept { return dim_; }
    std::int64_t size() const noexcept {
        return dim_ == 0 ? 0 : static_cast<std::int64_t>(coords_.size()) / dim_;
    }
    bool empty() const noexcept { return coords_.empty(); }

    std::span<const double> point(std::int64_t i) const {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const double> operator[](std::int64_t i) const { return point(i); }

    void add(std::span<const double> p);
    void reserve(std::int64_t n) { coords_.reserve(static_cast<std::size_t>(n) * dim_); }

    const std::vector<double>& coords() const noexcept { return coords_; }
    std::vector<double>& coords() noexcept { return coords_; }

private:
    int dim_ = 0;
    std::vector<double> coords_;
};

/// Euclidean distance; throws DimensionMismatch on unequal lengths and
/// InvalidArgument on non-finite coordinates.
double distance(std::span<const double> p, std::span<const double> q);

double squared_distance(std::span<const double> p, std::span<const double> q) noexcept;

/// Bounded sampling window with an analytically known volume.
class Region {
public:
    enum class Kind { UnitCube, Box, Ball };

    static Region unit_cube(int dim);
    static Region box(std::vector<double> lo, std::vector<double> hi);
    static Region ball(std::vector<double> center, double radius);
    /// Ball of unit volume centered at the origin.
    static Region unit_volume_ball(int dim);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    double volume() const noexcept { return volume_; }
    std::vector<double> center() const;
    bool contains(std::span<const double> p) const;

    const std::vector<double>& lo() const noexcept { return lo_; }
    const std::vector<double>& hi() const noexcept { return hi_; }
    const std::vector<double>& ball_center() const noexcept { return center_; }
    double ball_radius() const noexcept { return radius_; }

private:
    Region() = default;
    Kind kind_ = Kind::UnitCube;
    int dim_ = 0;
    double volume_ = 0.0;
    std::vector<double> lo_, hi_;     // Box
    std::vector<double> center_;      // Ball
    double radius_ = 0.0;             // Ball
};

/// Volume of the d-dimensional unit ball.
double unit_ball_volume(int dim);

// Two distances whose relative gap is below this are a tie; ties resolve
// to the smaller point id and are counted, never fatal.
inline constexpr double kTieRelTolerance = 1e-12;

/// Exact k-nearest-neighbour index over an immutable PointSet snapshot.
///
/// A kd-tree with median splits; point sets below kBruteForceCutoff are
/// scanned directly. Queries from concurrent threads are safe; the tie
/// counter is atomic.
class KnnIndex {
public:
    static constexpr std::int64_t kBruteForceCutoff = 64;

    explicit KnnIndex(const PointSet& ps);

    std::int64_t size() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }

    /// Ids of the k points nearest to point v (v itself excluded), sorted by
    /// increasing distance, ties by smaller id. Throws InsufficientPoints
    /// when k >= size().
    std::vector<std::int32_t> query(std::int32_t v, int k) const;
    void query_into(std::int32_t v, int k, std::int32_t* out) const;

    /// k nearest ids to an arbitrary location (no exclusion).
    std::vector<std::int32_t> query_point(std::span<const double> p, int k) const;

    std::int64_t tie_events() const noexcept { return tie_events_.load(std::memory_order_relaxed); }

private:
    struct Node {
        double split = 0.0;
        std::int32_t axis = -1;      // -1 marks a leaf
        std::int32_t begin = 0, end = 0;
        std::int32_t left = -1, right = -1;
    };

    std::int32_t build(std::int32_t begin, std::int32_t end);
    void search(std::span<const double> q, std::int32_t exclude,
                struct NeighborHeap& heap) const;

    std::int64_t n_ = 0;
    int dim_ = 0;
    std::vector<double> pts_;            // reordered coordinates
    std::vector<std::int32_t> ids_;      // position -> original id
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
    mutable std::atomic<std::int64_t> tie_events_{0};
};

/// Convenience wrapper matching the one-shot usage pattern.
inline KnnIndex build_index(const PointSet& ps) { return KnnIndex(ps); }

}  // namespace knnd
