#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "knnd/geometry.hpp"
#include "knnd/rng.hpp"

namespace knnd {

/// Seeded sampling plan for a binomial process U_n or homogeneous Poisson
/// process P_n of intensity n/m(B_0) on a region.
struct ProcessSpec {
    enum class Kind { Binomial, Poisson };

    Kind kind = Kind::Binomial;
    std::int64_t n = 0;          // sample size / expected count
    Region region = Region::unit_cube(1);
    std::uint64_t seed = 0;

    void validate() const;
};

/// One uniform point on the region, consuming draws from rng.
void sample_point_into(const Region& region, Philox& rng, double* out);

/// Exactly n i.i.d. uniform points. Deterministic given (seed, stream).
PointSet sample_binomial(const ProcessSpec& spec, std::uint64_t stream = 0);

/// Poisson(n)-many i.i.d. uniform points, i.e. an HPP of intensity
/// n/m(B_0) restricted to the region. Deterministic given (seed, stream).
PointSet sample_poisson(const ProcessSpec& spec, std::uint64_t stream = 0);

/// Dispatch on spec.kind.
PointSet sample_process(const ProcessSpec& spec, std::uint64_t stream = 0);

/// Anchor directions used by the indegree fixture: d=1 gives {+1,-1}, d=2
/// the regular pentagon on the unit circle (minimum chord 2 sin(pi/5) > 1).
std::vector<std::vector<double>> fixture_anchors(int d);

/// Deterministic point set in which the centre point v_0 (id 0) has
/// indegree exactly j = sum(class_sizes) in the kNN digraph: class_sizes[i]
/// points land in an epsilon-ball at anchor a_i, the remaining points in a
/// far cluster at (3,0,...,0). Total size is k*(kappa'+1)+2.
///
/// Throws ImpossibleIndegree when any class exceeds k or j > kappa'(d)*k.
PointSet build_indegree_fixture(int d, int k, std::span<const int> class_sizes);

}  // namespace knnd
