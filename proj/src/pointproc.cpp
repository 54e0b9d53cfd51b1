#include "knnd/pointproc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "knnd/closedform.hpp"

namespace knnd {

void ProcessSpec::validate() const {
    if (n < 1) throw InvalidArgument("process size n must be >= 1");
    if (region.dim() < 1) throw InvalidArgument("region dimension must be >= 1");
}

void sample_point_into(const Region& region, Philox& rng, double* out) {
    const int d = region.dim();
    switch (region.kind()) {
        case Region::Kind::UnitCube:
            for (int i = 0; i < d; ++i) out[i] = rng.next_double();
            return;
        case Region::Kind::Box:
            for (int i = 0; i < d; ++i)
                out[i] = region.lo()[i] + rng.next_double() * (region.hi()[i] - region.lo()[i]);
            return;
        case Region::Kind::Ball: {
            // normalized gaussian direction, radius by inversion
            double norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                out[i] = rng.next_gaussian();
                norm2 += out[i] * out[i];
            }
            while (norm2 == 0.0) {  // essentially impossible, but stay total
                for (int i = 0; i < d; ++i) {
                    out[i] = rng.next_gaussian();
                    norm2 += out[i] * out[i];
                }
            }
            const double r = region.ball_radius() * std::pow(rng.next_double(), 1.0 / d);
            const double scale = r / std::sqrt(norm2);
            for (int i = 0; i < d; ++i) out[i] = region.ball_center()[i] + out[i] * scale;
            return;
        }
    }
}

static PointSet sample_n(const Region& region, std::int64_t count, Philox& rng) {
    PointSet ps(region.dim());
    ps.reserve(count);
    std::vector<double> buf(region.dim());
    for (std::int64_t i = 0; i < count; ++i) {
        sample_point_into(region, rng, buf.data());
        ps.add(buf);
    }
    return ps;
}

PointSet sample_binomial(const ProcessSpec& spec, std::uint64_t stream) {
    spec.validate();
    if (spec.kind != ProcessSpec::Kind::Binomial)
        throw InvalidArgument("sample_binomial requires a binomial spec");
    Philox rng(spec.seed, stream);
    return sample_n(spec.region, spec.n, rng);
}

PointSet sample_poisson(const ProcessSpec& spec, std::uint64_t stream) {
    spec.validate();
    if (spec.kind != ProcessSpec::Kind::Poisson)
        throw InvalidArgument("sample_poisson requires a poisson spec");
    Philox rng(spec.seed, stream);
    const std::int64_t count = rng.next_poisson(static_cast<double>(spec.n));
    return sample_n(spec.region, count, rng);
}

PointSet sample_process(const ProcessSpec& spec, std::uint64_t stream) {
    return spec.kind == ProcessSpec::Kind::Binomial ? sample_binomial(spec, stream)
                                                    : sample_poisson(spec, stream);
}

std::vector<std::vector<double>> fixture_anchors(int d) {
    if (d == 1) return {{1.0}, {-1.0}};
    if (d == 2) {
        std::vector<std::vector<double>> a;
        for (int t = 0; t < 5; ++t) {
            const double ang = 2.0 * std::numbers::pi * t / 5.0;
            a.push_back({std::cos(ang), std::sin(ang)});
        }
        return a;
    }
    throw InvalidArgument("fixture anchors known for d in {1,2} only");
}

PointSet build_indegree_fixture(int d, int k, std::span<const int> class_sizes) {
    if (d != 1 && d != 2) throw InvalidArgument("indegree fixture supports d in {1,2}");
    if (k < 1) throw InvalidArgument("k must be positive");
    const auto anchors = fixture_anchors(d);
    const int kappa = kappa_prime_bound(d);
    if (static_cast<int>(class_sizes.size()) != kappa)
        throw InvalidArgument("expected " + std::to_string(kappa) + " class sizes for d=" +
                              std::to_string(d));

    long j = 0;
    for (int s : class_sizes) {
        if (s < 0) throw InvalidArgument("class sizes must be nonnegative");
        if (s > k)
            throw ImpossibleIndegree("class size " + std::to_string(s) + " exceeds k=" +
                                     std::to_string(k) + "; indegree above kappa'(d)*k is impossible");
        j += s;
    }
    if (j > static_cast<long>(kappa) * k)
        throw ImpossibleIndegree("requested indegree " + std::to_string(j) + " exceeds kappa'(d)*k = " +
                                 std::to_string(static_cast<long>(kappa) * k));

    // minimum anchor chord; epsilon at half the admissible bound
    double r = 4.0;
    for (std::size_t a = 0; a < anchors.size(); ++a)
        for (std::size_t b = a + 1; b < anchors.size(); ++b)
            r = std::min(r, distance(anchors[a], anchors[b]));
    const double eps = 0.5 * std::min((r - 1.0) / 4.0, 0.25);

    const std::int64_t n = static_cast<std::int64_t>(k) * (kappa + 1) + 2;
    PointSet ps(d);
    ps.reserve(n);

    std::vector<double> buf(d);
    auto jitter_into = [&](std::span<const double> center, Philox& rng) {
        // uniform in the epsilon-ball around the centre
        const Region ball = Region::ball({center.begin(), center.end()}, eps);
        sample_point_into(ball, rng, buf.data());
        ps.add(buf);
    };

    ps.add(std::vector<double>(d, 0.0));  // v_0 at the origin
    for (int i = 0; i < kappa; ++i) {
        Philox rng(0x6b6e6e64u ^ (static_cast<std::uint64_t>(d) << 32 | k), i);
        for (int t = 0; t < class_sizes[i]; ++t) jitter_into(anchors[i], rng);
    }
    std::vector<double> far(d, 0.0);
    far[0] = 3.0;
    Philox rng(0x6b6e6e64u ^ (static_cast<std::uint64_t>(d) << 32 | k), kappa);
    for (std::int64_t t = ps.size(); t < n; ++t) jitter_into(far, rng);
    return ps;
}

}  // namespace knnd
