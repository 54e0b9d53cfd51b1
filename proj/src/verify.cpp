#include "knnd/verify.hpp"

#include "knnd/closedform.hpp"
#include "knnd/motifs.hpp"
#include "knnd/pointproc.hpp"
#include "knnd/rng.hpp"

namespace knnd {

std::optional<std::string> check_digraph_identities(const KnnDigraph& g) {
    const auto hist = indegree_histogram(g);  // throws if the indegree bound is violated
    const std::int64_t n = g.n;
    const std::int64_t k = g.k;

    std::int64_t sum = 0, weighted = 0, pairs = 0;
    for (std::size_t j = 0; j < hist.size(); ++j) {
        sum += hist[j];
        weighted += static_cast<std::int64_t>(j) * hist[j];
        pairs += static_cast<std::int64_t>(j) * (static_cast<std::int64_t>(j) - 1) / 2 * hist[j];
    }
    if (sum != n) return "sum_Qj == n";
    if (weighted != n * k) return "sum_j_Qj == nk";
    // sum (j-k) Qj == 0 follows from the two above but is the paper's stated form
    if (weighted - k * sum != 0) return "sum_(j-k)_Qj == 0";

    const std::int64_t q = count_shared(g);
    if (q != pairs) return "Q == sum_C(j,2)_Qj";
    if (q < n * k * (k - 1) / 2) return "Q >= nk(k-1)/2";

    if (const auto bound = try_kappa_prime_bound(g.dim)) {
        if (g.max_indegree() > *bound * g.k) return "max_indegree <= kappa'k";
    }

    if (g.k == 1) {
        if (weak_component_count(g) != count_reflexive(g)) return "k=1: components == R";
    }

    for (std::size_t j = 0; j < hist.size(); ++j)
        if (qj_via_inclusion_exclusion(g, static_cast<int>(j)) != hist[j])
            return "inclusion-exclusion Qj";

    return std::nullopt;
}

namespace {
struct InstanceParams {
    int d;
    int k;
    std::int64_t n;
    std::uint64_t sample_seed;
};

InstanceParams instance_params(const IdentitySuiteConfig& cfg, int i) {
    Philox rng(cfg.seed, static_cast<std::uint64_t>(i));
    InstanceParams p;
    p.d = 1 + static_cast<int>(rng.next_below(cfg.dmax));
    p.k = 1 + static_cast<int>(rng.next_below(cfg.kmax));
    p.n = cfg.nmin + static_cast<std::int64_t>(rng.next_below(cfg.nmax - cfg.nmin + 1));
    p.sample_seed = rng.next_u64();
    return p;
}
}  // namespace

std::string describe_identity_instance(const IdentitySuiteConfig& cfg, int i) {
    const auto p = instance_params(cfg, i);
    return "instance " + std::to_string(i) + ": d=" + std::to_string(p.d) +
           " k=" + std::to_string(p.k) + " n=" + std::to_string(p.n) +
           " seed=" + std::to_string(p.sample_seed);
}

std::vector<IdentityFailure> run_identity_suite(const IdentitySuiteConfig& cfg) {
    std::vector<IdentityFailure> failures;
    for (int i = 0; i < cfg.instances; ++i) {
        const auto p = instance_params(cfg, i);
        ProcessSpec spec;
        spec.kind = ProcessSpec::Kind::Binomial;
        spec.n = p.n;
        spec.region = Region::unit_cube(p.d);
        spec.seed = p.sample_seed;
        const PointSet ps = sample_binomial(spec);
        const KnnDigraph g = build_knn_digraph(ps, p.k, 1);
        if (const auto violated = check_digraph_identities(g))
            failures.push_back({*violated, describe_identity_instance(cfg, i)});
    }
    return failures;
}

}  // namespace knnd
