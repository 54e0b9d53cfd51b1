#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knnd/digraph.hpp"

namespace knnd {

/// Deterministic-identity suite over randomized kNN digraph instances.
struct IdentitySuiteConfig {
    int instances = 200;
    std::uint64_t seed = 0;
    int dmax = 3;   // dimensions 1..dmax
    int kmax = 3;   // k 1..kmax
    std::int64_t nmin = 50, nmax = 500;
};

struct IdentityFailure {
    std::string identity;  // which identity was violated
    std::string instance;  // how to reproduce it
};

/// Checks the exact integer identities a single digraph must satisfy;
/// returns the name of the first violated one, if any.
std::optional<std::string> check_digraph_identities(const KnnDigraph& g);

/// Descriptor of instance i (for reproduction messages).
std::string describe_identity_instance(const IdentitySuiteConfig& cfg, int i);

/// Samples `instances` digraphs and checks every identity on each.
std::vector<IdentityFailure> run_identity_suite(const IdentitySuiteConfig& cfg);

}  // namespace knnd
