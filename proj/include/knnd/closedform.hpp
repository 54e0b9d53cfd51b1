#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knnd/errors.hpp"

namespace knnd {

/// omega(d): volume of a unit ball divided by the volume of the union of
/// two unit balls at centre distance 1. Piecewise series, odd/even branch.
double omega(int d);

/// The odd-d branch is rational; returns the reduced fraction.
/// Supported while the exact arithmetic fits in 64-bit (d <= 15 is ample).
std::pair<std::int64_t, std::int64_t> omega_rational_odd(int d);

/// r_d(s,t): limit density of reflexive pairs in which the arc ranks are
/// s and t. Finite sum with factorial coefficients.
double r_pair(int d, int s, int t);

/// r(d,k) = sum_{s,t=1..k} r_d(s,t): limit of R^(k)/n.
double r_limit(int d, int k);

/// q(1,k) = k^2/2 - k/4, exact for d=1.
double q_limit_d1(int k);

/// lim_{d->inf} q(d,k) = k^2/2.
double q_limit_highdim(int k);

/// lim_{d->inf} q_j(d,k) = e^{-k} k^j / j!  (Poisson(k) mass at j).
double qj_limit_highdim(int j, int k);

/// kappa'(d) where known (2, 5, 12 for d=1,2,3), else the kissing number
/// kappa(d) (valid since kappa' <= kappa): 24 for d=4, 240 for d=8.
/// Throws UnknownBound for other dimensions.
int kappa_prime_bound(int d);
std::optional<int> try_kappa_prime_bound(int d);

/// One constant reported in the literature, with provenance.
struct KnownConstant {
    std::string name;  // q_j, q, r, tau2_R, sigma2_R, tau2_Q, sigma2_Q, tau2_j, sigma2_j
    int d = 0;
    int k = 0;
    std::optional<int> j;
    double value = 0.0;
    enum class Provenance { Exact, PaperApprox } provenance = Provenance::Exact;
    std::string source;  // who reported it, when two approximations coexist
};

/// Catalog of stated constants for (d, k); empty when none are known.
std::vector<KnownConstant> known_constants(int d, int k);
std::vector<KnownConstant> known_constants_all();

/// Kissing numbers kappa(d) (exact or interval) and the strict-distance
/// variant kappa'(d) where known.
struct KissingInfo {
    int d = 0;
    long kappa_lo = 0, kappa_hi = 0;        // kappa_lo == kappa_hi when exact
    std::optional<int> kappa_prime;
};
std::vector<KissingInfo> kissing_table();

struct B2Estimate {
    double value = 0.0;
    double std_error = 0.0;
    double truncation_bound = 0.0;  // bound on the mass dropped at radius T
    double radial_cutoff = 0.0;
    std::int64_t samples = 0;
};

/// Monte Carlo estimate of the two-point integral b_2(d) over the
/// mutual-NN-candidate domain ||x_i|| < ||x_1 - x_2||; cross-checks
/// q(d,1) = b_2(d)/2. Radii are importance-sampled on a truncated range;
/// the union volume of the two balls is estimated by hit-or-miss sampling
/// in their joint bounding box.
B2Estimate estimate_b2(int d, std::int64_t samples, std::uint64_t seed, int threads = 0);

}  // namespace knnd
