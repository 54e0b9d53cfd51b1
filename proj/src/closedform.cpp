#include "knnd/closedform.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "knnd/geometry.hpp"
#include "knnd/rng.hpp"

namespace knnd {

namespace {

struct Frac {
    __int128 num = 0, den = 1;

    void reduce() {
        auto my_gcd = [](__int128 a, __int128 b) {
            if (a < 0) a = -a;
            while (b != 0) {
                const __int128 t = a % b;
                a = b;
                b = t;
            }
            return a;
        };
        const __int128 g = my_gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
    }

    Frac& operator+=(const Frac& o) {
        num = num * o.den + o.num * den;
        den *= o.den;
        reduce();
        return *this;
    }
};

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> omega_rational_odd(int d) {
    if (d < 1 || d % 2 == 0) throw InvalidArgument("omega_rational_odd needs odd d >= 1");
    const int m = (d - 1) / 2;
    // 3/2 + (1/2) sum_{i=1..m} [(2i-1)!!/(2i)!!] (3/4)^i, then invert
    Frac acc{3, 2};
    __int128 oddfac = 1, evenfac = 1, pow3 = 1, pow4 = 1;
    for (int i = 1; i <= m; ++i) {
        oddfac *= 2 * i - 1;
        evenfac *= 2 * i;
        pow3 *= 3;
        pow4 *= 4;
        Frac term{oddfac * pow3, 2 * evenfac * pow4};
        term.reduce();
        acc += term;
    }
    const __int128 num = acc.den, den = acc.num;  // inverted
    if (num > INT64_MAX || den > INT64_MAX)
        throw InvalidArgument("omega_rational_odd overflows 64-bit for this d");
    return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

double omega(int d) {
    if (d < 1) throw InvalidArgument("omega requires d >= 1");
    if (d % 2 == 1) {
        const int m = (d - 1) / 2;
        double sum = 0.0, coef = 1.0, pow34 = 1.0;
        for (int i = 1; i <= m; ++i) {
            coef *= static_cast<double>(2 * i - 1) / static_cast<double>(2 * i);
            pow34 *= 0.75;
            sum += coef * pow34;
        }
        return 1.0 / (1.5 + 0.5 * sum);
    }
    const int m = d / 2;
    double sum = 1.0, coef = 1.0, pow34 = 1.0;
    for (int i = 1; i <= m - 1; ++i) {
        coef *= static_cast<double>(2 * i) / static_cast<double>(2 * i + 1);
        pow34 *= 0.75;
        sum += coef * pow34;
    }
    const double sqrt3_over_2pi = std::sqrt(3.0) / (2.0 * 3.14159265358979323846264338327950288);
    return 1.0 / (4.0 / 3.0 + sqrt3_over_2pi * sum);
}

double r_pair(int d, int s, int t) {
    if (s < 1 || t < 1) throw InvalidArgument("r_pair requires s,t >= 1");
    const double w = omega(d);
    const double two_w_m1 = 2.0 * w - 1.0;
    const double one_m_w = 1.0 - w;
    double sum = 0.0;
    const int imax = std::min(s - 1, t - 1);
    for (int i = 0; i <= imax; ++i) {
        const double coef =
            factorial(s + t - i - 2) / (factorial(i) * factorial(s - i - 1) * factorial(t - i - 1));
        sum += coef * std::pow(two_w_m1, i) * std::pow(one_m_w, s + t - 2 * i - 2);
    }
    return 0.5 * w * sum;
}

double r_limit(int d, int k) {
    if (k < 1) throw InvalidArgument("r_limit requires k >= 1");
    double total = 0.0;
    for (int s = 1; s <= k; ++s)
        for (int t = 1; t <= k; ++t) total += r_pair(d, s, t);
    return total;
}

double q_limit_d1(int k) {
    if (k < 1) throw InvalidArgument("q_limit_d1 requires k >= 1");
    return 0.5 * k * static_cast<double>(k) - 0.25 * k;
}

double q_limit_highdim(int k) {
    if (k < 1) throw InvalidArgument("q_limit_highdim requires k >= 1");
    return 0.5 * k * static_cast<double>(k);
}

double qj_limit_highdim(int j, int k) {
    if (j < 0 || k < 1) throw InvalidArgument("qj_limit_highdim requires j >= 0, k >= 1");
    // e^{-k} k^j / j! accumulated in log space for large j
    double log_term = -static_cast<double>(k);
    for (int i = 1; i <= j; ++i) log_term += std::log(static_cast<double>(k)) - std::log(static_cast<double>(i));
    return std::exp(log_term);
}

std::optional<int> try_kappa_prime_bound(int d) {
    switch (d) {
        case 1: return 2;    // kappa'
        case 2: return 5;    // kappa'
        case 3: return 12;   // kappa'
        case 4: return 24;   // kappa(4); kappa' unknown but not larger
        case 8: return 240;  // kappa(8)
        default: return std::nullopt;
    }
}

int kappa_prime_bound(int d) {
    if (d < 1) throw InvalidArgument("dimension must be positive");
    if (const auto b = try_kappa_prime_bound(d)) return *b;
    throw UnknownBound("no usable indegree bound for d=" + std::to_string(d) +
                       "; only interval estimates of the kissing number exist");
}

std::vector<KnownConstant> known_constants_all() {
    using P = KnownConstant::Provenance;
    std::vector<KnownConstant> c;
    auto add = [&](std::string name, int d, int k, std::optional<int> j, double v, P p,
                   std::string src) {
        c.push_back({std::move(name), d, k, j, v, p, std::move(src)});
    };

    // d=1, k=1: every limit is known exactly
    add("q_j", 1, 1, 0, 0.25, P::Exact, "Bahadir-Ceyhan 2016");
    add("q_j", 1, 1, 1, 0.5, P::Exact, "Bahadir-Ceyhan 2016");
    add("q_j", 1, 1, 2, 0.25, P::Exact, "Bahadir-Ceyhan 2016");
    add("tau2_j", 1, 1, 0, 19.0 / 240.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("tau2_j", 1, 1, 1, 19.0 / 60.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("tau2_j", 1, 1, 2, 19.0 / 240.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("sigma2_j", 1, 1, 0, 17.0 / 120.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("sigma2_j", 1, 1, 1, 17.0 / 30.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("sigma2_j", 1, 1, 2, 17.0 / 120.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("tau2_Q", 1, 1, {}, 19.0 / 240.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("sigma2_Q", 1, 1, {}, 17.0 / 120.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("tau2_R", 1, 1, {}, 2.0 / 45.0, P::Exact, "Bahadir-Ceyhan 2016");
    add("sigma2_R", 1, 1, {}, 7.0 / 45.0, P::Exact, "Bahadir-Ceyhan 2016");

    // q(1,k) = k^2/2 - k/4 exactly; r(1,k) and r(2,k) as tabulated roundings
    for (int k = 1; k <= 5; ++k) add("q", 1, k, {}, q_limit_d1(k), P::Exact, "Schilling 1986");
    const double r1[] = {0.3333, 0.7407, 1.1728, 1.6168, 2.0680};
    const double r2[] = {0.3107, 0.7105, 1.1365, 1.5751, 2.0215};
    for (int k = 1; k <= 5; ++k) add("r", 1, k, {}, r1[k - 1], P::PaperApprox, "table, 4 decimals");
    for (int k = 1; k <= 5; ++k) add("r", 2, k, {}, r2[k - 1], P::PaperApprox, "table, 4 decimals");

    // d=2, k=1 indegree distribution (Cuzick-Edwards 1990)
    add("q_j", 2, 1, 0, 0.284, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q_j", 2, 1, 1, 0.463, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q_j", 2, 1, 2, 0.221, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q_j", 2, 1, 3, 3.04e-2, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q_j", 2, 1, 4, 6.58e-4, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q_j", 2, 1, 5, 1.90e-7, P::PaperApprox, "Cuzick-Edwards 1990");

    // q(2,k): the two cited approximation families slightly differ
    add("q", 2, 1, {}, 0.3166, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q", 2, 2, {}, 1.58685, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q", 2, 3, {}, 3.84845, P::PaperApprox, "Cuzick-Edwards 1990");
    add("q", 2, 4, {}, 7.1079, P::PaperApprox, "Cuzick-Edwards 1990 (table)");
    add("q", 2, 5, {}, 11.3667, P::PaperApprox, "Cuzick-Edwards 1990 (table)");
    add("q", 2, 1, {}, 0.315, P::PaperApprox, "Schilling 1986");
    add("q", 2, 2, {}, 1.575, P::PaperApprox, "Schilling 1986");
    add("q", 2, 3, {}, 3.82, P::PaperApprox, "Schilling 1986");
    add("q", 3, 1, {}, 0.355, P::PaperApprox, "Schilling 1986");
    add("q", 3, 2, {}, 1.645, P::PaperApprox, "Schilling 1986");
    add("q", 3, 3, {}, 3.93, P::PaperApprox, "Schilling 1986");
    return c;
}

std::vector<KnownConstant> known_constants(int d, int k) {
    std::vector<KnownConstant> out;
    for (auto& e : known_constants_all())
        if (e.d == d && e.k == k) out.push_back(e);
    return out;
}

std::vector<KissingInfo> kissing_table() {
    return {
        {1, 2, 2, 2},       {2, 6, 6, 5},        {3, 12, 12, 12},
        {4, 24, 24, {}},    {5, 40, 44, {}},     {6, 72, 78, {}},
        {7, 126, 134, {}},  {8, 240, 240, {}},   {24, 196560, 196560, {}},
    };
}

// ---------------------------------------------------------------------------
// b_2 estimation

namespace {

struct BlockMoments {
    double sum = 0.0, sumsq = 0.0;
};

BlockMoments b2_block(int d, std::int64_t nsamples, std::uint64_t seed, std::uint64_t block_id,
                      double lambda, double cutoff_T, double log_norm) {
    constexpr int kUnionHits = 512;
    Philox rng(seed, block_id);
    const double Z = 1.0 - std::exp(-lambda * std::pow(cutoff_T, d));
    const double Sd = d * unit_ball_volume(d);  // sphere surface area
    const double weight_base = Sd * Z / (d * lambda);
    (void)log_norm;

    std::vector<double> x1(d), x2(d), p(d);
    BlockMoments m;
    for (std::int64_t s = 0; s < nsamples; ++s) {
        const double u1 = rng.next_double(), u2 = rng.next_double();
        const double r1 = std::pow(-std::log1p(-u1 * Z) / lambda, 1.0 / d);
        const double r2 = std::pow(-std::log1p(-u2 * Z) / lambda, 1.0 / d);

        auto direction = [&](std::vector<double>& x, double r) {
            double n2 = 0.0;
            for (int i = 0; i < d; ++i) {
                x[i] = rng.next_gaussian();
                n2 += x[i] * x[i];
            }
            const double sc = r / std::sqrt(n2);
            for (int i = 0; i < d; ++i) x[i] *= sc;
        };
        direction(x1, r1);
        direction(x2, r2);

        double sep2 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double dd = x1[i] - x2[i];
            sep2 += dd * dd;
        }
        // Gamma_2 membership: each point closer to the origin than to the other
        double val = 0.0;
        if (r1 * r1 < sep2 && r2 * r2 < sep2) {
            // hit-or-miss union volume in the joint bounding box
            double box = 1.0;
            std::vector<double> lo(d), len(d);
            for (int i = 0; i < d; ++i) {
                lo[i] = std::min(x1[i] - r1, x2[i] - r2);
                const double hi = std::max(x1[i] + r1, x2[i] + r2);
                len[i] = hi - lo[i];
                box *= len[i];
            }
            int hits = 0;
            for (int t = 0; t < kUnionHits; ++t) {
                double d1 = 0.0, d2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    p[i] = lo[i] + rng.next_double() * len[i];
                    const double a = p[i] - x1[i], b = p[i] - x2[i];
                    d1 += a * a;
                    d2 += b * b;
                }
                if (d1 < r1 * r1 || d2 < r2 * r2) ++hits;
            }
            const double union_vol = box * hits / kUnionHits;
            const double w1 = weight_base * std::exp(lambda * std::pow(r1, d));
            const double w2 = weight_base * std::exp(lambda * std::pow(r2, d));
            val = std::exp(-union_vol) * w1 * w2;
        }
        m.sum += val;
        m.sumsq += val * val;
    }
    return m;
}

}  // namespace

B2Estimate estimate_b2(int d, std::int64_t samples, std::uint64_t seed, int threads) {
    if (d < 1 || d > 3) throw InvalidArgument("estimate_b2 supports d in {1,2,3}");
    if (samples < 10000) throw InvalidArgument("estimate_b2 needs at least 1e4 samples");

    const double vd = unit_ball_volume(d);
    const double lambda = 0.75 * vd;
    const double tail_exponent = 40.0;
    const double T = std::pow(tail_exponent / lambda, 1.0 / d);
    // integrand <= exp(-v_d (r1^d + r2^d)/2); both radial tails integrate to
    // 2 exp(-v_d T^d / 2), full integrals to 2, so dropped mass <= 8 e^{-v_d T^d/2}
    const double trunc_bound = 8.0 * std::exp(-0.5 * vd * std::pow(T, d));

    constexpr std::int64_t kBlock = 8192;
    const std::int64_t nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<BlockMoments> blocks(nblocks);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(nblocks)));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            const std::int64_t count = std::min(kBlock, samples - b * kBlock);
            blocks[b] = b2_block(d, count, seed, static_cast<std::uint64_t>(b), lambda, T, 0.0);
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // combine in block order
    double sum = 0.0, sumsq = 0.0, comp = 0.0, compsq = 0.0;
    for (const auto& b : blocks) {
        double y = b.sum - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        y = b.sumsq - compsq;
        t = sumsq + y;
        compsq = (t - sumsq) - y;
        sumsq = t;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq / n - mean * mean)) * n / (n - 1.0);
    return {mean, std::sqrt(var / n), trunc_bound, T, samples};
}

}  // namespace knnd
