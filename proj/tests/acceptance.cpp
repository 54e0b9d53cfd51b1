// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here; seeds are fixed so runs are reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "figure1.hpp"
#include "knnd/closedform.hpp"
#include "knnd/montecarlo.hpp"
#include "knnd/oracle.hpp"
#include "knnd/verify.hpp"

using namespace knnd;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(const std::string& id, bool ok, double secs, double limit_secs,
            const std::string& detail) {
    const bool in_time = secs <= limit_secs;
    if (!ok || !in_time) ++g_failures;
    std::printf("[%s] %s (%.1fs/%.0fs) %s\n", ok && in_time ? "PASS" : "FAIL", id.c_str(), secs,
                limit_secs, detail.c_str());
    std::fflush(stdout);
}

ExperimentConfig config(int d, int k, std::int64_t n, int reps, std::uint64_t seed,
                        ProcessSpec::Kind kind = ProcessSpec::Kind::Binomial) {
    ExperimentConfig cfg;
    cfg.process.kind = kind;
    cfg.process.n = n;
    cfg.process.region = Region::unit_cube(d);
    cfg.process.seed = seed;
    cfg.k = k;
    cfg.replicates = reps;
    return cfg;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// A1: closed-form r(d,k) against the paper's 4-decimal table. Some d=2
// entries are truncated rather than rounded in print, so an entry matches
// when it is within half an ulp of either convention.
void a1_table_r() {
    Timer t;
    const double table[2][5] = {{0.3333, 0.7407, 1.1728, 1.6168, 2.0680},
                                {0.3107, 0.7105, 1.1365, 1.5751, 2.0215}};
    bool ok = true;
    std::string detail = "r(d,k) vs table:";
    for (int d = 1; d <= 2; ++d)
        for (int k = 1; k <= 5; ++k) {
            const double v = r_limit(d, k);
            const double entry = table[d - 1][k - 1];
            const bool rounded = std::abs(v - entry) < 5e-5;
            const bool truncated = std::abs(std::floor(v * 1e4) / 1e4 - entry) < 1e-9;
            if (!(rounded || truncated)) {
                ok = false;
                detail += " MISMATCH(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
            } else if (!rounded) {
                detail += " trunc(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
            }
        }
    report("A1", ok, t.seconds(), 1.0, detail + " all 10 entries reproduced");
}

void a2_table_q1() {
    Timer t;
    const double expect[5] = {0.25, 1.5, 3.75, 7.0, 11.25};
    bool ok = true;
    for (int k = 1; k <= 5; ++k) ok = ok && q_limit_d1(k) == expect[k - 1];
    report("A2", ok, t.seconds(), 1.0, "q(1,k) = 0.25, 1.5, 3.75, 7, 11.25 exactly");
}

void a3_means_d1() {
    Timer t;
    ExperimentConfig cfg = config(1, 1, 5000, 400, 20260803);
    cfg.threads = 0;
    const std::vector<Statistic> stats{Statistic::reflexive(), Statistic::shared(),
                                       Statistic::indegree_count(0), Statistic::indegree_count(1),
                                       Statistic::indegree_count(2)};
    const auto s = run_experiment_multi(cfg, stats);
    const double target[5] = {1.0 / 3.0, 0.25, 0.25, 0.5, 0.25};
    bool ok = true;
    std::string detail;
    const char* names[5] = {"R/n", "Q/n", "Q0/n", "Q1/n", "Q2/n"};
    for (int i = 0; i < 5; ++i) {
        const double err = std::abs(s[i].mean_over_n - target[i]);
        ok = ok && err < 0.01;
        detail += std::string(names[i]) + "=" + fmt(s[i].mean_over_n) + " ";
    }
    report("A3", ok, t.seconds(), 60.0, detail + "(each within 0.01 of target)");
}

void a4_variance_slopes() {
    Timer t;
    const std::vector<Statistic> stats{Statistic::reflexive(), Statistic::shared(),
                                       Statistic::indegree_count(1)};
    ExperimentConfig ucfg = config(1, 1, 5000, 1000, 20260804);
    ucfg.threads = 0;
    ExperimentConfig pcfg = ucfg;
    pcfg.process.kind = ProcessSpec::Kind::Poisson;
    pcfg.process.seed = 20260814;
    const auto us = run_experiment_multi(ucfg, stats);
    const auto ps = run_experiment_multi(pcfg, stats);

    struct Row {
        const char* name;
        double got, want;
    };
    const Row rows[6] = {
        {"tau2_R", us[0].var_over_n, 2.0 / 45.0},   {"sigma2_R", ps[0].var_over_n, 7.0 / 45.0},
        {"tau2_Q", us[1].var_over_n, 19.0 / 240.0}, {"sigma2_Q", ps[1].var_over_n, 17.0 / 120.0},
        {"tau2_Q1", us[2].var_over_n, 19.0 / 60.0}, {"sigma2_Q1", ps[2].var_over_n, 17.0 / 30.0},
    };
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        const double rel = std::abs(r.got - r.want) / r.want;
        ok = ok && rel <= 0.20;
        detail += std::string(r.name) + "=" + fmt(r.got) + "/" + fmt(r.want) + " ";
    }
    report("A4", ok, t.seconds(), 300.0, detail + "(each within 20%)");
}

void a5_means_d2() {
    Timer t;
    ExperimentConfig cfg = config(2, 1, 5000, 400, 20260805);
    cfg.threads = 0;
    const std::vector<Statistic> stats{Statistic::reflexive(), Statistic::shared(),
                                       Statistic::indegree_count(0), Statistic::indegree_count(1),
                                       Statistic::indegree_count(2)};
    const auto s = run_experiment_multi(cfg, stats);
    struct Row {
        const char* name;
        double got, want, tol;
    };
    const Row rows[5] = {{"R/n", s[0].mean_over_n, 0.3107, 0.01},
                         {"Q/n", s[1].mean_over_n, 0.3166, 0.015},
                         {"Q0/n", s[2].mean_over_n, 0.284, 0.01},
                         {"Q1/n", s[3].mean_over_n, 0.463, 0.01},
                         {"Q2/n", s[4].mean_over_n, 0.221, 0.01}};
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        ok = ok && std::abs(r.got - r.want) < r.tol;
        detail += std::string(r.name) + "=" + fmt(r.got) + " ";
    }
    report("A5", ok, t.seconds(), 300.0, detail + "(targets 0.3107/0.3166/0.284/0.463/0.221)");
}

void a6_clt_diagnostics() {
    Timer t;
    bool ok = true;
    std::string detail;
    const int dims[3] = {1, 2, 2};
    const int ks[3] = {1, 1, 2};
    for (int c = 0; c < 3; ++c) {
        ExperimentConfig cfg = config(dims[c], ks[c], 5000, 1000, 20260806 + c);
        cfg.threads = 0;
        const auto s = run_experiment_multi(cfg, {Statistic::reflexive(), Statistic::shared()});
        for (int i = 0; i < 2; ++i) {
            ok = ok && std::abs(s[i].skewness) <= 0.25 && std::abs(s[i].excess_kurtosis) <= 0.6;
            detail += "(" + std::to_string(dims[c]) + "," + std::to_string(ks[c]) +
                      (i == 0 ? ",R" : ",Q") + ") sk=" + fmt(s[i].skewness) +
                      " ku=" + fmt(s[i].excess_kurtosis) + " ";
        }
    }
    report("A6", ok, t.seconds(), 900.0, detail + "(|skew|<=0.25, |exkurt|<=0.6)");
}

void a7_identity_suite() {
    Timer t;
    IdentitySuiteConfig cfg;
    cfg.instances = 200;
    cfg.seed = 20260807;
    cfg.dmax = 3;
    cfg.kmax = 3;
    cfg.nmin = 50;
    cfg.nmax = 500;
    const auto failures = run_identity_suite(cfg);
    std::string detail = "200 instances, d<=3, k<=3, 50<=n<=500";
    for (const auto& f : failures) detail += " VIOLATED:" + f.identity + "[" + f.instance + "]";
    report("A7", failures.empty(), t.seconds(), 60.0, detail);
}

void a8_oracle_equivalence() {
    Timer t;
    const std::vector<MotifPattern> patterns{
        MotifPattern::in_star(2),     MotifPattern::in_star(3),
        MotifPattern::mutual_pair(),  MotifPattern::shared_head(),
        MotifPattern::directed_cycle(3), MotifPattern(4, {{1, 2}, {3, 2}, {4, 2}}),
    };
    bool ok = true;
    int checked = 0;
    Philox rng(20260808, 0);
    for (int trial = 0; trial < 50; ++trial) {
        ProcessSpec spec;
        spec.n = 10 + static_cast<std::int64_t>(rng.next_below(16));
        spec.region = Region::unit_cube(1 + static_cast<int>(rng.next_below(3)));
        spec.seed = rng.next_u64();
        const PointSet ps = sample_binomial(spec);
        const int k = 1 + static_cast<int>(rng.next_below(2));
        const KnnDigraph g = build_knn_digraph(ps, k, 1);
        for (const auto& p : patterns) {
            ok = ok && count_motif(g, p, 1) == oracle::brute_count_motif(g, p);
            ++checked;
        }
    }
    report("A8", ok, t.seconds(), 60.0,
           std::to_string(checked) + " optimized-vs-brute comparisons, integer-exact");
}

void a9_figure1() {
    Timer t;
    const PointSet ps = testutil::figure1_points();
    const KnnDigraph g1 = build_knn_digraph(ps, 1, 1);
    const KnnDigraph g2 = build_knn_digraph(ps, 2, 1);
    const auto h1 = indegree_histogram(g1);
    const auto h2 = indegree_histogram(g2);

    bool ok = count_reflexive(g1) == 3 && count_shared(g1) == 3;
    ok = ok && h1[0] == 3 && h1[1] == 4 && h1[2] == 3;
    for (std::size_t j = 3; j < h1.size(); ++j) ok = ok && h1[j] == 0;
    ok = ok && count_reflexive(g2) == 6 && count_shared(g2) == 17;
    ok = ok && h2[0] == 1 && h2[1] == 3 && h2[2] == 2 && h2[3] == 3 && h2[4] == 1;
    for (std::size_t j = 5; j < h2.size(); ++j) ok = ok && h2[j] == 0;
    report("A9", ok, t.seconds(), 1.0,
           "k=1: R=3 Q=3 Qj=(3,4,3); k=2: R=6 Q=17 Qj=(1,3,2,3,1)");
}

void a10_region_independence() {
    Timer t;
    ExperimentConfig cfg = config(2, 1, 5000, 400, 20260810);
    cfg.threads = 0;
    cfg.statistic = Statistic::reflexive();
    const RegionComparison rc =
        region_invariance_check(cfg, Region::unit_cube(2), Region::unit_volume_ball(2));
    const std::string detail = "cube CI [" + fmt(rc.first.ci95_lo) + "," + fmt(rc.first.ci95_hi) +
                               "] ball CI [" + fmt(rc.second.ci95_lo) + "," +
                               fmt(rc.second.ci95_hi) + "]";
    report("A10", rc.ci_overlap, t.seconds(), 300.0, detail);
}

void a11_performance() {
    Timer t;
    ProcessSpec spec;
    spec.n = 1000000;
    spec.region = Region::unit_cube(2);
    spec.seed = 20260811;
    const PointSet ps = sample_binomial(spec);
    const KnnDigraph g = build_knn_digraph(ps, 3, 0);
    const std::int64_t r = count_reflexive(g);
    const std::int64_t q = count_shared(g);
    const auto hist = indegree_histogram(g);
    std::int64_t total = 0;
    for (const auto h : hist) total += h;
    const bool ok = g.arc_count() == 3000000 && total == 1000000 && r > 0 && q > 0;
    report("A11", ok, t.seconds(), 60.0,
           "n=1e6 d=2 k=3 build+R+Q+Qj; R/n=" + fmt(static_cast<double>(r) / 1e6) +
               " Q/n=" + fmt(static_cast<double>(q) / 1e6));
}

void a12_b2_crosscheck() {
    Timer t;
    const auto est = estimate_b2(2, 1000000, 20260812, 0);
    const double q = est.value / 2.0;
    const bool ok = std::abs(q - 0.3166) < 0.01;
    report("A12", ok, t.seconds(), 300.0,
           "b2(2)/2 = " + fmt(q) + " +- " + fmt(est.std_error / 2.0) + " vs 0.3166 (tol 0.01)");
}

}  // namespace

int main() {
    std::printf("acceptance suite (seeded, deterministic)\n");
    a1_table_r();
    a2_table_q1();
    a3_means_d1();
    a4_variance_slopes();
    a5_means_d2();
    a6_clt_diagnostics();
    a7_identity_suite();
    a8_oracle_equivalence();
    a9_figure1();
    a10_region_independence();
    a11_performance();
    a12_b2_crosscheck();
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "OK" : "FAILED", g_failures);
    return g_failures == 0 ? 0 : 1;
}
