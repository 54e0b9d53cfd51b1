#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "knnd/montecarlo.hpp"
#include "knnd/oracle.hpp"

using namespace knnd;

namespace {
ExperimentConfig base_config(int d, int k, std::int64_t n, int reps, std::uint64_t seed,
                             ProcessSpec::Kind kind = ProcessSpec::Kind::Binomial) {
    ExperimentConfig cfg;
    cfg.process.kind = kind;
    cfg.process.n = n;
    cfg.process.region = Region::unit_cube(d);
    cfg.process.seed = seed;
    cfg.k = k;
    cfg.replicates = reps;
    cfg.threads = 1;
    return cfg;
}
}  // namespace

TEST_CASE("experiment is deterministic and worker-count independent") {
    ExperimentConfig cfg = base_config(2, 1, 300, 40, 99);
    cfg.statistic = Statistic::reflexive();
    const ExperimentSummary a = run_experiment(cfg);
    const ExperimentSummary b = run_experiment(cfg);
    CHECK(a.per_replicate == b.per_replicate);
    CHECK(a.mean_over_n == b.mean_over_n);
    CHECK(a.var_over_n == b.var_over_n);

    ExperimentConfig cfg4 = cfg;
    cfg4.threads = 4;
    const ExperimentSummary c = run_experiment(cfg4);
    CHECK(a.per_replicate == c.per_replicate);
    CHECK(a.mean_over_n == c.mean_over_n);
    CHECK(a.skewness == c.skewness);
}

TEST_CASE("single-arc motif is deterministic: every replicate equals nk") {
    ExperimentConfig cfg = base_config(1, 2, 100, 20, 5);
    cfg.statistic = Statistic::motif(StatisticSpec{{{1.0, MotifPattern::single_arc()}}});
    const ExperimentSummary s = run_experiment(cfg);
    for (const double v : s.per_replicate) CHECK(v == 200.0);
    CHECK(s.var_over_n == 0.0);
    CHECK(s.degenerate_replicates == 0);

    ExperimentConfig diag = cfg;
    diag.replicates = 500;
    CHECK_THROWS_AS(normality_diagnostics(diag), DegenerateStatistic);
}

TEST_CASE("binomial experiments with n >= k+1 never degenerate") {
    ExperimentConfig cfg = base_config(2, 3, 10, 50, 17);
    cfg.statistic = Statistic::shared();
    CHECK(run_experiment(cfg).degenerate_replicates == 0);
}

TEST_CASE("poisson replicates below k+1 points are resampled and counted") {
    ExperimentConfig cfg = base_config(1, 1, 1, 200, 23, ProcessSpec::Kind::Poisson);
    cfg.statistic = Statistic::reflexive();
    const ExperimentSummary s = run_experiment(cfg);
    CHECK(s.degenerate_replicates > 0);  // Poisson(1) is below 2 with prob 2/e
    // the summary is still well-formed
    CHECK(s.per_replicate.size() == 200);
    CHECK(s.var_over_n >= 0.0);
}

TEST_CASE("preconditions on replicate counts") {
    ExperimentConfig cfg = base_config(1, 1, 100, 100, 3);
    CHECK_THROWS_AS(estimate_variance_slope(cfg), InvalidArgument);
    CHECK_THROWS_AS(normality_diagnostics(cfg), InvalidArgument);
    CHECK_THROWS_AS(estimate_covariance(cfg), InvalidArgument);
    cfg.replicates = 1;
    CHECK_THROWS_AS(run_experiment(cfg), InvalidArgument);
}

TEST_CASE("statistic validity is checked against (d, k)") {
    ExperimentConfig cfg = base_config(1, 1, 100, 10, 3);
    cfg.statistic = Statistic::indegree_count(2);  // kappa'(1)*1 = 2: valid
    CHECK_NOTHROW(run_experiment(cfg));
    cfg.statistic = Statistic::indegree_count(3);  // impossible indegree
    CHECK_THROWS_AS(run_experiment(cfg), InvalidArgument);
}

TEST_CASE("ci95 contains the mean and brackets shrink with replicates") {
    ExperimentConfig cfg = base_config(1, 1, 500, 100, 7);
    cfg.statistic = Statistic::reflexive();
    const ExperimentSummary s = run_experiment(cfg);
    CHECK(s.ci95_lo <= s.mean_over_n);
    CHECK(s.mean_over_n <= s.ci95_hi);
}

TEST_CASE("covariance summary: exact kernels, poisson count variance") {
    // binomial: both kernel vectors are exact zeros per replicate
    ExperimentConfig cfg = base_config(1, 1, 100, 300, 11);
    const CovarianceSummary cs = estimate_covariance(cfg);
    CHECK(cs.dim == 3);  // 1 + kappa'(1)*1
    CHECK(cs.max_residual_degree_kernel == 0.0);
    CHECK(cs.max_residual_ones == 0.0);
    CHECK(cs.cov.size() == 9);
    // symmetric
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK(cs.cov[a * 3 + b] == cs.cov[b * 3 + a]);
    CHECK(cs.eigenvalues.size() == 3);

    // poisson: degree kernel still exact; total count is Poisson(n)
    ExperimentConfig pcfg = base_config(1, 1, 100, 3000, 13, ProcessSpec::Kind::Poisson);
    const CovarianceSummary ps = estimate_covariance(pcfg);
    CHECK(ps.max_residual_degree_kernel == 0.0);
    CHECK(ps.max_residual_ones > 0.0);
    CHECK(std::abs(ps.count_variance - 100.0) < 10.0);
}

TEST_CASE("dependence probe") {
    ExperimentConfig cfg = base_config(1, 1, 2000, 500, 77);
    const DependenceReport self = dependence_probe(cfg, Statistic::reflexive(),
                                                   Statistic::reflexive());
    CHECK(self.correlation == 1.0);

    const DependenceReport rq = dependence_probe(cfg, Statistic::reflexive(), Statistic::shared());
    CHECK(rq.ci_lo <= rq.correlation);
    CHECK(rq.correlation <= rq.ci_hi);
    CHECK(std::abs(rq.correlation) <= 1.0);
    const DependenceReport again = dependence_probe(cfg, Statistic::reflexive(),
                                                    Statistic::shared());
    CHECK(rq.correlation == again.correlation);  // deterministic
    CHECK(rq.ci_lo == again.ci_lo);

    Statistic constant = Statistic::motif(StatisticSpec{{{1.0, MotifPattern::single_arc()}}});
    CHECK_THROWS_AS(dependence_probe(cfg, Statistic::reflexive(), constant),
                    DegenerateStatistic);
}

TEST_CASE("region invariance: identical regions and seeds give identical summaries") {
    ExperimentConfig cfg = base_config(2, 1, 400, 60, 31);
    cfg.statistic = Statistic::reflexive();
    const RegionComparison rc =
        region_invariance_check(cfg, Region::unit_cube(2), Region::unit_cube(2));
    CHECK(rc.first.per_replicate == rc.second.per_replicate);
    CHECK(rc.ci_overlap);
}

TEST_CASE("region invariance across different window volumes") {
    ExperimentConfig cfg = base_config(2, 1, 1000, 150, 37);
    cfg.statistic = Statistic::reflexive();
    const RegionComparison rc = region_invariance_check(
        cfg, Region::box({0.0, 0.0}, {3.0, 3.0}), Region::unit_cube(2));
    CHECK(rc.ci_overlap);
}

TEST_CASE("marked-arc statistics partition the arcs") {
    ExperimentConfig cfg = base_config(2, 2, 150, 40, 41);
    cfg.marks = MarkModel{{0.3, 0.7}};
    std::vector<Statistic> stats;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) stats.push_back(Statistic::marked_arcs(i, j));
    const auto summaries = run_experiment_multi(cfg, stats);
    for (std::size_t r = 0; r < summaries[0].per_replicate.size(); ++r) {
        double total = 0.0;
        for (const auto& s : summaries) total += s.per_replicate[r];
        CHECK(total == 150.0 * 2);  // nk
    }
    ExperimentConfig no_marks = cfg;
    no_marks.marks.reset();
    no_marks.statistic = Statistic::marked_arcs(1, 1);
    CHECK_THROWS_AS(run_experiment(no_marks), InvalidArgument);
}

TEST_CASE("torus digraph equals the brute-force torus ranking") {
    ProcessSpec spec;
    spec.n = 30;
    spec.region = Region::unit_cube(2);
    spec.seed = 47;
    const PointSet ps = sample_binomial(spec);

    for (int k = 1; k <= 3; ++k) {
        const KnnDigraph g = build_knn_digraph_torus(ps, spec.region, k);
        CHECK(g.arc_count() == 30 * k);
        for (std::int32_t v = 0; v < g.n; ++v) {
            std::vector<std::pair<double, std::int32_t>> ranked;
            for (std::int32_t u = 0; u < g.n; ++u) {
                if (u == v) continue;
                double d2 = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const double raw = std::abs(ps.point(v)[c] - ps.point(u)[c]);
                    const double wrapped = std::min(raw, 1.0 - raw);
                    d2 += wrapped * wrapped;
                }
                ranked.emplace_back(d2, u);
            }
            std::sort(ranked.begin(), ranked.end());
            for (int r = 0; r < k; ++r) CHECK(g.head(v, r) == ranked[r].second);
        }
    }
}

TEST_CASE("torus flag is honoured and deterministic") {
    ExperimentConfig cfg = base_config(2, 1, 200, 30, 53);
    cfg.torus = true;
    const ExperimentSummary a = run_experiment(cfg);
    const ExperimentSummary b = run_experiment(cfg);
    CHECK(a.per_replicate == b.per_replicate);

    ExperimentConfig ball = cfg;
    ball.process.region = Region::unit_volume_ball(2);
    CHECK_THROWS_AS(run_experiment(ball), InvalidArgument);
}

TEST_CASE("convergence direction: the n=8000 mean is no farther than the n=500 mean") {
    ExperimentConfig small = base_config(1, 1, 500, 300, 61);
    small.statistic = Statistic::reflexive();
    ExperimentConfig large = base_config(1, 1, 8000, 300, 61);
    large.statistic = Statistic::reflexive();

    const ExperimentSummary s = run_experiment(small);
    const ExperimentSummary l = run_experiment(large);
    const double target = 1.0 / 3.0;
    const double se_s = (s.ci95_hi - s.ci95_lo) / (2.0 * 1.96);
    const double se_l = (l.ci95_hi - l.ci95_lo) / (2.0 * 1.96);
    CHECK(std::abs(l.mean_over_n - target) <=
          std::abs(s.mean_over_n - target) + 2.0 * std::hypot(se_s, se_l));
}
