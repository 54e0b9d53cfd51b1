#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knnd/motifs.hpp"
#include "knnd/pointproc.hpp"

namespace knnd {

/// One statistic evaluated per replicate: a named quantity or an arbitrary
/// motif linear combination.
struct Statistic {
    enum class Kind { R, Q, Qj, Nij, Motif };

    Kind kind = Kind::R;
    int j = -1;                       // Qj
    std::int32_t mark_i = 0, mark_j = 0;  // Nij
    std::optional<StatisticSpec> spec;    // Motif

    static Statistic reflexive() { return make(Kind::R); }
    static Statistic shared() { return make(Kind::Q); }
    static Statistic indegree_count(int j) {
        Statistic s = make(Kind::Qj);
        s.j = j;
        return s;
    }
    static Statistic marked_arcs(std::int32_t i, std::int32_t j) {
        Statistic s = make(Kind::Nij);
        s.mark_i = i;
        s.mark_j = j;
        return s;
    }
    static Statistic motif(StatisticSpec spec) {
        Statistic s = make(Kind::Motif);
        s.spec = std::move(spec);
        return s;
    }
    static Statistic make(Kind kind) {
        Statistic s;
        s.kind = kind;
        return s;
    }

    bool needs_marks() const { return kind == Kind::Nij; }
    std::string name() const;
    double evaluate(const KnnDigraph& g, const MarkVector* marks) const;
};

/// I.i.d. mark sampling model; probabilities positive, summing to 1.
struct MarkModel {
    std::vector<double> class_probs;

    void validate() const;
    MarkVector sample(std::int64_t n, Philox& rng) const;
};

struct ExperimentConfig {
    ProcessSpec process;
    int k = 1;
    Statistic statistic = Statistic::reflexive();
    int replicates = 2;
    std::optional<MarkModel> marks;
    bool torus = false;  // diagnostic variant; cube/box regions only
    int threads = 0;     // 0 = available parallelism

    void validate() const;
};

struct ExperimentSummary {
    std::vector<double> per_replicate;  // raw statistic values H_r
    double mean_over_n = 0.0;           // xi-hat
    double var_over_n = 0.0;            // tau^2-hat (binomial) / sigma^2-hat (poisson)
    double ci95_lo = 0.0, ci95_hi = 0.0;  // 95% CI for mean_over_n
    double skewness = 0.0, excess_kurtosis = 0.0;
    double z_skew = 0.0, z_kurt = 0.0;
    std::int64_t tie_events = 0;
    int degenerate_replicates = 0;
};

/// Replicate r draws from stream (seed, r); a Poisson replicate with fewer
/// than k+1 points is recorded degenerate and redrawn from stream
/// (seed, substream(r, retry)). Deterministic for fixed seed regardless of
/// the worker count.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// Evaluates several statistics on the same replicates (one digraph build
/// per replicate); summaries are in input order.
std::vector<ExperimentSummary> run_experiment_multi(const ExperimentConfig& cfg,
                                                    const std::vector<Statistic>& stats);

/// Var(H)/n, the variance slope of the limit law. replicates >= 200.
double estimate_variance_slope(const ExperimentConfig& cfg);

struct NormalityDiagnostics {
    double skewness = 0.0, excess_kurtosis = 0.0;
    double z_skew = 0.0, z_kurt = 0.0;
};

/// Standardised-replicate diagnostics; replicates >= 500; throws
/// DegenerateStatistic when the sample variance vanishes.
NormalityDiagnostics normality_diagnostics(const ExperimentConfig& cfg);

struct CovarianceSummary {
    int dim = 0;                 // 1 + kappa'k
    std::vector<double> cov;     // row-major, scaled by 1/n
    std::vector<double> eigenvalues;  // ascending; rank conjecture is probed, not asserted
    // max |residual| over replicates for the two kernel vectors
    double max_residual_degree_kernel = 0.0;  // a = (k, k-1, ..., k - kappa'k)
    double max_residual_ones = 0.0;           // a = (1, ..., 1); exact for binomial only
    double count_variance = 0.0;              // Var(sum_j Q_j) across replicates
};

/// Sample covariance of the indegree-histogram vector Q_in across
/// replicates, scaled by 1/n. replicates >= 200.
CovarianceSummary estimate_covariance(const ExperimentConfig& cfg);

struct DependenceReport {
    double correlation = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // bootstrap percentile CI
    int replicates = 0;
};

/// Sample correlation of two statistics across replicates; reported, not
/// asserted (dependence need not show as correlation). replicates >= 500.
DependenceReport dependence_probe(const ExperimentConfig& cfg, const Statistic& a,
                                  const Statistic& b);

struct RegionComparison {
    ExperimentSummary first, second;
    bool ci_overlap = false;
};

/// Runs the same experiment on two windows and reports whether the 95% CIs
/// for mean_over_n overlap (the limits are window-independent).
RegionComparison region_invariance_check(const ExperimentConfig& cfg, const Region& region_a,
                                         const Region& region_b);

/// kNN digraph under the torus metric on a box window (each axis wraps).
/// Exact: queries are merged over the 3^d shifted copies of the window.
KnnDigraph build_knn_digraph_torus(const PointSet& ps, const Region& region, int k);

}  // namespace knnd
