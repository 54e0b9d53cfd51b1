#include "knnd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "knnd/closedform.hpp"

namespace knnd {

std::string Statistic::name() const {
    switch (kind) {
        case Kind::R: return "R";
        case Kind::Q: return "Q";
        case Kind::Qj: return "Q" + std::to_string(j);
        case Kind::Nij: return "N" + std::to_string(mark_i) + std::to_string(mark_j);
        case Kind::Motif: return "motif";
    }
    return "?";
}

double Statistic::evaluate(const KnnDigraph& g, const MarkVector* marks) const {
    switch (kind) {
        case Kind::R:
            return static_cast<double>(count_reflexive(g));
        case Kind::Q:
            return static_cast<double>(count_shared(g));
        case Kind::Qj: {
            if (j < 0) throw InvalidArgument("Qj statistic needs j >= 0");
            const auto hist = indegree_histogram(g);
            return j < static_cast<int>(hist.size()) ? static_cast<double>(hist[j]) : 0.0;
        }
        case Kind::Nij: {
            if (marks == nullptr) throw InvalidArgument("Nij statistic needs marks");
            return static_cast<double>(count_marked_arcs(g, *marks, mark_i, mark_j));
        }
        case Kind::Motif: {
            if (!spec) throw InvalidArgument("motif statistic needs a spec");
            return evaluate_statistic(g, *spec, 1);
        }
    }
    return 0.0;
}

void MarkModel::validate() const {
    if (class_probs.empty()) throw InvalidArgument("mark model needs at least one class");
    double total = 0.0;
    for (double p : class_probs) {
        if (!(p > 0.0)) throw InvalidArgument("class probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("class probabilities must sum to 1");
}

MarkVector MarkModel::sample(std::int64_t n, Philox& rng) const {
    MarkVector mv;
    mv.num_classes = static_cast<std::int32_t>(class_probs.size());
    mv.marks.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        double acc = 0.0;
        std::int32_t mark = mv.num_classes;
        for (std::int32_t c = 0; c < mv.num_classes; ++c) {
            acc += class_probs[c];
            if (u < acc) {
                mark = c + 1;
                break;
            }
        }
        mv.marks[i] = mark;
    }
    return mv;
}

void ExperimentConfig::validate() const {
    process.validate();
    if (k < 1) throw InvalidArgument("k must be positive");
    if (process.kind == ProcessSpec::Kind::Binomial && process.n < k + 1)
        throw InvalidArgument("binomial experiments need n >= k+1");
    if (replicates < 2) throw InvalidArgument("need at least 2 replicates");
    if (statistic.kind == Statistic::Kind::Qj) {
        if (statistic.j < 0) throw InvalidArgument("Qj statistic needs j >= 0");
        if (const auto bound = try_kappa_prime_bound(process.region.dim());
            bound && statistic.j > *bound * k)
            throw InvalidArgument("Qj statistic: j exceeds the indegree bound kappa'(d)*k");
    }
    if (statistic.needs_marks() && !marks) throw InvalidArgument("Nij statistic needs a mark model");
    if (marks) marks->validate();
    if (torus && process.region.kind() == Region::Kind::Ball)
        throw InvalidArgument("torus metric needs a box window");
}

// ---------------------------------------------------------------------------
// torus digraph

KnnDigraph build_knn_digraph_torus(const PointSet& ps, const Region& region, int k) {
    if (region.kind() == Region::Kind::Ball) throw InvalidArgument("torus metric needs a box window");
    const int d = ps.dim();
    const std::int64_t n = ps.size();
    if (n < k + 1) throw InsufficientPoints("torus digraph needs at least k+1 points");

    std::vector<double> widths(d);
    for (int i = 0; i < d; ++i) widths[i] = region.hi()[i] - region.lo()[i];

    KnnIndex index(ps);
    KnnDigraph g;
    g.n = static_cast<std::int32_t>(n);
    g.k = k;
    g.dim = d;
    g.heads.resize(static_cast<std::size_t>(n) * k);

    const int shifts = [&] {
        int s = 1;
        for (int i = 0; i < d; ++i) s *= 3;
        return s;
    }();

    std::vector<double> q(d);
    std::vector<std::pair<double, std::int32_t>> cands;
    for (std::int64_t v = 0; v < n; ++v) {
        cands.clear();
        const auto pv = ps.point(v);
        for (int s = 0; s < shifts; ++s) {
            int code = s;
            for (int i = 0; i < d; ++i) {
                q[i] = pv[i] + (code % 3 - 1) * widths[i];
                code /= 3;
            }
            // k+1 covers the self-match in the unshifted copy
            const auto ids = index.query_point(q, static_cast<int>(std::min<std::int64_t>(k + 1, n)));
            for (const std::int32_t id : ids) {
                if (id == v) continue;
                cands.emplace_back(squared_distance(q, ps.point(id)), id);
            }
        }
        std::sort(cands.begin(), cands.end(),
                  [](const auto& a, const auto& b) {
                      return a.first < b.first || (a.first == b.first && a.second < b.second);
                  });
        // min over shifted images per id = torus distance
        int taken = 0;
        std::vector<std::int32_t> seen;
        for (const auto& [d2, id] : cands) {
            if (std::find(seen.begin(), seen.end(), id) != seen.end()) continue;
            seen.push_back(id);
            g.heads[static_cast<std::size_t>(v) * k + taken] = id;
            if (++taken == k) break;
        }
        if (taken < k) throw Error("internal: torus query exhausted candidates");
    }
    g.indegree.assign(n, 0);
    for (std::int32_t h : g.heads) ++g.indegree[h];
    g.tie_events = index.tie_events();
    return g;
}

// ---------------------------------------------------------------------------
// replicate engine

namespace {

struct ReplicateOutcome {
    std::vector<double> values;
    std::int64_t tie_events = 0;
    int retries = 0;
};

ReplicateOutcome run_one_replicate(const ExperimentConfig& cfg,
                                   const std::vector<Statistic>& stats, std::int64_t rep) {
    ReplicateOutcome out;
    PointSet ps;
    int retry = 0;
    for (;;) {
        const std::uint64_t stream = Philox::substream(static_cast<std::uint64_t>(rep),
                                                       static_cast<std::uint64_t>(retry));
        ps = sample_process(cfg.process, stream);
        if (ps.size() >= cfg.k + 1) break;
        ++retry;
        if (retry > 64) throw Error("replicate kept drawing fewer than k+1 points");
    }
    out.retries = retry;

    const KnnDigraph g = cfg.torus ? build_knn_digraph_torus(ps, cfg.process.region, cfg.k)
                                   : build_knn_digraph(ps, cfg.k, 1);
    out.tie_events = g.tie_events;

    MarkVector marks;
    const MarkVector* marks_ptr = nullptr;
    if (cfg.marks) {
        // marks draw from a dedicated stream so point coordinates stay
        // comparable between marked and unmarked runs
        Philox mrng(cfg.process.seed, Philox::substream(static_cast<std::uint64_t>(rep), 129));
        marks = cfg.marks->sample(ps.size(), mrng);
        marks_ptr = &marks;
    }

    out.values.reserve(stats.size());
    for (const auto& s : stats) out.values.push_back(s.evaluate(g, marks_ptr));
    return out;
}

double neumaier_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

struct Moments {
    double mean = 0.0, var = 0.0, skew = 0.0, exkurt = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    Moments m;
    m.mean = neumaier_sum(xs) / n;
    std::vector<double> c2(xs.size()), c3(xs.size()), c4(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - m.mean;
        c2[i] = d * d;
        c3[i] = d * d * d;
        c4[i] = d * d * d * d;
    }
    const double m2 = neumaier_sum(c2) / n;
    const double m3 = neumaier_sum(c3) / n;
    const double m4 = neumaier_sum(c4) / n;
    m.var = n / (n - 1.0) * m2;
    if (m2 > 0.0) {
        m.skew = m3 / std::pow(m2, 1.5);
        m.exkurt = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

std::vector<ReplicateOutcome> run_all(const ExperimentConfig& cfg,
                                      const std::vector<Statistic>& stats) {
    cfg.validate();
    const int reps = cfg.replicates;
    std::vector<ReplicateOutcome> outcomes(reps);

    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, reps));
    if (nthreads == 1) {
        for (int r = 0; r < reps; ++r) outcomes[r] = run_one_replicate(cfg, stats, r);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= reps) return;
                outcomes[r] = run_one_replicate(cfg, stats, r);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return outcomes;
}

ExperimentSummary summarize(const ExperimentConfig& cfg, std::vector<double> values,
                            std::int64_t ties, int degenerate) {
    const double n = static_cast<double>(cfg.process.n);
    const double reps = static_cast<double>(values.size());

    ExperimentSummary s;
    const Moments m = moments(values);
    s.mean_over_n = m.mean / n;
    s.var_over_n = m.var / n;  // nominal n for both processes
    const double se_mean = std::sqrt(m.var / reps) / n;
    s.ci95_lo = s.mean_over_n - 1.959963984540054 * se_mean;
    s.ci95_hi = s.mean_over_n + 1.959963984540054 * se_mean;
    s.skewness = m.skew;
    s.excess_kurtosis = m.exkurt;
    s.z_skew = m.skew / std::sqrt(6.0 / reps);
    s.z_kurt = m.exkurt / std::sqrt(24.0 / reps);
    s.tie_events = ties;
    s.degenerate_replicates = degenerate;
    s.per_replicate = std::move(values);
    return s;
}

}  // namespace

std::vector<ExperimentSummary> run_experiment_multi(const ExperimentConfig& cfg,
                                                    const std::vector<Statistic>& stats) {
    for (const auto& s : stats)
        if (s.needs_marks() && !cfg.marks) throw InvalidArgument("Nij statistic needs a mark model");
    const auto outcomes = run_all(cfg, stats);

    std::int64_t ties = 0;
    int degenerate = 0;
    for (const auto& o : outcomes) {
        ties += o.tie_events;
        degenerate += o.retries;
    }

    std::vector<ExperimentSummary> result;
    result.reserve(stats.size());
    for (std::size_t si = 0; si < stats.size(); ++si) {
        std::vector<double> values(outcomes.size());
        for (std::size_t r = 0; r < outcomes.size(); ++r) values[r] = outcomes[r].values[si];
        result.push_back(summarize(cfg, std::move(values), ties, degenerate));
    }
    return result;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    return run_experiment_multi(cfg, {cfg.statistic}).front();
}

double estimate_variance_slope(const ExperimentConfig& cfg) {
    if (cfg.replicates < 200)
        throw InvalidArgument("variance slope estimation needs >= 200 replicates");
    return run_experiment(cfg).var_over_n;
}

NormalityDiagnostics normality_diagnostics(const ExperimentConfig& cfg) {
    if (cfg.replicates < 500)
        throw InvalidArgument("normality diagnostics need >= 500 replicates");
    const ExperimentSummary s = run_experiment(cfg);
    double lo = s.per_replicate.front(), hi = lo;
    for (double v : s.per_replicate) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw DegenerateStatistic("statistic is constant across replicates");
    return {s.skewness, s.excess_kurtosis, s.z_skew, s.z_kurt};
}

CovarianceSummary estimate_covariance(const ExperimentConfig& cfg) {
    if (cfg.replicates < 200) throw InvalidArgument("covariance estimation needs >= 200 replicates");
    const int kappa = kappa_prime_bound(cfg.process.region.dim());
    const int dim = 1 + kappa * cfg.k;

    std::vector<Statistic> stats;
    stats.reserve(dim);
    for (int j = 0; j < dim; ++j) stats.push_back(Statistic::indegree_count(j));
    const auto outcomes = run_all(cfg, stats);
    const int reps = static_cast<int>(outcomes.size());

    CovarianceSummary cs;
    cs.dim = dim;

    // kernel residuals are exact per replicate
    std::vector<double> totals(reps);
    for (int r = 0; r < reps; ++r) {
        double degree_kernel = 0.0, total = 0.0;
        for (int j = 0; j < dim; ++j) {
            degree_kernel += (cfg.k - j) * outcomes[r].values[j];
            total += outcomes[r].values[j];
        }
        totals[r] = total;
        cs.max_residual_degree_kernel =
            std::max(cs.max_residual_degree_kernel, std::abs(degree_kernel));
        cs.max_residual_ones = std::max(
            cs.max_residual_ones, std::abs(total - static_cast<double>(cfg.process.n)));
    }
    cs.count_variance = moments(totals).var;

    std::vector<double> mean(dim, 0.0);
    for (int j = 0; j < dim; ++j) {
        std::vector<double> col(reps);
        for (int r = 0; r < reps; ++r) col[r] = outcomes[r].values[j];
        mean[j] = neumaier_sum(col) / reps;
    }
    cs.cov.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    const double n = static_cast<double>(cfg.process.n);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            std::vector<double> prods(reps);
            for (int r = 0; r < reps; ++r)
                prods[r] = (outcomes[r].values[a] - mean[a]) * (outcomes[r].values[b] - mean[b]);
            const double cov = neumaier_sum(prods) / (reps - 1) / n;
            cs.cov[a * dim + b] = cov;
            cs.cov[b * dim + a] = cov;
        }

    // eigenvalues by cyclic Jacobi; the matrix is small and symmetric
    std::vector<double> m = cs.cov;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int a = 0; a < dim; ++a)
            for (int b = a + 1; b < dim; ++b) off += m[a * dim + b] * m[a * dim + b];
        if (off < 1e-26) break;
        for (int a = 0; a < dim; ++a)
            for (int b = a + 1; b < dim; ++b) {
                const double apq = m[a * dim + b];
                if (apq == 0.0) continue;
                const double app = m[a * dim + a], aqq = m[b * dim + b];
                const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                const double c = std::cos(theta), s2 = std::sin(theta);
                for (int i = 0; i < dim; ++i) {
                    const double ai = m[i * dim + a], bi = m[i * dim + b];
                    m[i * dim + a] = c * ai - s2 * bi;
                    m[i * dim + b] = s2 * ai + c * bi;
                }
                for (int i = 0; i < dim; ++i) {
                    const double ai = m[a * dim + i], bi = m[b * dim + i];
                    m[a * dim + i] = c * ai - s2 * bi;
                    m[b * dim + i] = s2 * ai + c * bi;
                }
            }
    }
    cs.eigenvalues.resize(dim);
    for (int i = 0; i < dim; ++i) cs.eigenvalues[i] = m[i * dim + i];
    std::sort(cs.eigenvalues.begin(), cs.eigenvalues.end());
    return cs;
}

DependenceReport dependence_probe(const ExperimentConfig& cfg, const Statistic& a,
                                  const Statistic& b) {
    if (cfg.replicates < 500) throw InvalidArgument("dependence probe needs >= 500 replicates");
    const auto summaries = run_experiment_multi(cfg, {a, b});
    const auto& xs = summaries[0].per_replicate;
    const auto& ys = summaries[1].per_replicate;
    const int reps = static_cast<int>(xs.size());

    auto correlation = [](const std::vector<double>& x, const std::vector<double>& y) {
        const double n = static_cast<double>(x.size());
        const double mx = neumaier_sum(x) / n, my = neumaier_sum(y) / n;
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double dx = x[i] - mx, dy = y[i] - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        if (sxx == 0.0 || syy == 0.0)
            throw DegenerateStatistic("correlation undefined for a constant statistic");
        return sxy / std::sqrt(sxx * syy);
    };

    DependenceReport rep;
    rep.replicates = reps;
    rep.correlation = correlation(xs, ys);

    // percentile bootstrap over replicate pairs
    constexpr int kBoot = 1000;
    std::vector<double> boot(kBoot);
    Philox rng(cfg.process.seed, Philox::substream(0xB007, 0));
    std::vector<double> bx(reps), by(reps);
    for (int t = 0; t < kBoot; ++t) {
        for (int i = 0; i < reps; ++i) {
            const auto pick = static_cast<std::size_t>(rng.next_below(reps));
            bx[i] = xs[pick];
            by[i] = ys[pick];
        }
        try {
            boot[t] = correlation(bx, by);
        } catch (const DegenerateStatistic&) {
            boot[t] = rep.correlation;
        }
    }
    std::sort(boot.begin(), boot.end());
    rep.ci_lo = boot[static_cast<std::size_t>(0.025 * (kBoot - 1))];
    rep.ci_hi = boot[static_cast<std::size_t>(0.975 * (kBoot - 1))];
    return rep;
}

RegionComparison region_invariance_check(const ExperimentConfig& cfg, const Region& region_a,
                                         const Region& region_b) {
    ExperimentConfig ca = cfg, cb = cfg;
    ca.process.region = region_a;
    cb.process.region = region_b;
    RegionComparison rc;
    rc.first = run_experiment(ca);
    rc.second = run_experiment(cb);
    rc.ci_overlap = rc.first.ci95_lo <= rc.second.ci95_hi && rc.second.ci95_lo <= rc.first.ci95_hi;
    return rc;
}

}  // namespace knnd
