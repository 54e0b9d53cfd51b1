#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "knnd/closedform.hpp"
#include "knnd/io.hpp"
#include "knnd/montecarlo.hpp"
#include "knnd/pointproc.hpp"
#include "knnd/verify.hpp"

namespace py = pybind11;
using namespace knnd;

namespace {

PointSet pointset_from_rows(int dim, const std::vector<std::vector<double>>& rows) {
    PointSet ps(dim);
    for (const auto& r : rows) ps.add(r);
    return ps;
}

std::vector<std::vector<double>> pointset_rows(const PointSet& ps) {
    std::vector<std::vector<double>> rows;
    rows.reserve(ps.size());
    for (std::int64_t i = 0; i < ps.size(); ++i) {
        const auto p = ps.point(i);
        rows.emplace_back(p.begin(), p.end());
    }
    return rows;
}

ProcessSpec make_spec(const std::string& process, std::int64_t n, const Region& region,
                      std::uint64_t seed) {
    ProcessSpec spec;
    if (process == "binomial")
        spec.kind = ProcessSpec::Kind::Binomial;
    else if (process == "poisson")
        spec.kind = ProcessSpec::Kind::Poisson;
    else
        throw InvalidArgument("process must be 'binomial' or 'poisson'");
    spec.n = n;
    spec.region = region;
    spec.seed = seed;
    return spec;
}

Statistic statistic_from_name(const std::string& name) {
    if (name == "R") return Statistic::reflexive();
    if (name == "Q") return Statistic::shared();
    if (name.rfind("Q", 0) == 0 && name.size() > 1)
        return Statistic::indegree_count(std::stoi(name.substr(1)));
    throw InvalidArgument("statistic name must be R, Q, or Q<j>");
}

py::dict summary_to_dict(const ExperimentSummary& s) {
    py::dict d;
    d["mean_over_n"] = s.mean_over_n;
    d["var_over_n"] = s.var_over_n;
    d["ci95"] = py::make_tuple(s.ci95_lo, s.ci95_hi);
    d["skewness"] = s.skewness;
    d["excess_kurtosis"] = s.excess_kurtosis;
    d["z_skew"] = s.z_skew;
    d["z_kurt"] = s.z_kurt;
    d["ties"] = s.tie_events;
    d["degenerate"] = s.degenerate_replicates;
    d["per_replicate"] = s.per_replicate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_knnd, m) {
    m.doc() = "kNN digraph statistics toolkit";

    // base first: translators run newest-first, so the derived ones below win
    py::register_exception<Error>(m, "KnndError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
    py::register_exception<InsufficientPoints>(m, "InsufficientPointsError", PyExc_ValueError);
    py::register_exception<ImpossibleIndegree>(m, "ImpossibleIndegreeError", PyExc_ValueError);
    py::register_exception<UnknownBound>(m, "UnknownBoundError", PyExc_ValueError);
    py::register_exception<DegenerateStatistic>(m, "DegenerateStatisticError", PyExc_ValueError);

    py::class_<PointSet>(m, "PointSet")
        .def(py::init(&pointset_from_rows), py::arg("dim"), py::arg("points"))
        .def_property_readonly("dim", &PointSet::dim)
        .def("__len__", [](const PointSet& ps) { return ps.size(); })
        .def("point",
             [](const PointSet& ps, std::int64_t i) {
                 if (i < 0 || i >= ps.size()) throw py::index_error();
                 const auto p = ps.point(i);
                 return std::vector<double>(p.begin(), p.end());
             })
        .def("to_list", &pointset_rows)
        .def("to_csv", &io::points_to_csv)
        .def_static("from_csv", &io::points_from_csv);

    py::class_<Region>(m, "Region")
        .def_static("unit_cube", &Region::unit_cube, py::arg("dim"))
        .def_static("box", &Region::box, py::arg("lo"), py::arg("hi"))
        .def_static("ball", &Region::ball, py::arg("center"), py::arg("radius"))
        .def_static("unit_volume_ball", &Region::unit_volume_ball, py::arg("dim"))
        .def_property_readonly("dim", &Region::dim)
        .def_property_readonly("volume", &Region::volume)
        .def("contains", [](const Region& r, const std::vector<double>& p) { return r.contains(p); });

    py::class_<KnnDigraph>(m, "KnnDigraph")
        .def_property_readonly("n", [](const KnnDigraph& g) { return g.n; })
        .def_property_readonly("k", [](const KnnDigraph& g) { return g.k; })
        .def_property_readonly("dim", [](const KnnDigraph& g) { return g.dim; })
        .def_property_readonly("indegree", [](const KnnDigraph& g) { return g.indegree; })
        .def_property_readonly("ties", [](const KnnDigraph& g) { return g.tie_events; })
        .def("neighbors",
             [](const KnnDigraph& g, std::int32_t v) {
                 const auto row = g.row(v);
                 return std::vector<std::int32_t>(row.begin(), row.end());
             })
        .def("arcs", [](const KnnDigraph& g) {
            std::vector<std::pair<std::int32_t, std::int32_t>> arcs;
            arcs.reserve(g.heads.size());
            for (std::int32_t v = 0; v < g.n; ++v)
                for (std::int32_t u : g.row(v)) arcs.emplace_back(v, u);
            return arcs;
        });

    py::class_<MotifPattern>(m, "MotifPattern")
        .def(py::init<int, std::vector<std::pair<int, int>>>(), py::arg("s"), py::arg("arcs"))
        .def_static("single_vertex", &MotifPattern::single_vertex)
        .def_static("single_arc", &MotifPattern::single_arc)
        .def_static("mutual_pair", &MotifPattern::mutual_pair)
        .def_static("shared_head", &MotifPattern::shared_head)
        .def_static("in_star", &MotifPattern::in_star, py::arg("tails"))
        .def_static("directed_cycle", &MotifPattern::directed_cycle, py::arg("s"))
        .def_property_readonly("s", &MotifPattern::s);

    // geometry / sampling
    m.def("distance",
          [](const std::vector<double>& p, const std::vector<double>& q) { return distance(p, q); });
    m.def(
        "sample",
        [](const std::string& process, std::int64_t n, const Region& region, std::uint64_t seed) {
            return sample_process(make_spec(process, n, region, seed));
        },
        py::arg("process"), py::arg("n"), py::arg("region"), py::arg("seed"));
    m.def("build_indegree_fixture",
          [](int d, int k, const std::vector<int>& class_sizes) {
              return build_indegree_fixture(d, k, class_sizes);
          },
          py::arg("d"), py::arg("k"), py::arg("class_sizes"));

    // digraph statistics
    m.def("build_knn_digraph",
          [](const PointSet& ps, int k, int threads) { return build_knn_digraph(ps, k, threads); },
          py::arg("points"), py::arg("k"), py::arg("threads") = 0);
    m.def("knn_query", [](const PointSet& ps, std::int32_t v, int k) {
        return KnnIndex(ps).query(v, k);
    });
    m.def("indegree_histogram", &indegree_histogram);
    m.def("count_reflexive", &count_reflexive);
    m.def("count_shared", &count_shared);
    m.def("weak_components", &weak_components);
    m.def("weak_component_count", &weak_component_count);
    m.def("underlying_graph", &underlying_graph);

    m.def(
        "count_marked_arcs",
        [](const KnnDigraph& g, const std::vector<std::int32_t>& marks, std::int32_t num_classes,
           std::int32_t i, std::int32_t j) {
            MarkVector mv;
            mv.marks = marks;
            mv.num_classes = num_classes;
            return count_marked_arcs(g, mv, i, j);
        },
        py::arg("g"), py::arg("marks"), py::arg("num_classes"), py::arg("i"), py::arg("j"));

    // motif counting
    m.def("automorphism_count", &automorphism_count);
    m.def("count_motif",
          [](const KnnDigraph& g, const MotifPattern& p, int threads) {
              return count_motif(g, p, threads);
          },
          py::arg("g"), py::arg("pattern"), py::arg("threads") = 0);
    m.def("local_motif_count", &local_motif_count);
    m.def("qj_via_inclusion_exclusion", &qj_via_inclusion_exclusion);
    m.def(
        "add_one_cost",
        [](const PointSet& ps, int k,
           const std::vector<std::pair<double, MotifPattern>>& terms,
           const std::vector<double>& at) {
            return add_one_cost(ps, k, StatisticSpec{terms}, at);
        },
        py::arg("points"), py::arg("k"), py::arg("terms"), py::arg("at"),
        "H(points + {at}) - H(points) for H = sum(coef * motif count)");

    // closed forms
    m.def("omega", &omega);
    m.def("r_pair", &r_pair);
    m.def("r_limit", &r_limit);
    m.def("q_limit_d1", &q_limit_d1);
    m.def("q_limit_highdim", &q_limit_highdim);
    m.def("qj_limit_highdim", &qj_limit_highdim);
    m.def("kappa_prime_bound", &kappa_prime_bound);
    m.def("known_constants", [](int d, int k) {
        py::list out;
        for (const auto& c : known_constants(d, k)) {
            py::dict e;
            e["name"] = c.name;
            e["d"] = c.d;
            e["k"] = c.k;
            if (c.j) e["j"] = *c.j;
            e["value"] = c.value;
            e["provenance"] =
                c.provenance == KnownConstant::Provenance::Exact ? "exact" : "paper-approx";
            e["source"] = c.source;
            out.append(e);
        }
        return out;
    });
    m.def(
        "estimate_b2",
        [](int d, std::int64_t samples, std::uint64_t seed, int threads) {
            const auto e = estimate_b2(d, samples, seed, threads);
            py::dict out;
            out["value"] = e.value;
            out["std_error"] = e.std_error;
            out["truncation_bound"] = e.truncation_bound;
            out["samples"] = e.samples;
            return out;
        },
        py::arg("d"), py::arg("samples"), py::arg("seed"), py::arg("threads") = 0);

    // experiments
    m.def(
        "run_experiment",
        [](const std::string& process, std::int64_t n, const Region& region, std::uint64_t seed,
           int k, const std::string& statistic, int replicates, bool torus, int threads) {
            ExperimentConfig cfg;
            cfg.process = make_spec(process, n, region, seed);
            cfg.k = k;
            cfg.statistic = statistic_from_name(statistic);
            cfg.replicates = replicates;
            cfg.torus = torus;
            cfg.threads = threads;
            return summary_to_dict(run_experiment(cfg));
        },
        py::arg("process"), py::arg("n"), py::arg("region"), py::arg("seed"), py::arg("k"),
        py::arg("statistic"), py::arg("replicates"), py::arg("torus") = false,
        py::arg("threads") = 0);

    m.def("run_identity_suite", [](int instances, std::uint64_t seed, int dmax, int kmax) {
        IdentitySuiteConfig cfg;
        cfg.instances = instances;
        cfg.seed = seed;
        cfg.dmax = dmax;
        cfg.kmax = kmax;
        const auto failures = run_identity_suite(cfg);
        py::list out;
        for (const auto& f : failures) out.append(py::make_tuple(f.identity, f.instance));
        return out;
    }, py::arg("instances") = 200, py::arg("seed") = 0, py::arg("dmax") = 3, py::arg("kmax") = 3);

    m.attr("__version__") = "0.1.0";
}
