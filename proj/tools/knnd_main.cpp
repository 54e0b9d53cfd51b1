// knnd: generate point processes, count kNN-digraph statistics, estimate
// their limits by seeded Monte Carlo, print closed-form constants, and run
// the deterministic identity suite.

#include <chrono>
#include <sstream>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "knnd/closedform.hpp"
#include "knnd/io.hpp"
#include "knnd/montecarlo.hpp"
#include "knnd/verify.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitVerification = 4;

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Resolve the run seed: flag if given, otherwise a fresh one, always printed.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    std::random_device rd;
    const std::uint64_t seed =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::cerr << "no --seed given; drew seed " << seed << "\n";
    return seed;
}

void write_manifest(const std::string& command, const json& config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    if (outputs.empty()) return;
    json m;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = seed;
    m["tool_version"] = kVersion;
    m["timestamp"] = timestamp_utc();
    m["outputs"] = outputs;
    knnd::io::write_file(outputs.front() + ".manifest.json", m.dump(2) + "\n");
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        knnd::io::write_file(out_path, text);
}

// --- gen -------------------------------------------------------------------

struct GenOpts {
    int dim = 2;
    std::int64_t n = 0;
    std::string process = "binomial";
    std::string region = "cube";
    std::optional<std::uint64_t> seed;
    std::string out;
};

int run_gen(const GenOpts& o) {
    knnd::ProcessSpec spec;
    spec.kind = o.process == "poisson" ? knnd::ProcessSpec::Kind::Poisson
                                       : knnd::ProcessSpec::Kind::Binomial;
    spec.n = o.n;
    spec.region = o.region == "ball" ? knnd::Region::unit_volume_ball(o.dim)
                                     : knnd::Region::unit_cube(o.dim);
    spec.seed = resolve_seed(o.seed);
    spec.validate();

    const knnd::PointSet ps = knnd::sample_process(spec);
    knnd::io::write_points_csv(o.out, ps);

    json cfg{{"dim", o.dim}, {"n", o.n},      {"process", o.process},
             {"region", o.region}, {"seed", spec.seed}, {"points", ps.size()}};
    write_manifest("gen", cfg, spec.seed, {o.out});
    std::cerr << "wrote " << ps.size() << " points to " << o.out << "\n";
    return 0;
}

// --- count -----------------------------------------------------------------

struct CountOpts {
    std::string in;
    int k = 1;
    std::string stat = "all";
    std::string marks;
    std::string out;
    std::string dump;
    int threads = 0;
};

int run_count(const CountOpts& o) {
    const knnd::PointSet ps = knnd::io::read_points_csv(o.in);
    const knnd::KnnDigraph g = knnd::build_knn_digraph(ps, o.k, o.threads);

    json j;
    j["n"] = g.n;
    j["k"] = g.k;
    j["d"] = g.dim;
    if (o.stat == "all") {
        j = knnd::io::stats_to_json(g);
    } else if (o.stat == "R") {
        j["R"] = knnd::count_reflexive(g);
    } else if (o.stat == "Q") {
        j["Q"] = knnd::count_shared(g);
    } else if (o.stat == "Qj") {
        j["Qj"] = knnd::indegree_histogram(g);
    } else if (o.stat.rfind("motif:", 0) == 0) {
        const json mj = knnd::io::read_json_file(o.stat.substr(6));
        if (mj.contains("terms")) {
            j["statistic_value"] = knnd::evaluate_statistic(g, knnd::io::statistic_from_json(mj),
                                                            o.threads);
        } else {
            j["motif_count"] = knnd::count_motif(g, knnd::io::pattern_from_json(mj), o.threads);
        }
    } else if (o.stat.rfind("Nij:", 0) == 0) {
        const std::string rest = o.stat.substr(4);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw knnd::InvalidArgument("expected Nij:<i>,<j>, got '" + o.stat + "'");
        const int ci = std::stoi(rest.substr(0, comma));
        const int cj = std::stoi(rest.substr(comma + 1));
        if (o.marks.empty()) throw knnd::InvalidArgument("Nij needs --marks <file>");
        // marks CSV: header `mark`, one integer per point row
        const std::string text = knnd::io::read_file(o.marks);
        knnd::MarkVector mv;
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line) || (line != "mark" && line != "mark\r"))
            throw knnd::FormatError("marks CSV must start with header 'mark'");
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            mv.marks.push_back(std::stoi(line));
            mv.num_classes = std::max(mv.num_classes, mv.marks.back());
        }
        j["i"] = ci;
        j["j"] = cj;
        j["Nij"] = knnd::count_marked_arcs(g, mv, ci, cj);
    } else {
        throw knnd::InvalidArgument("unknown --stat '" + o.stat + "'");
    }
    j["ties"] = g.tie_events;

    emit(o.out, j.dump(2) + "\n");
    if (!o.dump.empty()) knnd::io::write_file(o.dump, knnd::io::digraph_to_csv(g));
    if (!o.out.empty()) {
        json cfg{{"in", o.in}, {"k", o.k}, {"stat", o.stat}};
        write_manifest("count", cfg, 0, {o.out});
    }
    return 0;
}

// --- estimate ----------------------------------------------------------------

struct EstimateOpts {
    std::string config;
    std::string out;
    std::string per_replicate;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool include_replicates = false;
    // flag-based alternative to --config
    int dim = 0;
    std::int64_t n = 0;
    std::string process = "binomial";
    std::string region = "cube";
    std::string stat = "R";
    int k = 1;
    int replicates = 0;
    bool torus = false;
};

knnd::ExperimentConfig estimate_config_from_flags(const EstimateOpts& o) {
    if (o.dim <= 0 || o.n <= 0 || o.replicates <= 0)
        throw knnd::InvalidArgument("estimate needs either --config or --dim/--n/--replicates");
    json j;
    j["process"] = o.process;
    j["n"] = o.n;
    j["region"] = o.region == "ball"
                      ? json{{"kind", "ball"}, {"unit_volume", true}, {"dim", o.dim}}
                      : json{{"kind", "cube"}, {"dim", o.dim}};
    j["seed"] = 0;  // resolved below
    j["k"] = o.k;
    j["replicates"] = o.replicates;
    j["torus"] = o.torus;
    if (o.stat == "R" || o.stat == "Q") {
        j["statistic"] = {{"name", o.stat}};
    } else if (o.stat.rfind("Q", 0) == 0 && o.stat.size() > 1) {
        j["statistic"] = {{"name", "Qj"}, {"j", std::stoi(o.stat.substr(1))}};
    } else if (o.stat.rfind("motif:", 0) == 0) {
        j["statistic"] = {{"name", "motif"},
                          {"spec", knnd::io::read_json_file(o.stat.substr(6))}};
    } else {
        throw knnd::InvalidArgument("--stat must be R, Q, Q<j>, or motif:<file>");
    }
    return knnd::io::experiment_config_from_json(j);
}

int run_estimate(const EstimateOpts& o) {
    knnd::ExperimentConfig cfg =
        o.config.empty()
            ? estimate_config_from_flags(o)
            : knnd::io::experiment_config_from_json(knnd::io::read_json_file(o.config));
    if (o.config.empty()) cfg.process.seed = resolve_seed(o.seed);
    if (o.seed) cfg.process.seed = *o.seed;
    if (o.threads > 0) cfg.threads = o.threads;

    const knnd::ExperimentSummary s = knnd::run_experiment(cfg);
    const json j = knnd::io::summary_to_json(cfg, s, o.include_replicates);
    emit(o.out, j.dump(2) + "\n");

    if (!o.per_replicate.empty()) {
        std::string csv = "replicate,value\n";
        for (std::size_t r = 0; r < s.per_replicate.size(); ++r)
            csv += std::to_string(r) + "," + knnd::io::format_double(s.per_replicate[r]) + "\n";
        knnd::io::write_file(o.per_replicate, csv);
    }
    if (!o.out.empty()) {
        std::vector<std::string> outputs{o.out};
        if (!o.per_replicate.empty()) outputs.push_back(o.per_replicate);
        write_manifest("estimate", knnd::io::experiment_config_to_json(cfg), cfg.process.seed,
                       outputs);
    }
    return 0;
}

// --- constants ----------------------------------------------------------------

struct ConstantsOpts {
    std::string table = "r";
    int dmax = 2;
    int kmax = 5;
    bool kissing = false;
    std::string format = "csv";
    std::string out;
};

int run_constants(const ConstantsOpts& o) {
    std::string text;
    json j = json::array();

    if (o.kissing) {
        text = "d,kappa_lo,kappa_hi,kappa_prime\n";
        for (const auto& e : knnd::kissing_table()) {
            text += std::to_string(e.d) + "," + std::to_string(e.kappa_lo) + "," +
                    std::to_string(e.kappa_hi) + "," +
                    (e.kappa_prime ? std::to_string(*e.kappa_prime) : "") + "\n";
            json row{{"d", e.d}, {"kappa_lo", e.kappa_lo}, {"kappa_hi", e.kappa_hi}};
            if (e.kappa_prime) row["kappa_prime"] = *e.kappa_prime;
            j.push_back(row);
        }
    } else if (o.table == "r") {
        text = "d,k,r\n";
        for (int d = 1; d <= o.dmax; ++d)
            for (int k = 1; k <= o.kmax; ++k) {
                const double v = knnd::r_limit(d, k);
                text += std::to_string(d) + "," + std::to_string(k) + "," +
                        knnd::io::format_double(v) + "\n";
                j.push_back({{"d", d}, {"k", k}, {"r", v}});
            }
    } else if (o.table == "q1") {
        text = "k,q\n";
        for (int k = 1; k <= o.kmax; ++k) {
            const double v = knnd::q_limit_d1(k);
            text += std::to_string(k) + "," + knnd::io::format_double(v) + "\n";
            j.push_back({{"k", k}, {"q", v}});
        }
    } else if (o.table == "known") {
        text = "name,d,k,j,value,provenance,source\n";
        for (const auto& c : knnd::known_constants_all()) {
            text += c.name + "," + std::to_string(c.d) + "," + std::to_string(c.k) + "," +
                    (c.j ? std::to_string(*c.j) : "") + "," + knnd::io::format_double(c.value) +
                    "," +
                    (c.provenance == knnd::KnownConstant::Provenance::Exact ? "exact"
                                                                            : "paper-approx") +
                    "," + c.source + "\n";
            json row{{"name", c.name},
                     {"d", c.d},
                     {"k", c.k},
                     {"value", c.value},
                     {"provenance",
                      c.provenance == knnd::KnownConstant::Provenance::Exact ? "exact"
                                                                             : "paper-approx"},
                     {"source", c.source}};
            if (c.j) row["j"] = *c.j;
            j.push_back(row);
        }
    } else {
        throw knnd::InvalidArgument("unknown --table '" + o.table + "' (use r|q1|known)");
    }

    emit(o.out, o.format == "json" ? j.dump(2) + "\n" : text);
    if (!o.out.empty()) {
        json cfg{{"table", o.table}, {"dmax", o.dmax}, {"kmax", o.kmax},
                 {"kissing", o.kissing}, {"format", o.format}};
        write_manifest("constants", cfg, 0, {o.out});
    }
    return 0;
}

// --- verify --------------------------------------------------------------------

struct VerifyOpts {
    int instances = 200;
    std::optional<std::uint64_t> seed;
    int dmax = 3;
    int kmax = 3;
    std::int64_t nmin = 50, nmax = 500;
};

int run_verify(const VerifyOpts& o) {
    knnd::IdentitySuiteConfig cfg;
    cfg.instances = o.instances;
    cfg.seed = resolve_seed(o.seed);
    cfg.dmax = o.dmax;
    cfg.kmax = o.kmax;
    cfg.nmin = o.nmin;
    cfg.nmax = o.nmax;

    const auto failures = knnd::run_identity_suite(cfg);
    if (failures.empty()) {
        std::cout << "verify: " << cfg.instances << " instances, all identities hold (seed "
                  << cfg.seed << ")\n";
        return 0;
    }
    for (const auto& f : failures)
        std::cout << "verify: identity violated: " << f.identity << " [" << f.instance << "]\n";
    return kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kNN digraph statistics toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GenOpts gen;
    auto* cgen = app.add_subcommand("gen", "sample a point process to a points CSV");
    cgen->add_option("--dim", gen.dim, "dimension d")->check(CLI::PositiveNumber);
    cgen->add_option("--n", gen.n, "sample size / expected count")->required();
    cgen->add_option("--process", gen.process, "binomial|poisson")
        ->check(CLI::IsMember({"binomial", "poisson"}));
    cgen->add_option("--region", gen.region, "cube|ball (unit volume)")
        ->check(CLI::IsMember({"cube", "ball"}));
    cgen->add_option("--seed", gen.seed, "RNG seed (drawn and printed if absent)");
    cgen->add_option("--out", gen.out, "output CSV path")->required();

    CountOpts count;
    auto* ccount = app.add_subcommand("count", "build the kNN digraph and count statistics");
    ccount->add_option("--in", count.in, "points CSV")->required();
    ccount->add_option("--k", count.k, "neighbour order k")->required()->check(CLI::PositiveNumber);
    ccount->add_option("--stat", count.stat, "R|Q|Qj|all|motif:<file>|Nij:<i>,<j>");
    ccount->add_option("--marks", count.marks, "marks CSV (for Nij)");
    ccount->add_option("--out", count.out, "output JSON path (stdout if absent)");
    ccount->add_option("--dump", count.dump, "also dump the digraph as tail,head,rank CSV");
    ccount->add_option("--threads", count.threads, "worker threads (0 = auto)");

    EstimateOpts est;
    auto* cest = app.add_subcommand("estimate", "run a seeded Monte Carlo experiment");
    cest->add_option("--config", est.config, "experiment config JSON (or use the flags below)");
    cest->add_option("--dim", est.dim, "dimension d");
    cest->add_option("--n", est.n, "sample size / expected count");
    cest->add_option("--process", est.process, "binomial|poisson")
        ->check(CLI::IsMember({"binomial", "poisson"}));
    cest->add_option("--region", est.region, "cube|ball")
        ->check(CLI::IsMember({"cube", "ball"}));
    cest->add_option("--k", est.k, "neighbour order k");
    cest->add_option("--stat", est.stat, "R|Q|Q<j>|motif:<file>");
    cest->add_option("--replicates", est.replicates, "replicate count");
    cest->add_flag("--torus", est.torus, "torus metric (diagnostic; cube only)");
    cest->add_option("--out", est.out, "results JSON path (stdout if absent)");
    cest->add_option("--per-replicate", est.per_replicate, "per-replicate CSV path");
    cest->add_option("--seed", est.seed, "override the config seed");
    cest->add_option("--threads", est.threads, "worker threads (0 = auto)");
    cest->add_flag("--include-replicates", est.include_replicates,
                   "embed per-replicate values in the results JSON");

    ConstantsOpts consts;
    auto* cconst = app.add_subcommand("constants", "print closed-form tables and the catalog");
    cconst->add_option("--table", consts.table, "r|q1|known");
    cconst->add_option("--dmax", consts.dmax, "max dimension for --table r");
    cconst->add_option("--kmax", consts.kmax, "max k");
    cconst->add_flag("--kissing", consts.kissing, "list kissing numbers instead");
    cconst->add_option("--format", consts.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cconst->add_option("--out", consts.out, "output path (stdout if absent)");

    VerifyOpts ver;
    auto* cver = app.add_subcommand("verify", "run the deterministic identity suite");
    cver->add_option("--instances", ver.instances, "number of random instances");
    cver->add_option("--seed", ver.seed, "RNG seed (drawn and printed if absent)");
    cver->add_option("--dmax", ver.dmax, "max dimension");
    cver->add_option("--kmax", ver.kmax, "max k");
    cver->add_option("--nmin", ver.nmin, "min points per instance");
    cver->add_option("--nmax", ver.nmax, "max points per instance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cgen->parsed()) return run_gen(gen);
        if (ccount->parsed()) return run_count(count);
        if (cest->parsed()) return run_estimate(est);
        if (cconst->parsed()) return run_constants(consts);
        if (cver->parsed()) return run_verify(ver);
    } catch (const knnd::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const knnd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
