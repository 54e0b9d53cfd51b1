#include "knnd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace knnd::io {

std::string format_double(double v) {
    char buf[40];
    // shortest round-trip form
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string points_to_csv(const PointSet& ps) {
    std::string out;
    for (int i = 0; i < ps.dim(); ++i) {
        if (i) out += ',';
        out += 'x';
        out += std::to_string(i);
    }
    out += '\n';
    for (std::int64_t i = 0; i < ps.size(); ++i) {
        const auto p = ps.point(i);
        for (int c = 0; c < ps.dim(); ++c) {
            if (c) out += ',';
            out += format_double(p[c]);
        }
        out += '\n';
    }
    return out;
}

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

PointSet points_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("points CSV: empty input");
    const auto header = split_csv_line(line);
    const int d = static_cast<int>(header.size());
    for (int i = 0; i < d; ++i)
        if (header[i] != "x" + std::to_string(i))
            throw FormatError("points CSV: expected header x0,...,x" + std::to_string(d - 1) +
                              " but column " + std::to_string(i) + " is '" + header[i] + "'");

    PointSet ps(d);
    std::vector<double> row(d);
    std::int64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != d)
            throw FormatError("points CSV line " + std::to_string(lineno) + ": expected " +
                              std::to_string(d) + " fields, got " + std::to_string(fields.size()));
        for (int c = 0; c < d; ++c) {
            const auto& f = fields[c];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), row[c]);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
                throw FormatError("points CSV line " + std::to_string(lineno) +
                                  ": bad number '" + f + "'");
        }
        ps.add(row);
    }
    return ps;
}

void write_points_csv(const std::string& path, const PointSet& ps) {
    write_file(path, points_to_csv(ps));
}

PointSet read_points_csv(const std::string& path) { return points_from_csv(read_file(path)); }

std::string digraph_to_csv(const KnnDigraph& g) {
    std::string out = "tail,head,rank\n";
    for (std::int32_t v = 0; v < g.n; ++v)
        for (int r = 0; r < g.k; ++r) {
            out += std::to_string(v);
            out += ',';
            out += std::to_string(g.head(v, r));
            out += ',';
            out += std::to_string(r);
            out += '\n';
        }
    return out;
}

json stats_to_json(const KnnDigraph& g) {
    json j;
    j["n"] = g.n;
    j["k"] = g.k;
    j["d"] = g.dim;
    j["R"] = count_reflexive(g);
    j["Q"] = count_shared(g);
    j["Qj"] = indegree_histogram(g);
    j["components"] = weak_component_count(g);
    return j;
}

json pattern_to_json(const MotifPattern& p) {
    json arcs = json::array();
    for (auto [a, b] : p.arcs()) arcs.push_back({a + 1, b + 1});
    return json{{"s", p.s()}, {"arcs", arcs}};
}

MotifPattern pattern_from_json(const json& j) {
    try {
        const int s = j.at("s").get<int>();
        std::vector<std::pair<int, int>> arcs;
        for (const auto& a : j.at("arcs")) {
            if (!a.is_array() || a.size() != 2) throw FormatError("pattern arc must be a pair");
            arcs.emplace_back(a[0].get<int>(), a[1].get<int>());
        }
        return MotifPattern(s, std::move(arcs));
    } catch (const json::exception& e) {
        throw FormatError(std::string("pattern JSON: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("pattern JSON: ") + e.what());
    }
}

json statistic_to_json(const StatisticSpec& spec) {
    json terms = json::array();
    for (const auto& [coef, pattern] : spec.terms)
        terms.push_back({{"coef", coef}, {"pattern", pattern_to_json(pattern)}});
    return json{{"terms", terms}};
}

StatisticSpec statistic_from_json(const json& j) {
    try {
        StatisticSpec spec;
        for (const auto& t : j.at("terms"))
            spec.terms.emplace_back(t.at("coef").get<double>(), pattern_from_json(t.at("pattern")));
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw FormatError(std::string("statistic JSON: ") + e.what());
    }
}

json region_to_json(const Region& r) {
    json j;
    switch (r.kind()) {
        case Region::Kind::UnitCube:
            j["kind"] = "cube";
            j["dim"] = r.dim();
            break;
        case Region::Kind::Box:
            j["kind"] = "box";
            j["lo"] = r.lo();
            j["hi"] = r.hi();
            break;
        case Region::Kind::Ball:
            j["kind"] = "ball";
            j["center"] = r.ball_center();
            j["radius"] = r.ball_radius();
            break;
    }
    return j;
}

Region region_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "cube") return Region::unit_cube(j.at("dim").get<int>());
        if (kind == "box")
            return Region::box(j.at("lo").get<std::vector<double>>(),
                               j.at("hi").get<std::vector<double>>());
        if (kind == "ball") {
            if (j.contains("unit_volume") && j.at("unit_volume").get<bool>())
                return Region::unit_volume_ball(j.at("dim").get<int>());
            return Region::ball(j.at("center").get<std::vector<double>>(),
                                j.at("radius").get<double>());
        }
        throw FormatError("region kind must be cube|box|ball, got '" + kind + "'");
    } catch (const json::exception& e) {
        throw FormatError(std::string("region JSON: ") + e.what());
    }
}

static json statistic_kind_to_json(const Statistic& s) {
    json j;
    switch (s.kind) {
        case Statistic::Kind::R: j["name"] = "R"; break;
        case Statistic::Kind::Q: j["name"] = "Q"; break;
        case Statistic::Kind::Qj:
            j["name"] = "Qj";
            j["j"] = s.j;
            break;
        case Statistic::Kind::Nij:
            j["name"] = "Nij";
            j["i"] = s.mark_i;
            j["j"] = s.mark_j;
            break;
        case Statistic::Kind::Motif:
            j["name"] = "motif";
            j["spec"] = statistic_to_json(*s.spec);
            break;
    }
    return j;
}

static Statistic statistic_kind_from_json(const json& j) {
    const std::string name = j.at("name").get<std::string>();
    if (name == "R") return Statistic::reflexive();
    if (name == "Q") return Statistic::shared();
    if (name == "Qj") return Statistic::indegree_count(j.at("j").get<int>());
    if (name == "Nij") return Statistic::marked_arcs(j.at("i").get<int>(), j.at("j").get<int>());
    if (name == "motif") return Statistic::motif(statistic_from_json(j.at("spec")));
    throw FormatError("statistic name must be R|Q|Qj|Nij|motif, got '" + name + "'");
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["process"] = cfg.process.kind == ProcessSpec::Kind::Binomial ? "binomial" : "poisson";
    j["n"] = cfg.process.n;
    j["region"] = region_to_json(cfg.process.region);
    j["seed"] = cfg.process.seed;
    j["k"] = cfg.k;
    j["statistic"] = statistic_kind_to_json(cfg.statistic);
    j["replicates"] = cfg.replicates;
    if (cfg.marks) j["marks"] = cfg.marks->class_probs;
    j["torus"] = cfg.torus;
    return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
    try {
        ExperimentConfig cfg;
        const std::string process = j.at("process").get<std::string>();
        if (process == "binomial")
            cfg.process.kind = ProcessSpec::Kind::Binomial;
        else if (process == "poisson")
            cfg.process.kind = ProcessSpec::Kind::Poisson;
        else
            throw FormatError("process must be binomial|poisson, got '" + process + "'");
        cfg.process.n = j.at("n").get<std::int64_t>();
        cfg.process.region = region_from_json(j.at("region"));
        cfg.process.seed = j.at("seed").get<std::uint64_t>();
        cfg.k = j.at("k").get<int>();
        cfg.statistic = statistic_kind_from_json(j.at("statistic"));
        cfg.replicates = j.at("replicates").get<int>();
        if (j.contains("marks")) cfg.marks = MarkModel{j.at("marks").get<std::vector<double>>()};
        if (j.contains("torus")) cfg.torus = j.at("torus").get<bool>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw FormatError(std::string("experiment config JSON: ") + e.what());
    }
}

json summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& s,
                     bool include_replicates) {
    json j;
    j["config"] = experiment_config_to_json(cfg);
    j["estimates"] = {{"mean_over_n", s.mean_over_n},
                      {"var_over_n", s.var_over_n},
                      {"ci95", {s.ci95_lo, s.ci95_hi}}};
    j["diagnostics"] = {{"skewness", s.skewness},
                        {"excess_kurtosis", s.excess_kurtosis},
                        {"z_skew", s.z_skew},
                        {"z_kurt", s.z_kurt}};
    j["counts"] = {{"ties", s.tie_events}, {"degenerate", s.degenerate_replicates}};
    if (include_replicates) j["per_replicate"] = s.per_replicate;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write file: " + path);
    out << contents;
    if (!out) throw FormatError("short write: " + path);
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw FormatError("JSON parse error in " + path + ": " + e.what());
    }
}

}  // namespace knnd::io
