#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "knnd/montecarlo.hpp"

namespace knnd::io {

using nlohmann::json;

/// Points CSV: header `x0,...,x{d-1}`, one point per row, decimal notation,
/// LF line endings. Doubles round-trip exactly (17 significant digits).
std::string points_to_csv(const PointSet& ps);
PointSet points_from_csv(const std::string& text);
void write_points_csv(const std::string& path, const PointSet& ps);
PointSet read_points_csv(const std::string& path);

/// Digraph dump CSV: rows `tail,head,rank`.
std::string digraph_to_csv(const KnnDigraph& g);

/// Statistics JSON: {n, k, d, R, Q, Qj: [...], components}.
json stats_to_json(const KnnDigraph& g);

/// Pattern JSON: {"s": 3, "arcs": [[1,2],[3,2]]} (1-based vertex labels).
json pattern_to_json(const MotifPattern& p);
MotifPattern pattern_from_json(const json& j);

/// Statistic file: {"terms": [{"coef": 1.0, "pattern": {...}}]}.
json statistic_to_json(const StatisticSpec& spec);
StatisticSpec statistic_from_json(const json& j);

json region_to_json(const Region& r);
Region region_from_json(const json& j);

json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const json& j);

/// Results JSON: {config, estimates, diagnostics, counts, per_replicate?}.
json summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& s,
                     bool include_replicates);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
json read_json_file(const std::string& path);

/// Exact decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace knnd::io
