#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gwish/bdmcmc.hpp"
#include "gwish/graph.hpp"
#include "gwish/gwishart.hpp"
#include "gwish/version.hpp"

namespace gwish::io {

using nlohmann::json;

// ----------------------------------------------------------------- graphs

// {"schema_version": 1, "p": int, "edges": [[i,j], ...]}; edges are
// canonicalized (sorted, deduplicated, i < j) on read.
inline json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (auto [i, j] : g.edges()) edges.push_back({i, j});
    return json{{"schema_version", kSchemaVersion}, {"p", g.vertex_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
    if (!j.contains("p") || !j.contains("edges"))
        throw std::invalid_argument("graph JSON must contain 'p' and 'edges'");
    int p = j.at("p").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("graph JSON: bad edge entry");
        edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return Graph(p, std::move(edges));
}

inline void write_graph(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << graph_to_json(g).dump(2) << "\n";
}

inline Graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    in >> j;
    return graph_from_json(j);
}

// ------------------------------------------------------------------- data

// Headerless CSV, one row per observation.
inline void write_data_csv(const std::string& path, const Eigen::MatrixXd& X) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            if (c) out << ",";
            out << X(r, c);
        }
        out << "\n";
    }
}

inline Eigen::MatrixXd read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("data CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("data CSV: no rows");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows.front().size(); ++c)
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return X;
}

// ------------------------------------------------------------------ traces

// JSON Lines, one record per kept iteration:
// {"edges": [[i,j], ...], "w": weight}
inline void write_trace_jsonl(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    for (const auto& rec : trace.records) {
        json edges = json::array();
        for (auto [i, j] : rec.edges) edges.push_back({i, j});
        out << json{{"edges", edges}, {"w", rec.weight}}.dump() << "\n";
    }
}

inline Trace read_trace_jsonl(const std::string& path, int p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    Trace trace;
    trace.p = p;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        TraceRecord rec;
        for (const auto& e : j.at("edges")) rec.edges.push_back({e[0].get<int>(), e[1].get<int>()});
        rec.weight = j.at("w").get<double>();
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

// ----------------------------------------------------------------- summary

// {"schema_version": 1, "p": int, "edge_prob": [[...], ...]}
inline json summary_to_json(const Eigen::MatrixXd& edge_prob) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < edge_prob.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < edge_prob.cols(); ++c) row.push_back(edge_prob(r, c));
        rows.push_back(row);
    }
    return json{{"schema_version", kSchemaVersion},
                {"p", static_cast<int>(edge_prob.rows())},
                {"edge_prob", rows}};
}

inline Eigen::MatrixXd summary_from_json(const json& j) {
    int p = j.at("p").get<int>();
    Eigen::MatrixXd prob(p, p);
    const auto& rows = j.at("edge_prob");
    if (static_cast<int>(rows.size()) != p) throw std::invalid_argument("summary JSON: bad edge_prob shape");
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) prob(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    return prob;
}

inline void write_summary(const std::string& path, const Eigen::MatrixXd& edge_prob) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << summary_to_json(edge_prob).dump(2) << "\n";
}

inline Eigen::MatrixXd read_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    in >> j;
    return summary_from_json(j);
}

// ---------------------------------------------------------------- estimates

inline json norm_estimate_to_json(const NormEstimate& est) {
    return json{{"schema_version", kSchemaVersion},
                {"log_value", est.log_value},
                {"std_error", est.std_error},
                {"n_samples", est.n_samples}};
}

// ---------------------------------------------------------------- manifests

// Every file-producing command writes <output>.manifest.json recording how
// to reproduce the output exactly.
struct RunManifest {
    std::string subcommand;
    std::vector<std::string> argv;
    json flags = json::object();
    std::uint64_t seed = 0;
    double wall_clock_sec = 0.0;
};

inline json manifest_to_json(const RunManifest& m) {
    return json{{"schema_version", kSchemaVersion},
                {"subcommand", m.subcommand},
                {"argv", m.argv},
                {"flags", m.flags},
                {"seed", m.seed},
                {"library_version", kVersion},
                {"wall_clock_sec", m.wall_clock_sec}};
}

inline void write_manifest(const std::string& output_path, const RunManifest& m) {
    std::ofstream out(output_path + ".manifest.json");
    if (!out) throw std::runtime_error("cannot open for writing: " + output_path + ".manifest.json");
    out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace gwish::io
