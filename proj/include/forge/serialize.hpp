#pragma once

// JSON and flat-file serialization: graphons, certificates, run configs,
// distance reports, edge lists ("n m" header then "u v" lines), and
// partition files (one part index per vertex line).

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/kernelcore.hpp"
#include "forge/pipeline.hpp"

namespace forge {

using json = nlohmann::json;

inline json graphon_to_json(const StepGraphon& w) {
    return json{{"weights", w.weights()}, {"densities", w.densities()}};
}

inline StepGraphon graphon_from_json(const json& j) {
    if (!j.contains("weights") || !j.contains("densities"))
        throw input_error("graphon: expected fields \"weights\" and \"densities\"");
    try {
        return StepGraphon(j.at("weights").get<std::vector<double>>(),
                           j.at("densities").get<std::vector<std::vector<double>>>());
    } catch (const json::exception& e) {
        throw input_error(std::string("graphon: malformed JSON: ") + e.what());
    } catch (const usage_error& e) {
        throw input_error(std::string("graphon: ") + e.what());
    }
}

inline json certificate_to_json(const FICertificate& c) {
    return json{{"part_sizes", c.part_sizes}, {"degree_matrix", c.degree_matrix}};
}

inline FICertificate certificate_from_json(const json& j) {
    FICertificate c;
    try {
        c.part_sizes = j.at("part_sizes").get<std::vector<long long>>();
        c.degree_matrix = j.at("degree_matrix").get<std::vector<std::vector<long long>>>();
    } catch (const json::exception& e) {
        throw input_error(std::string("certificate: malformed JSON: ") + e.what());
    }
    return c;
}

inline json report_to_json(const DistanceReport& r) {
    return json{{"cleaning_l1", r.cleaning_l1},
                {"sampling_bound", r.sampling_bound},
                {"sampling_bound_vacuous", r.sampling_bound_vacuous},
                {"balancing_bound", r.balancing_bound},
                {"stepped_density_max_dev", r.stepped_density_max_dev},
                {"targets_exact", r.targets_exact},
                {"total", r.total}};
}

inline json params_to_json(const PipelineParams& p) {
    return json{{"epsilon", p.epsilon}, {"beta", p.beta},   {"lambda", p.lambda},
                {"delta", p.delta},     {"alpha", p.alpha}, {"gamma", p.gamma},
                {"m", p.m},             {"n", p.n},
                {"mode", p.mode == ParamMode::strict ? "strict" : "practical"}};
}

inline void write_edge_list(std::ostream& out, const FiniteGraph& g) {
    out << g.n() << ' ' << g.edge_count() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline FiniteGraph read_edge_list(std::istream& in) {
    long long n = 0, m = 0;
    if (!(in >> n >> m)) throw input_error("edge list: missing \"n m\" header");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(m);
    for (long long e = 0; e < m; ++e) {
        int u = 0, v = 0;
        if (!(in >> u >> v)) throw input_error("edge list: truncated edge lines");
        edges.emplace_back(u, v);
    }
    try {
        return FiniteGraph(static_cast<int>(n), std::move(edges));
    } catch (const usage_error& e) {
        throw input_error(std::string("edge list: ") + e.what());
    }
}

inline void write_parts(std::ostream& out, const PartitionedGraph& g) {
    for (int p : g.part_of()) out << p << '\n';
}

inline std::vector<int> read_parts(std::istream& in) {
    std::vector<int> parts;
    int p = 0;
    while (in >> p) parts.push_back(p);
    return parts;
}

inline FiniteGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    return read_edge_list(in);
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    if (!j.contains("family") || !j.at("family").is_array() || j.at("family").empty())
        throw input_error("config: \"family\" must be a nonempty array of graphons");
    for (const auto& g : j.at("family")) c.family.push_back(graphon_from_json(g));
    try {
        c.epsilon = j.at("epsilon").get<double>();
        c.n = j.at("n").get<long long>();
    } catch (const json::exception& e) {
        throw input_error(std::string("config: need numeric \"epsilon\" and \"n\": ") + e.what());
    }
    if (j.contains("mode")) {
        const auto mode = j.at("mode").get<std::string>();
        if (mode == "regular")
            c.mode = RunMode::regular;
        else if (mode == "general")
            c.mode = RunMode::general;
        else
            throw input_error("config: mode must be \"general\" or \"regular\"");
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("strict")) c.strict = j.at("strict").get<bool>();
    if (j.contains("budgets")) {
        const auto& b = j.at("budgets");
        if (b.contains("sample_attempts"))
            c.budgets.sample_attempts = b.at("sample_attempts").get<int>();
        if (b.contains("member_retries"))
            c.budgets.member_retries = b.at("member_retries").get<int>();
    }
    if (j.contains("params_override")) {
        const auto& p = j.at("params_override");
        PipelineParams pp;
        pp.epsilon = p.value("epsilon", 0.0);
        pp.beta = p.at("beta").get<double>();
        pp.lambda = p.at("lambda").get<double>();
        pp.delta = p.at("delta").get<double>();
        pp.alpha = p.at("alpha").get<double>();
        pp.gamma = p.at("gamma").get<long long>();
        pp.m = p.at("m").get<long long>();
        pp.n = c.n;
        pp.mode = ParamMode::practical;
        c.params_override = pp;
    }
    return c;
}

inline RunConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline json result_to_json(const RunResult& r) {
    json members = json::array();
    for (const auto& m : r.members)
        members.push_back(json{{"vertices", m.graph.graph().n()},
                               {"edges", m.graph.graph().edge_count()},
                               {"sample_attempts", m.sample_attempts},
                               {"retries", m.retries},
                               {"deleted_edges", m.deleted_edges},
                               {"report", report_to_json(m.report)}});
    json fi = json::array();
    for (const auto& row : r.pairwise_fi) fi.push_back(row);
    return json{{"params", params_to_json(r.params)},
                {"members", members},
                {"pairwise_fi", fi},
                {"certificates_identical", r.certificates_identical},
                {"all_fi", r.all_fi},
                {"strict_violations", r.strict_violations}};
}

}  // namespace forge
