#pragma once

// Seeded sampling of G(m, W) from a step graphon with its induced partition,
// plus rejection sampling against the size and degree concentration events
// the balancer relies on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "forge/kernelcore.hpp"
#include "forge/rng.hpp"

namespace forge {

// One attempt: every vertex draws a part index with probability equal to the
// weights (all part draws first), then each pair {u, v} with u < v is an edge
// independently with the block density, in row-major order. The returned
// partition is the induced one (possibly with empty parts).
inline PartitionedGraph sample_once(const StepGraphon& w, long long m, std::uint64_t seed) {
    if (m < 2) throw usage_error("sample_once: m >= 2 required");
    const int parts = w.parts();
    Rng rng(seed);
    std::vector<int> part(m);
    for (long long v = 0; v < m; ++v) {
        const double u = rng.unit();
        double acc = 0.0;
        int p = parts - 1;
        for (int i = 0; i < parts; ++i) {
            acc += w.weight(i);
            if (u < acc) {
                p = i;
                break;
            }
        }
        part[v] = p;
    }
    std::vector<std::pair<int, int>> edges;
    for (long long u = 0; u < m; ++u)
        for (long long v = u + 1; v < m; ++v)
            if (rng.coin(w.density(part[u], part[v])))
                edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    std::vector<std::vector<int>> induced(parts);
    for (long long v = 0; v < m; ++v) induced[part[v]].push_back(static_cast<int>(v));
    return PartitionedGraph(FiniteGraph(static_cast<int>(m), std::move(edges)),
                            std::move(induced));
}

struct EventReport {
    // Per cluster of the profile: relative part-size deviation from v_i m
    // (only meaningful for clusters with footprint >= delta/M).
    std::vector<double> size_deviation;
    bool size_event_pass = false;
    // Worst relative degree deviation over all vertices and enforced targets.
    double worst_degree_deviation = 0.0;
    bool degree_event_pass = false;
    // The sampling step's assumed cut-distance bound (not verified here).
    double assumed_cut_bound = 0.0;
};

struct SampleOutcome {
    PartitionedGraph graph;  // parts indexed by the PROFILE's clusters
    int attempts = 0;
    EventReport event_report;
};

// Recomputes the concentration events from scratch for a graph whose parts
// are indexed by the profile's clusters. Used both by the rejection loop and
// by independent re-verification in tests.
inline EventReport check_events(const PartitionedGraph& g, const RobustProfile& profile,
                                const PipelineParams& params) {
    const int k = profile.profile.size();
    if (g.part_count() != k)
        throw usage_error("check_events: part count does not match profile");
    const double m = static_cast<double>(g.graph().n());
    const double threshold = params.delta / static_cast<double>(k);
    const auto& v = profile.profile.footprint;
    const auto& d = profile.profile.matrix;

    EventReport rep;
    rep.assumed_cut_bound = 22.0 / std::sqrt(std::log2(m));
    rep.size_deviation.assign(k, 0.0);
    rep.size_event_pass = true;
    for (int i = 0; i < k; ++i) {
        const double target = v[i] * m;
        rep.size_deviation[i] =
            target > 0.0 ? std::abs(static_cast<double>(g.parts()[i].size()) - target) / target
                         : 0.0;
        if (v[i] >= threshold && rep.size_deviation[i] > params.lambda) rep.size_event_pass = false;
    }

    const auto part = g.part_of();
    const auto adj = g.graph().adjacency();
    rep.degree_event_pass = true;
    const double slack = 6.0 * params.lambda;
    for (int x = 0; x < g.graph().n(); ++x) {
        std::vector<long long> deg(k, 0);
        for (int y : adj[x]) ++deg[part[y]];
        const int i = part[x];
        for (int j = 0; j < k; ++j) {
            if (v[j] < threshold) continue;
            const double target = d[i][j] * v[j] * m;
            // +-1 widening absorbs the m vs m-1 off-by-one; zero-density
            // pairs are exempt from the lower bound (degrees are exactly 0).
            const double lo = d[i][j] == 0.0 ? 0.0 : (1.0 - slack) * target - 1.0;
            const double hi = (1.0 + slack) * target + 1.0;
            const double dx = static_cast<double>(deg[j]);
            if (dx < lo || dx > hi) rep.degree_event_pass = false;
            if (target > 0.0) {
                const double rel = std::abs(dx - target) / target;
                rep.worst_degree_deviation = std::max(rep.worst_degree_deviation, rel);
            }
        }
    }
    return rep;
}

// Rejection sampling: attempts use seeds seed, seed+1, ... and the first
// attempt satisfying both events is returned. part_to_class merges the
// graphon's parts into the profile's clusters (identity when the graphon's
// parts ARE the clusters).
inline SampleOutcome sample_with_events(const StepGraphon& w, const RobustProfile& profile,
                                        const PipelineParams& params, std::uint64_t seed,
                                        int max_attempts,
                                        const std::vector<int>& part_to_class = {}) {
    if (max_attempts < 1) throw usage_error("sample_with_events: max_attempts >= 1");
    std::vector<int> map = part_to_class;
    if (map.empty()) {
        map.resize(w.parts());
        std::iota(map.begin(), map.end(), 0);
    }
    if (static_cast<int>(map.size()) != w.parts())
        throw usage_error("sample_with_events: part_to_class does not match graphon");
    const int k = profile.profile.size();

    EventReport best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        auto sampled = sample_once(w, params.m, seed + static_cast<std::uint64_t>(attempt - 1));
        // Merge induced parts into profile clusters.
        std::vector<std::vector<int>> clusters(k);
        for (int p = 0; p < w.parts(); ++p) {
            auto& dst = clusters[map[p]];
            const auto& src = sampled.parts()[p];
            dst.insert(dst.end(), src.begin(), src.end());
        }
        for (auto& c : clusters) std::sort(c.begin(), c.end());
        PartitionedGraph merged(sampled.graph(), std::move(clusters));
        auto rep = check_events(merged, profile, params);
        if (rep.size_event_pass && rep.degree_event_pass)
            return SampleOutcome{std::move(merged), attempt, std::move(rep)};
        const double score =
            rep.worst_degree_deviation +
            *std::max_element(rep.size_deviation.begin(), rep.size_deviation.end());
        if (score < best_score) {
            best_score = score;
            best = rep;
        }
    }
    throw concentration_error(
        "sample_with_events: retry budget exhausted after " + std::to_string(max_attempts) +
        " attempts (best worst-case degree deviation " +
        std::to_string(best.worst_degree_deviation) + ", size deviation " +
        std::to_string(*std::max_element(best.size_deviation.begin(),
                                         best.size_deviation.end())) +
        "); m is likely too small for the requested lambda");
}

}  // namespace forge
