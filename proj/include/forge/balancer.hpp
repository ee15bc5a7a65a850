#pragma once

// Degree balancing: pads a sampled graph with buffer vertices and a filler
// set, deletes edges at sub-threshold clusters, and adds bipartite/graphic
// edge sets so that every vertex's degree toward every cluster hits an exact
// integer target. All target arithmetic is integer; no floats touch the
// degree matrix.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "forge/degseq.hpp"
#include "forge/kernelcore.hpp"

namespace forge {

// Symmetric matrix of rationals with common denominator gamma, stored as
// integer numerators.
struct GammaMatrix {
    long long gamma = 0;
    std::vector<std::vector<long long>> num;

    double entry(int i, int j) const {
        return static_cast<double>(num[i][j]) / static_cast<double>(gamma);
    }
};

// Entrywise ceil(gamma * (1+alpha) d / (1+beta)) / gamma; diagonal entries
// round up to the next EVEN numerator so that the diagonal degree targets
// are even, which the graphic-sequence step needs unconditionally.
inline GammaMatrix gamma_round_matrix(const std::vector<std::vector<double>>& d, double alpha,
                                      double beta, long long gamma) {
    if (gamma < 2 || gamma % 2 != 0)
        throw parameter_error("gamma_round_matrix: gamma must be an even integer >= 2");
    if (!(alpha > 0.0 && beta > 0.0))
        throw parameter_error("gamma_round_matrix: alpha, beta must be positive");
    const int k = static_cast<int>(d.size());
    GammaMatrix out;
    out.gamma = gamma;
    out.num.assign(k, std::vector<long long>(k, 0));
    const double scale = (1.0 + alpha) / (1.0 + beta);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double val = static_cast<double>(gamma) * scale * d[i][j];
            long long c = static_cast<long long>(std::ceil(val - 1e-9));
            if (c < 0) c = 0;
            if (i == j && c % 2 != 0) ++c;
            if (c > gamma)
                throw parameter_error(
                    "gamma_round_matrix: rounded entry exceeds 1 (alpha too large for a "
                    "density this close to 1)");
            out.num[i][j] = c;
        }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (out.num[i][j] != out.num[j][i])
                throw error("gamma_round_matrix: output not symmetric");
    return out;
}

struct TargetDegreeMatrix {
    GammaMatrix dstar;
    std::vector<long long> part_sizes;              // |Z_i|, multiples of gamma
    std::vector<std::vector<long long>> targets;    // D_ij = dstar_ij * |Z_j|

    bool consistent() const {
        const int k = static_cast<int>(part_sizes.size());
        for (int i = 0; i < k; ++i) {
            if (part_sizes[i] % dstar.gamma != 0) return false;
            if (targets[i][i] % 2 != 0) return false;
            for (int j = 0; j < k; ++j)
                if (targets[i][j] * part_sizes[i] != targets[j][i] * part_sizes[j]) return false;
        }
        return true;
    }
};

struct BufferLayout {
    std::vector<std::vector<int>> x_vertices;  // per cluster, original ids
    std::vector<std::vector<int>> y_vertices;  // per cluster, buffer ids
    std::vector<int> z0;                       // filler ids

    long long buffer_total() const {
        long long t = 0;
        for (const auto& y : y_vertices) t += static_cast<long long>(y.size());
        return t;
    }
};

struct BalancedGraph {
    PartitionedGraph graph;  // parts: [Z0, Z1, ..., ZM]
    FICertificate certificate;
    long long deleted_edges = 0;
    BufferLayout layout;
    TargetDegreeMatrix targets;
};

// Exact equitability check: every vertex of part i must have exactly
// degree_matrix[i][j] neighbors in part j, and part sizes must match.
inline bool verify_certificate(const PartitionedGraph& g, const FICertificate& cert) {
    const int k = cert.classes();
    if (g.part_count() != k) return false;
    if (cert.total_vertices() != g.graph().n()) return false;
    for (int i = 0; i < k; ++i)
        if (static_cast<long long>(g.parts()[i].size()) != cert.part_sizes[i]) return false;
    const auto part = g.part_of();
    const auto adj = g.graph().adjacency();
    for (int x = 0; x < g.graph().n(); ++x) {
        std::vector<long long> deg(k, 0);
        for (int y : adj[x]) ++deg[part[y]];
        for (int j = 0; j < k; ++j)
            if (deg[j] != cert.degree_matrix[part[x]][j]) return false;
    }
    return true;
}

// Builds the balanced graph on n vertices from a sampled graph F whose parts
// are the profile's clusters. Cluster i gets |Z_i| = gamma*floor((1+beta)m
// v_i/gamma) vertices (X_i plus buffer Y_i); the filler Z0 absorbs the rest
// and stays isolated. Degree targets D_ij = dstar_ij |Z_j| are hit exactly
// for all clusters above the delta/M footprint threshold; sub-threshold
// clusters are fully isolated.
inline BalancedGraph build_balanced(const PartitionedGraph& f, const RobustProfile& profile,
                                    const PipelineParams& params, long long n) {
    const int k = profile.profile.size();
    if (f.part_count() != k)
        throw usage_error("build_balanced: sampled parts do not match profile");
    const long long m = f.graph().n();
    const long long gamma = params.gamma;
    const auto& v = profile.profile.footprint;

    const GammaMatrix gm =
        gamma_round_matrix(profile.profile.matrix, params.alpha, params.beta, gamma);

    std::vector<long long> z(k), y(k);
    long long sum_z = 0;
    for (int i = 0; i < k; ++i) {
        const double target = (1.0 + params.beta) * static_cast<double>(m) * v[i];
        z[i] = gamma * static_cast<long long>(std::floor(target / static_cast<double>(gamma) + 1e-9));
        y[i] = z[i] - static_cast<long long>(f.parts()[i].size());
        if (y[i] < 0)
            throw layout_error("build_balanced: negative buffer for cluster " +
                               std::to_string(i) + " (m, n, beta inconsistent with the sample)");
        sum_z += z[i];
    }
    const long long z0_size = n - sum_z;
    if (z0_size < 0)
        throw layout_error("build_balanced: cluster sizes exceed n");

    const double threshold = params.delta / static_cast<double>(k);
    std::vector<char> on(k, 0);
    for (int i = 0; i < k; ++i) on[i] = v[i] >= threshold;

    TargetDegreeMatrix tdm;
    tdm.dstar = gm;
    tdm.part_sizes = z;
    tdm.targets.assign(k, std::vector<long long>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (!on[i] || !on[j]) continue;
            tdm.targets[i][j] = gm.num[i][j] * (z[j] / gamma);
            if (tdm.targets[i][j] > z[j] || (i == j && tdm.targets[i][j] > z[i] - 1))
                throw balance_error("build_balanced: target degree exceeds cluster size",
                                    "target", i, j);
        }
    if (!tdm.consistent()) throw error("build_balanced: inconsistent target matrix");

    // Global vertex ids: F's vertices keep their ids, buffers follow in
    // cluster order, then the filler.
    BufferLayout layout;
    layout.x_vertices = f.parts();
    layout.y_vertices.resize(k);
    int next_id = static_cast<int>(m);
    for (int i = 0; i < k; ++i) {
        layout.y_vertices[i].resize(y[i]);
        std::iota(layout.y_vertices[i].begin(), layout.y_vertices[i].end(), next_id);
        next_id += static_cast<int>(y[i]);
    }
    layout.z0.resize(z0_size);
    std::iota(layout.z0.begin(), layout.z0.end(), next_id);

    // Keep F edges only between on-threshold clusters.
    const auto fpart = f.part_of();
    std::vector<std::pair<int, int>> edges;
    long long deleted = 0;
    for (const auto& [a, b] : f.graph().edges()) {
        if (on[fpart[a]] && on[fpart[b]])
            edges.emplace_back(a, b);
        else
            ++deleted;
    }

    // Current degree of every global vertex toward each cluster.
    std::vector<std::vector<long long>> deg(n, std::vector<long long>(k, 0));
    auto add_edge = [&](int a, int ca, int b, int cb) {
        edges.emplace_back(a, b);
        ++deg[a][cb];
        ++deg[b][ca];
    };
    for (const auto& [a, b] : edges) {
        ++deg[a][fpart[b]];
        ++deg[b][fpart[a]];
    }

    auto infeasible = [&](const char* step, int i, int j, const feasibility_error& e) {
        throw balance_error(std::string("build_balanced: ") + step + " infeasible for clusters (" +
                                std::to_string(i) + "," + std::to_string(j) + "): " + e.what() +
                                " — widen the beta-alpha gap or increase m",
                            step, i, j);
    };

    // Step 1: for every ordered on-threshold pair (i, j), lift each original
    // vertex of X_i to degree D_ij toward Z_j using new edges into the buffer
    // Y_j, with near-equal buffer-side degrees assigned round-robin by
    // ascending buffer index.
    for (int i = 0; i < k; ++i) {
        if (!on[i]) continue;
        for (int j = 0; j < k; ++j) {
            if (!on[j]) continue;
            const auto& xi = layout.x_vertices[i];
            const auto& yj = layout.y_vertices[j];
            std::vector<long long> a(xi.size());
            long long total = 0;
            for (std::size_t t = 0; t < xi.size(); ++t) {
                a[t] = tdm.targets[i][j] - deg[xi[t]][j];
                if (a[t] < 0)
                    throw balance_error(
                        "build_balanced: sampled degree exceeds target (a-sequence negative) "
                        "for clusters (" + std::to_string(i) + "," + std::to_string(j) +
                            ") — increase the beta-alpha gap or tighten lambda",
                        "a-sequence", i, j);
                total += a[t];
            }
            if (yj.empty()) {
                if (total > 0)
                    throw balance_error("build_balanced: nonzero correction with empty buffer",
                                        "a-sequence", i, j);
                continue;
            }
            const long long q = total / static_cast<long long>(yj.size());
            const long long r = total % static_cast<long long>(yj.size());
            std::vector<long long> b(yj.size());
            for (std::size_t s = 0; s < yj.size(); ++s)
                b[s] = q + (static_cast<long long>(s) < r ? 1 : 0);
            try {
                const auto real = realize_bigraphic(DegreeSequence(a), DegreeSequence(b));
                const int na = static_cast<int>(xi.size());
                for (const auto& [u, w] : real.graph.edges()) {
                    // u < w always, and sides are [0,na) and [na, ...).
                    add_edge(xi[u], i, yj[w - na], j);
                }
            } catch (const feasibility_error& e) {
                infeasible("first-step bipartite sequence", i, j, e);
            }
        }
    }

    // Step 2: off-diagonal buffer-to-buffer corrections.
    for (int i = 0; i < k; ++i) {
        if (!on[i]) continue;
        for (int j = i + 1; j < k; ++j) {
            if (!on[j]) continue;
            const auto& yi = layout.y_vertices[i];
            const auto& yj = layout.y_vertices[j];
            std::vector<long long> r1(yi.size()), r2(yj.size());
            for (std::size_t t = 0; t < yi.size(); ++t) {
                r1[t] = tdm.targets[i][j] - deg[yi[t]][j];
                if (r1[t] < 0)
                    throw balance_error("build_balanced: buffer overshoot (r-sequence negative)",
                                        "r-sequence", i, j);
            }
            for (std::size_t t = 0; t < yj.size(); ++t) {
                r2[t] = tdm.targets[j][i] - deg[yj[t]][i];
                if (r2[t] < 0)
                    throw balance_error("build_balanced: buffer overshoot (r-sequence negative)",
                                        "r-sequence", j, i);
            }
            if (yi.empty() || yj.empty()) {
                const long long need =
                    std::accumulate(r1.begin(), r1.end(), 0LL) +
                    std::accumulate(r2.begin(), r2.end(), 0LL);
                if (need > 0)
                    throw balance_error("build_balanced: nonzero correction with empty buffer",
                                        "r-sequence", i, j);
                continue;
            }
            try {
                const auto real = realize_bigraphic(DegreeSequence(r1), DegreeSequence(r2));
                const int na = static_cast<int>(yi.size());
                for (const auto& [u, w] : real.graph.edges()) add_edge(yi[u], i, yj[w - na], j);
            } catch (const feasibility_error& e) {
                infeasible("second-step bipartite sequence", i, j, e);
            }
        }
    }

    // Step 3: diagonal corrections inside each buffer via a graphic sequence.
    for (int i = 0; i < k; ++i) {
        if (!on[i]) continue;
        const auto& yi = layout.y_vertices[i];
        std::vector<long long> c(yi.size());
        long long sum_c = 0;
        for (std::size_t t = 0; t < yi.size(); ++t) {
            c[t] = tdm.targets[i][i] - deg[yi[t]][i];
            if (c[t] < 0)
                throw balance_error("build_balanced: buffer overshoot (c-sequence negative)",
                                    "c-sequence", i, i);
            sum_c += c[t];
        }
        if (yi.empty()) {
            continue;  // X_i alone must already meet the diagonal target; verified below
        }
        if (sum_c % 2 != 0)
            throw parity_error("build_balanced: odd diagonal correction sum for cluster " +
                               std::to_string(i) + " (even diagonal rounding violated)");
        try {
            const auto real = realize_graphic(DegreeSequence(c));
            for (const auto& [u, w] : real.edges()) add_edge(yi[u], i, yi[w], i);
        } catch (const feasibility_error& e) {
            infeasible("diagonal graphic sequence", i, i, e);
        }
    }

    // Assemble parts [Z0, Z1, ..., ZM].
    std::vector<std::vector<int>> parts(k + 1);
    parts[0] = layout.z0;
    for (int i = 0; i < k; ++i) {
        parts[i + 1] = layout.x_vertices[i];
        parts[i + 1].insert(parts[i + 1].end(), layout.y_vertices[i].begin(),
                            layout.y_vertices[i].end());
        std::sort(parts[i + 1].begin(), parts[i + 1].end());
    }
    PartitionedGraph out(FiniteGraph(static_cast<int>(n), std::move(edges)), std::move(parts));

    FICertificate cert;
    cert.part_sizes.assign(k + 1, 0);
    cert.part_sizes[0] = z0_size;
    for (int i = 0; i < k; ++i) cert.part_sizes[i + 1] = z[i];
    cert.degree_matrix.assign(k + 1, std::vector<long long>(k + 1, 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) cert.degree_matrix[i + 1][j + 1] = tdm.targets[i][j];
    cert.canonical = false;
    if (!cert.consistent()) throw error("build_balanced: inconsistent certificate");
    if (!verify_certificate(out, cert))
        throw error("build_balanced: constructed graph fails its own certificate");

    return BalancedGraph{std::move(out), std::move(cert), deleted, std::move(layout),
                         std::move(tdm)};
}

}  // namespace forge
