#pragma once

// Core value types shared by every module: step graphons, density profiles,
// finite graphs with optional vertex partitions, and the pipeline parameter
// block. All types are immutable values after construction; operations are
// pure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forge {

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kDefaultTol = 1e-9;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller passed something structurally wrong (bad index, non-tree, ...).
struct usage_error : error {
    using error::error;
};

// A degree sequence fails Erdos-Gallai / Gale-Ryser; carries the violated
// condition ("EG1", "EG2", "GR1", "GR2") and a witness k where applicable.
struct feasibility_error : error {
    std::string condition;
    long long witness_k;
    feasibility_error(const std::string& msg, std::string cond, long long k)
        : error(msg), condition(std::move(cond)), witness_k(k) {}
};

// Empty part fed into a density computation.
struct degenerate_input_error : error {
    using error::error;
};

struct parameter_error : error {
    using error::error;
};

struct layout_error : error {
    using error::error;
};

struct parity_error : error {
    using error::error;
};

struct oracle_limit_error : error {
    using error::error;
};

struct setup_error : error {
    using error::error;
};

// Sampler exhausted its retry budget.
struct concentration_error : error {
    using error::error;
};

// Balancer hit an infeasible degree-sequence step.
struct balance_error : error {
    std::string step;
    int part_i = -1, part_j = -1;
    balance_error(const std::string& msg, std::string s, int i, int j)
        : error(msg), step(std::move(s)), part_i(i), part_j(j) {}
};

struct input_error : error {
    using error::error;
};

// ---------------------------------------------------------------------------
// StepGraphon: a graphon constant on blocks of a finite weighted partition.

class StepGraphon {
public:
    StepGraphon(std::vector<double> weights,
                std::vector<std::vector<double>> densities)
        : weights_(std::move(weights)), densities_(std::move(densities)) {
        validate();
    }

    static StepGraphon constant(double d) {
        return StepGraphon({1.0}, {{d}});
    }

    int parts() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<std::vector<double>>& densities() const { return densities_; }
    double weight(int i) const { return weights_.at(i); }
    double density(int i, int j) const { return densities_.at(i).at(j); }

    // Generalized degree of any point of part i toward part j: constant on
    // step graphons, equal to densities[i][j] * weights[j].
    double degree(int i, int j) const {
        if (i < 0 || i >= parts() || j < 0 || j >= parts())
            throw usage_error("degree: part index out of range");
        return densities_[i][j] * weights_[j];
    }

private:
    void validate() const {
        const int m = parts();
        if (m == 0) throw usage_error("StepGraphon: no parts");
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w > 0.0)) throw usage_error("StepGraphon: weights must be strictly positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw usage_error("StepGraphon: weights must sum to 1");
        if (static_cast<int>(densities_.size()) != m)
            throw usage_error("StepGraphon: density matrix size mismatch");
        for (int i = 0; i < m; ++i) {
            if (static_cast<int>(densities_[i].size()) != m)
                throw usage_error("StepGraphon: density matrix not square");
            for (int j = 0; j < m; ++j) {
                const double d = densities_[i][j];
                if (!(d >= 0.0 && d <= 1.0))
                    throw usage_error("StepGraphon: density outside [0,1]");
                if (densities_[i][j] != densities_[j][i])
                    throw usage_error("StepGraphon: density matrix not symmetric");
            }
        }
    }

    std::vector<double> weights_;
    std::vector<std::vector<double>> densities_;
};

// ---------------------------------------------------------------------------
// DensityProfile / RobustProfile: the shared fractional-isomorphism
// fingerprint (cluster footprint vector v, density matrix D).

struct DensityProfile {
    std::vector<double> footprint;
    std::vector<std::vector<double>> matrix;

    int size() const { return static_cast<int>(footprint.size()); }

    void validate() const {
        double sum = 0.0;
        for (double v : footprint) {
            if (!(v >= 0.0 && v <= 1.0))
                throw usage_error("DensityProfile: footprint entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw usage_error("DensityProfile: footprint must sum to 1");
        const int m = size();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (!(matrix[i][j] >= 0.0 && matrix[i][j] <= 1.0))
                    throw usage_error("DensityProfile: matrix entry outside [0,1]");
                if (matrix[i][j] != matrix[j][i])
                    throw usage_error("DensityProfile: matrix not symmetric");
            }
    }
};

struct RobustProfile {
    DensityProfile profile;
    double beta = 0.0;

    void validate() const {
        profile.validate();
        if (!(beta > 0.0 && beta < 0.5))
            throw parameter_error("RobustProfile: beta outside (0, 1/2)");
        for (const auto& row : profile.matrix)
            for (double d : row)
                if (d != 0.0 && (d < beta - 1e-12 || d > 1.0 - beta + 1e-12))
                    throw parameter_error("RobustProfile: entry neither 0 nor in [beta, 1-beta]");
    }
};

// ---------------------------------------------------------------------------
// FiniteGraph: simple undirected graph on [n], edges normalized u < v.

class FiniteGraph {
public:
    FiniteGraph() : n_(0) {}

    FiniteGraph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
        if (n < 0) throw usage_error("FiniteGraph: negative vertex count");
        for (auto& [u, v] : edges) {
            if (u == v) throw usage_error("FiniteGraph: self-loop");
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw usage_error("FiniteGraph: edge endpoint out of range");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw usage_error("FiniteGraph: duplicate edge");
        edges_ = std::move(edges);
    }

    int n() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    std::vector<int> degrees() const {
        std::vector<int> deg(n_, 0);
        for (const auto& [u, v] : edges_) {
            ++deg[u];
            ++deg[v];
        }
        return deg;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(n_);
        for (const auto& [u, v] : edges_) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }

    bool operator==(const FiniteGraph& o) const {
        return n_ == o.n_ && edges_ == o.edges_;
    }

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
};

// Graphon representation W_F: each vertex becomes a part of weight 1/n with
// 0/1 densities and zero diagonal.
inline StepGraphon graphon_of_graph(const FiniteGraph& g) {
    const int n = g.n();
    if (n < 1) throw usage_error("graphon_of_graph: empty graph");
    std::vector<double> w(n, 1.0 / n);
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (const auto& [u, v] : g.edges()) d[u][v] = d[v][u] = 1.0;
    return StepGraphon(std::move(w), std::move(d));
}

// ---------------------------------------------------------------------------
// PartitionedGraph: graph plus a vertex partition into indexed parts. A part
// may be empty (the balancer's filler Z0 in particular).

class PartitionedGraph {
public:
    PartitionedGraph() = default;

    PartitionedGraph(FiniteGraph graph, std::vector<std::vector<int>> parts)
        : graph_(std::move(graph)), parts_(std::move(parts)) {
        std::vector<char> seen(graph_.n(), 0);
        std::size_t total = 0;
        for (const auto& part : parts_)
            for (int v : part) {
                if (v < 0 || v >= graph_.n() || seen[v])
                    throw usage_error("PartitionedGraph: parts not a disjoint cover");
                seen[v] = 1;
                ++total;
            }
        if (total != static_cast<std::size_t>(graph_.n()))
            throw usage_error("PartitionedGraph: parts do not cover the vertex set");
    }

    const FiniteGraph& graph() const { return graph_; }
    const std::vector<std::vector<int>>& parts() const { return parts_; }
    int part_count() const { return static_cast<int>(parts_.size()); }

    std::vector<int> part_of() const {
        std::vector<int> p(graph_.n(), -1);
        for (int i = 0; i < part_count(); ++i)
            for (int v : parts_[i]) p[v] = i;
        return p;
    }

private:
    FiniteGraph graph_;
    std::vector<std::vector<int>> parts_;
};

// Edge density between parts i and j: e(Xi,Xj)/(|Xi||Xj|) off-diagonal,
// 2e(Xi)/|Xi|^2 on the diagonal.
inline double stepped_density(const PartitionedGraph& pg, int i, int j) {
    if (i < 0 || i >= pg.part_count() || j < 0 || j >= pg.part_count())
        throw usage_error("stepped_density: part index out of range");
    const auto& pi = pg.parts()[i];
    const auto& pj = pg.parts()[j];
    if (pi.empty() || pj.empty())
        throw degenerate_input_error("stepped_density: empty part");
    auto part = pg.part_of();
    long long count = 0;
    for (const auto& [u, v] : pg.graph().edges()) {
        const int pu = part[u], pv = part[v];
        if ((pu == i && pv == j) || (pu == j && pv == i)) ++count;
    }
    const double si = static_cast<double>(pi.size());
    const double sj = static_cast<double>(pj.size());
    if (i == j) return 2.0 * static_cast<double>(count) / (si * si);
    return static_cast<double>(count) / (si * sj);
}

// ---------------------------------------------------------------------------
// PipelineParams: the (epsilon, beta, lambda, delta, alpha, Gamma, m, n)
// block with Setup-validity checking. Strict mode mirrors the theoretical
// constants; practical mode relaxes to what runtime feasibility checks can
// support at desk scale.

enum class ParamMode { strict, practical };

struct PipelineParams {
    double epsilon = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    long long gamma = 0;  // even positive integer
    long long m = 0;
    long long n = 0;
    ParamMode mode = ParamMode::practical;

    // Returns the violated constraints; empty means valid for the mode.
    // M is the part count of the shared profile (strict-mode m bound).
    std::vector<std::string> violations(int M = 1) const {
        std::vector<std::string> out;
        auto need = [&](bool ok, const std::string& what) {
            if (!ok) out.push_back(what);
        };
        need(gamma > 0 && gamma % 2 == 0, "Gamma must be an even positive integer");
        need(m >= 1 && n >= 1, "m, n must be positive");
        need((1.0 + beta) * static_cast<double>(m) <= static_cast<double>(n) + 1e-9,
             "(1+beta)m <= n");
        need(static_cast<double>(n) <= (1.0 + 2.0 * beta) * static_cast<double>(m) + 1e-9,
             "n <= (1+2beta)m");
        if (mode == ParamMode::practical) {
            need(alpha > 0.0 && alpha < beta && beta < 0.5, "0 < alpha < beta < 1/2");
            need(lambda > 0.0, "lambda > 0");
            return out;
        }
        need(beta <= 1.0 / 1000.0, "beta <= 1/1000");
        need(lambda <= beta * beta * beta / 1000.0, "lambda <= beta^3/1000");
        need(delta <= beta * beta * lambda * lambda, "delta <= beta^2 lambda^2");
        need(beta - alpha >= 20.0 * lambda && beta - alpha <= beta * beta * beta / 5.0,
             "beta - alpha in [20 lambda, beta^3/5]");
        need(static_cast<double>(gamma) >= 1.0 / (delta * delta), "Gamma >= delta^-2");
        need(static_cast<double>(m) >= static_cast<double>(gamma) * M / (delta * delta),
             "m >= Gamma*M/delta^2");
        // m >= 10^4 M^2 2^(10^3/beta^2) / (beta^2 lambda^3 delta^4), in log2
        // to survive the astronomical exponent.
        const double log2_bound = std::log2(1e4) + 2.0 * std::log2(static_cast<double>(M)) +
                                  1e3 / (beta * beta) -
                                  2.0 * std::log2(beta) - 3.0 * std::log2(lambda) -
                                  4.0 * std::log2(delta);
        need(std::log2(static_cast<double>(m)) >= log2_bound,
             "m >= Setup lower bound (log2 required ~" + std::to_string(log2_bound) + ")");
        return out;
    }

    bool valid(int M = 1) const { return violations(M).empty(); }
};

// ---------------------------------------------------------------------------
// FICertificate: parameters ((p_i), (D_{i,j})) of an equitable partition.

struct FICertificate {
    std::vector<long long> part_sizes;
    std::vector<std::vector<long long>> degree_matrix;
    bool canonical = false;

    int classes() const { return static_cast<int>(part_sizes.size()); }

    long long total_vertices() const {
        return std::accumulate(part_sizes.begin(), part_sizes.end(), 0LL);
    }

    // Double-counting identity D_{i,j} p_i = D_{j,i} p_j plus range checks.
    bool consistent() const {
        const int k = classes();
        if (static_cast<int>(degree_matrix.size()) != k) return false;
        for (int i = 0; i < k; ++i) {
            if (static_cast<int>(degree_matrix[i].size()) != k) return false;
            for (int j = 0; j < k; ++j) {
                const long long d = degree_matrix[i][j];
                if (d < 0 || d > part_sizes[j]) return false;
                if (i == j && part_sizes[i] > 0 && d > part_sizes[i] - 1) return false;
                if (degree_matrix[i][j] * part_sizes[i] != degree_matrix[j][i] * part_sizes[j])
                    return false;
            }
        }
        return true;
    }

    bool operator==(const FICertificate& o) const {
        return part_sizes == o.part_sizes && degree_matrix == o.degree_matrix;
    }
};

}  // namespace forge
