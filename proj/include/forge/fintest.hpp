#pragma once

// Fractional isomorphism of finite graphs: coarsest equitable partition via
// color refinement, certificate extraction and comparison, and an independent
// oracle based on tree homomorphism counts.

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "forge/kernelcore.hpp"

namespace forge {

struct GraphCoarsening {
    std::vector<std::vector<int>> partition;  // classes of vertices
    FICertificate certificate;
};

// Color refinement to the coarsest equitable partition, then classes ordered
// by (size, sorted multiset of (degree, target size) pairs); residual ties
// keep the smallest-vertex-first order. The certificate comparison below does
// a full bijection search, so tie order does not affect correctness.
inline GraphCoarsening coarsest_equitable_graph(const FiniteGraph& g) {
    const int n = g.n();
    const auto adj = g.adjacency();
    std::vector<int> color(n, 0);
    int k = n > 0 ? 1 : 0;
    for (int round = 0; round < n; ++round) {
        std::vector<std::pair<std::vector<int>, int>> sig(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int> s;
            s.reserve(adj[v].size() + 1);
            s.push_back(color[v]);
            std::vector<int> nb;
            nb.reserve(adj[v].size());
            for (int u : adj[v]) nb.push_back(color[u]);
            std::sort(nb.begin(), nb.end());
            s.insert(s.end(), nb.begin(), nb.end());
            sig[v] = {std::move(s), v};
        }
        std::sort(sig.begin(), sig.end());
        std::vector<int> next(n, 0);
        int nk = 0;
        for (int t = 0; t < n; ++t) {
            if (t > 0 && sig[t].first != sig[t - 1].first) ++nk;
            next[sig[t].second] = nk;
        }
        ++nk;
        if (nk == k) break;
        color = std::move(next);
        k = nk;
    }

    std::vector<std::vector<int>> classes(k);
    for (int v = 0; v < n; ++v) classes[color[v]].push_back(v);

    // Degree matrix: equitable, so any representative works; verify anyway.
    std::vector<std::vector<long long>> dm(k, std::vector<long long>(k, 0));
    for (int c = 0; c < k; ++c) {
        bool first = true;
        std::vector<long long> row(k, 0);
        for (int v : classes[c]) {
            std::vector<long long> cnt(k, 0);
            for (int u : adj[v]) ++cnt[color[u]];
            if (first) {
                row = std::move(cnt);
                first = false;
            } else if (row != cnt) {
                throw error("coarsest_equitable_graph: refinement not equitable");
            }
        }
        dm[c] = std::move(row);
    }

    // Canonical class order: by size, then by sorted multiset of
    // (degree, target size) pairs.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int c) {
        std::vector<std::pair<long long, long long>> ms;
        ms.reserve(k);
        for (int j = 0; j < k; ++j) ms.emplace_back(dm[c][j], (long long)classes[j].size());
        std::sort(ms.begin(), ms.end());
        return std::make_pair((long long)classes[c].size(), ms);
    };
    std::vector<decltype(key(0))> keys(k);
    for (int c = 0; c < k; ++c) keys[c] = key(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return keys[a] < keys[b]; });

    GraphCoarsening out;
    out.partition.resize(k);
    out.certificate.part_sizes.resize(k);
    out.certificate.degree_matrix.assign(k, std::vector<long long>(k, 0));
    std::vector<int> pos(k);
    for (int r = 0; r < k; ++r) pos[order[r]] = r;
    for (int r = 0; r < k; ++r) {
        out.partition[r] = classes[order[r]];
        out.certificate.part_sizes[r] = static_cast<long long>(classes[order[r]].size());
        for (int j = 0; j < k; ++j)
            out.certificate.degree_matrix[r][pos[j]] = dm[order[r]][j];
    }
    out.certificate.canonical = true;
    return out;
}

namespace detail {

// Class bijection search between two certificates: footprints and all matrix
// entries must agree exactly under the bijection.
inline bool certificates_match(const FICertificate& a, const FICertificate& b) {
    const int k = a.classes();
    if (k != b.classes() || a.part_sizes != b.part_sizes) {
        // part_sizes are sorted ascending by canonicalization; a mismatch
        // after sorting means no bijection can exist.
        std::vector<long long> sa = a.part_sizes, sb = b.part_sizes;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
    }
    std::vector<int> sigma(k, -1);
    std::vector<char> used(k, 0);
    auto feasible = [&](int i, int j) {
        if (a.part_sizes[i] != b.part_sizes[j]) return false;
        if (a.degree_matrix[i][i] != b.degree_matrix[j][j]) return false;
        for (int p = 0; p < k; ++p) {
            if (sigma[p] < 0) continue;
            if (a.degree_matrix[i][p] != b.degree_matrix[j][sigma[p]]) return false;
            if (a.degree_matrix[p][i] != b.degree_matrix[sigma[p]][j]) return false;
        }
        return true;
    };
    auto search = [&](auto&& self, int i) -> bool {
        if (i == k) return true;
        for (int j = 0; j < k; ++j) {
            if (used[j] || !feasible(i, j)) continue;
            sigma[i] = j;
            used[j] = 1;
            if (self(self, i + 1)) return true;
            sigma[i] = -1;
            used[j] = 0;
        }
        return false;
    };
    return search(search, 0);
}

}  // namespace detail

inline bool fractionally_isomorphic(const FiniteGraph& g, const FiniteGraph& h) {
    if (g.n() != h.n()) return false;
    if (g.n() == 0) return true;
    const auto cg = coarsest_equitable_graph(g);
    const auto ch = coarsest_equitable_graph(h);
    return detail::certificates_match(cg.certificate, ch.certificate);
}

// Exact number of homomorphisms from a tree T into G, by dynamic programming
// over a rooted orientation: f[u][v] = prod over children c of
// sum_{w in N(v)} f[c][w]; the answer is sum_v f[root][v].
inline long long tree_hom_count(const FiniteGraph& t, const FiniteGraph& g) {
    const int tn = t.n();
    if (tn == 0) throw usage_error("tree_hom_count: empty pattern");
    if (static_cast<int>(t.edge_count()) != tn - 1)
        throw usage_error("tree_hom_count: pattern is not a tree");
    const auto tadj = t.adjacency();
    // Connectivity check (acyclic + n-1 edges + connected = tree).
    {
        std::vector<char> seen(tn, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int cnt = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : tadj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    ++cnt;
                    q.push(u);
                }
        }
        if (cnt != tn) throw usage_error("tree_hom_count: pattern is not connected");
    }
    const int gn = g.n();
    if (gn == 0) return 0;
    const auto gadj = g.adjacency();

    // Post-order from root 0.
    std::vector<int> parent(tn, -1), order;
    order.reserve(tn);
    {
        std::vector<int> stack{0};
        std::vector<char> seen(tn, 0);
        seen[0] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int u : tadj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    parent[u] = v;
                    stack.push_back(u);
                }
        }
    }
    std::vector<std::vector<long long>> f(tn, std::vector<long long>(gn, 1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        for (int c : tadj[u]) {
            if (c == parent[u]) continue;
            for (int v = 0; v < gn; ++v) {
                long long s = 0;
                for (int w : gadj[v]) s += f[c][w];
                f[u][v] *= s;
            }
        }
    }
    return std::accumulate(f[0].begin(), f[0].end(), 0LL);
}

namespace detail {

// AHU canonical string of a tree rooted at r.
inline std::string ahu(const std::vector<std::vector<int>>& adj, int r, int parent) {
    std::vector<std::string> kids;
    for (int u : adj[r])
        if (u != parent) kids.push_back(ahu(adj, u, r));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (const auto& k : kids) s += k;
    s += ")";
    return s;
}

// Canonical form of an unrooted tree: AHU string at the centroid, min over
// the at most two centroids.
inline std::string tree_canonical(const FiniteGraph& t) {
    const int n = t.n();
    const auto adj = t.adjacency();
    if (n == 1) return "()";
    // Peel leaves to find the one or two centers.
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(adj[v].size());
    std::vector<int> layer;
    std::vector<char> removed(n, 0);
    for (int v = 0; v < n; ++v)
        if (deg[v] <= 1) layer.push_back(v);
    int remaining = n;
    while (remaining > 2) {
        std::vector<int> next;
        for (int v : layer) {
            removed[v] = 1;
            --remaining;
            for (int u : adj[v])
                if (!removed[u] && --deg[u] == 1) next.push_back(u);
        }
        layer = std::move(next);
    }
    std::string best;
    for (int v : layer) {
        std::string s = ahu(adj, v, -1);
        if (best.empty() || s < best) best = s;
    }
    return best;
}

}  // namespace detail

// All pairwise non-isomorphic trees with 1..max_size vertices, generated by
// leaf extension with canonical-form deduplication.
inline std::vector<FiniteGraph> enumerate_trees(int max_size) {
    if (max_size < 1) throw usage_error("enumerate_trees: max_size >= 1 required");
    std::vector<FiniteGraph> all;
    std::vector<FiniteGraph> current{FiniteGraph(1, {})};
    all.push_back(current.front());
    for (int size = 2; size <= max_size; ++size) {
        std::set<std::string> seen;
        std::vector<FiniteGraph> next;
        for (const auto& t : current)
            for (int v = 0; v < t.n(); ++v) {
                auto edges = t.edges();
                edges.emplace_back(v, t.n());
                FiniteGraph grown(t.n() + 1, std::move(edges));
                auto canon = detail::tree_canonical(grown);
                if (seen.insert(std::move(canon)).second) next.push_back(std::move(grown));
            }
        for (const auto& t : next) all.push_back(t);
        current = std::move(next);
    }
    return all;
}

// Independent fractional-isomorphism oracle: equal homomorphism counts for
// every tree up to max_tree_size. Complete when max_tree_size >= |V|.
inline bool fi_oracle_trees(const FiniteGraph& g, const FiniteGraph& h, int max_tree_size) {
    if (g.n() != h.n()) return false;
    for (const auto& t : enumerate_trees(max_tree_size))
        if (tree_hom_count(t, g) != tree_hom_count(t, h)) return false;
    return true;
}

}  // namespace forge
