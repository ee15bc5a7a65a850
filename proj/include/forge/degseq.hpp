#pragma once

// Graphic and bigraphic degree sequences: Erdos-Gallai / Gale-Ryser validity
// tests and greedy (Havel-Hakimi style) constructive realizers. Realized
// graphs match the requested degrees position-wise; ties among equal residual
// degrees break toward the lowest original index so results are
// deterministic.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "forge/kernelcore.hpp"

namespace forge {

struct DegreeSequence {
    std::vector<long long> values;

    DegreeSequence() = default;
    DegreeSequence(std::initializer_list<long long> v) : values(v) { check(); }
    explicit DegreeSequence(std::vector<long long> v) : values(std::move(v)) { check(); }

    std::size_t size() const { return values.size(); }
    long long sum() const { return std::accumulate(values.begin(), values.end(), 0LL); }

private:
    void check() const {
        for (long long d : values)
            if (d < 0) throw usage_error("DegreeSequence: negative entry");
    }
};

namespace detail {

// Erdos-Gallai test on a nonincreasing copy. On failure returns the violated
// condition and witness k (0 for EG1).
inline bool erdos_gallai(std::vector<long long> d, std::string* cond, long long* witness) {
    std::sort(d.begin(), d.end(), std::greater<>());
    const long long n = static_cast<long long>(d.size());
    long long total = std::accumulate(d.begin(), d.end(), 0LL);
    if (total % 2 != 0) {
        if (cond) *cond = "EG1";
        if (witness) *witness = 0;
        return false;
    }
    // prefix[k] = d_1 + ... + d_k (1-based)
    std::vector<long long> prefix(n + 1, 0);
    for (long long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + d[i];
    for (long long k = 1; k <= n; ++k) {
        // sum_{i>k} min(d_i, k): entries are nonincreasing, so find the first
        // index past k with d_i < k.
        long long lo = k, hi = n;  // 0-based range [k, n)
        while (lo < hi) {
            long long mid = (lo + hi) / 2;
            if (d[mid] >= k)
                lo = mid + 1;
            else
                hi = mid;
        }
        const long long ge = lo - k;  // count of entries >= k beyond position k
        const long long tail = ge * k + (prefix[n] - prefix[lo]);
        if (prefix[k] > k * (k - 1) + tail) {
            if (cond) *cond = "EG2";
            if (witness) *witness = k;
            return false;
        }
    }
    return true;
}

// Gale-Ryser test; a is sorted nonincreasing internally.
inline bool gale_ryser(std::vector<long long> a, std::vector<long long> b,
                       std::string* cond, long long* witness) {
    const long long sa = std::accumulate(a.begin(), a.end(), 0LL);
    const long long sb = std::accumulate(b.begin(), b.end(), 0LL);
    if (sa != sb) {
        if (cond) *cond = "GR1";
        if (witness) *witness = 0;
        return false;
    }
    const long long na = static_cast<long long>(a.size());
    const long long nb = static_cast<long long>(b.size());
    for (long long x : a)
        if (x > nb) {
            if (cond) *cond = "GR2";
            if (witness) *witness = 1;
            return false;
        }
    for (long long x : b)
        if (x > na) {
            if (cond) *cond = "GR2";
            if (witness) *witness = 1;
            return false;
        }
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(b.begin(), b.end(), std::greater<>());
    std::vector<long long> prefix(na + 1, 0);
    for (long long i = 0; i < na; ++i) prefix[i + 1] = prefix[i] + a[i];
    for (long long k = 1; k <= na; ++k) {
        long long rhs = 0;
        for (long long x : b) rhs += std::min(x, k);
        if (prefix[k] > rhs) {
            if (cond) *cond = "GR2";
            if (witness) *witness = k;
            return false;
        }
    }
    return true;
}

}  // namespace detail

inline bool is_graphic(const DegreeSequence& d) {
    return detail::erdos_gallai(d.values, nullptr, nullptr);
}

inline bool is_bigraphic(const DegreeSequence& a, const DegreeSequence& b) {
    return detail::gale_ryser(a.values, b.values, nullptr, nullptr);
}

// Havel-Hakimi: satisfy the max-degree vertex from the next-highest residual
// degrees. Degrees match the input position-wise.
inline FiniteGraph realize_graphic(const DegreeSequence& d) {
    {
        std::string cond;
        long long k = 0;
        if (!detail::erdos_gallai(d.values, &cond, &k))
            throw feasibility_error("realize_graphic: sequence not graphic (" + cond +
                                        ", k=" + std::to_string(k) + ")",
                                    cond, k);
    }
    const int n = static_cast<int>(d.size());
    std::vector<std::pair<long long, int>> residual(n);  // (degree, original index)
    for (int i = 0; i < n; ++i) residual[i] = {d.values[i], i};
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(d.sum() / 2));
    for (int round = 0; round < n; ++round) {
        // Highest residual degree, lowest index on ties.
        std::stable_sort(residual.begin(), residual.end(),
                         [](const auto& x, const auto& y) { return x.first > y.first; });
        if (residual.front().first == 0) break;
        auto [deg, u] = residual.front();
        residual.front().first = 0;
        if (deg >= static_cast<long long>(residual.size()))
            throw feasibility_error("realize_graphic: internal infeasibility", "EG2", deg);
        for (long long t = 1; t <= deg; ++t) {
            auto& [dv, v] = residual[t];
            if (dv <= 0)
                throw feasibility_error("realize_graphic: internal infeasibility", "EG2", t);
            --dv;
            edges.emplace_back(u, v);
        }
    }
    FiniteGraph g(n, std::move(edges));
    if (g.degrees() != std::vector<int>(d.values.begin(), d.values.end()))
        throw error("realize_graphic: postcondition violated");
    return g;
}

// Bipartite realization. Vertices 0..|a|-1 are side A, |a|..|a|+|b|-1 side B.
struct BipartiteRealization {
    FiniteGraph graph;
    int side_a = 0;  // size of side A; side B occupies the remaining vertices

    std::vector<int> degrees_a() const {
        auto deg = graph.degrees();
        return {deg.begin(), deg.begin() + side_a};
    }
    std::vector<int> degrees_b() const {
        auto deg = graph.degrees();
        return {deg.begin() + side_a, deg.end()};
    }
};

// Greedy Gale-Ryser realization: satisfy the largest remaining a-degree by
// connecting to the currently-largest b-degrees.
inline BipartiteRealization realize_bigraphic(const DegreeSequence& a, const DegreeSequence& b) {
    {
        std::string cond;
        long long k = 0;
        if (!detail::gale_ryser(a.values, b.values, &cond, &k))
            throw feasibility_error("realize_bigraphic: pair not bigraphic (" + cond +
                                        ", k=" + std::to_string(k) + ")",
                                    cond, k);
    }
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    std::vector<int> order_a(na);
    std::iota(order_a.begin(), order_a.end(), 0);
    std::stable_sort(order_a.begin(), order_a.end(),
                     [&](int x, int y) { return a.values[x] > a.values[y]; });
    std::vector<long long> bres = b.values;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(a.sum()));
    std::vector<int> order_b(nb);
    for (int ai : order_a) {
        const long long need = a.values[ai];
        if (need == 0) continue;
        std::iota(order_b.begin(), order_b.end(), 0);
        std::stable_sort(order_b.begin(), order_b.end(),
                         [&](int x, int y) { return bres[x] > bres[y]; });
        if (need > nb || bres[order_b[need - 1]] <= 0)
            throw feasibility_error("realize_bigraphic: internal infeasibility", "GR2", need);
        for (long long t = 0; t < need; ++t) {
            const int bi = order_b[t];
            --bres[bi];
            edges.emplace_back(ai, na + bi);
        }
    }
    BipartiteRealization out{FiniteGraph(na + nb, std::move(edges)), na};
    const auto da = out.degrees_a();
    const auto db = out.degrees_b();
    for (int i = 0; i < na; ++i)
        if (da[i] != a.values[i]) throw error("realize_bigraphic: postcondition violated");
    for (int i = 0; i < nb; ++i)
        if (db[i] != b.values[i]) throw error("realize_bigraphic: postcondition violated");
    return out;
}

}  // namespace forge
