#pragma once

// Quotients of step graphons: the coarsest weighted equitable coarsening
// (weighted color refinement on parts), fractional-isomorphism testing of
// step graphons via quotient matching, verification of step partitions, and
// beta-robust cleaning.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "forge/kernelcore.hpp"

namespace forge {

struct WeightedEquitableCoarsening {
    std::vector<int> class_of;              // original part index -> class index
    std::vector<double> class_footprint;    // length K, sums to 1
    std::vector<std::vector<double>> class_matrix;  // K x K weight-averaged densities

    int classes() const { return static_cast<int>(class_footprint.size()); }

    DensityProfile profile() const { return DensityProfile{class_footprint, class_matrix}; }
};

// Weighted color refinement: refine the trivial single class by degree
// vectors toward current classes until stable. Terminates within M rounds.
// Two degree values are considered equal when they differ by at most tol.
inline WeightedEquitableCoarsening coarsest_equitable(const StepGraphon& w, double tol = 0.0) {
    if (tol < 0.0) throw usage_error("coarsest_equitable: negative tolerance");
    const int m = w.parts();
    std::vector<int> cls(m, 0);
    int k = 1;
    for (int round = 0; round < m; ++round) {
        // Degree signature of each part toward current classes.
        std::vector<std::vector<double>> sig(m, std::vector<double>(k, 0.0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sig[i][cls[j]] += w.degree(i, j);

        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            if (cls[x] != cls[y]) return cls[x] < cls[y];
            return sig[x] < sig[y];
        });
        std::vector<int> next(m, -1);
        int nk = 0;
        for (int t = 0; t < m; ++t) {
            const int i = order[t];
            if (t > 0) {
                const int p = order[t - 1];
                bool same = cls[i] == cls[p];
                for (int c = 0; same && c < k; ++c)
                    if (std::abs(sig[i][c] - sig[p][c]) > tol) same = false;
                if (!same) ++nk;
            }
            next[i] = nk;
        }
        ++nk;
        if (nk == k && next == cls) break;
        cls = std::move(next);
        k = nk;
    }

    // Renumber classes by smallest member part index for a stable order.
    std::vector<int> first(k, m);
    for (int i = 0; i < m; ++i) first[cls[i]] = std::min(first[cls[i]], i);
    std::vector<int> rank(k);
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](int a, int b) { return first[a] < first[b]; });
    std::vector<int> remap(k);
    for (int r = 0; r < k; ++r) remap[rank[r]] = r;
    for (int& c : cls) c = remap[c];

    WeightedEquitableCoarsening out;
    out.class_of = cls;
    out.class_footprint.assign(k, 0.0);
    for (int i = 0; i < m; ++i) out.class_footprint[cls[i]] += w.weight(i);
    out.class_matrix.assign(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out.class_matrix[cls[i]][cls[j]] += w.weight(i) * w.weight(j) * w.density(i, j);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            out.class_matrix[a][b] /= out.class_footprint[a] * out.class_footprint[b];
    return out;
}

struct StepFiVerdict {
    bool equivalent = false;
    // matching[c] = class of the second graphon matched to class c of the
    // first; present only when equivalent.
    std::optional<std::vector<int>> matching;
};

// Fractional isomorphism of step graphons: their coarsest coarsenings must be
// isomorphic as weighted quotients, i.e. related by a class bijection
// preserving footprints and matrix entries within tol.
inline StepFiVerdict step_fi_equivalent(const StepGraphon& w1, const StepGraphon& w2,
                                        double tol = kDefaultTol) {
    const auto c1 = coarsest_equitable(w1, tol);
    const auto c2 = coarsest_equitable(w2, tol);
    const int k = c1.classes();
    if (k != c2.classes()) return {};

    std::vector<int> sigma(k, -1);
    std::vector<char> used(k, 0);
    auto feasible = [&](int a, int b) {
        if (std::abs(c1.class_footprint[a] - c2.class_footprint[b]) > tol) return false;
        for (int p = 0; p < k; ++p) {
            if (sigma[p] < 0) continue;
            if (std::abs(c1.class_matrix[a][p] - c2.class_matrix[b][sigma[p]]) > tol) return false;
            if (std::abs(c1.class_matrix[p][a] - c2.class_matrix[sigma[p]][b]) > tol) return false;
        }
        return std::abs(c1.class_matrix[a][a] - c2.class_matrix[b][b]) <= tol;
    };
    auto search = [&](auto&& self, int a) -> bool {
        if (a == k) return true;
        for (int b = 0; b < k; ++b) {
            if (used[b] || !feasible(a, b)) continue;
            sigma[a] = b;
            used[b] = 1;
            if (self(self, a + 1)) return true;
            sigma[a] = -1;
            used[b] = 0;
        }
        return false;
    };
    if (!search(search, 0)) return {};
    return {true, sigma};
}

struct CleanResult {
    StepGraphon graphon;
    RobustProfile profile;
    double l1_change = 0.0;  // exact L1 distance ||W - W_beta||_1
};

// Beta-robust cleaning specialized to step graphons: densities below beta
// drop to 0, densities above 1-beta drop to 1-beta, everything else is
// untouched. Per-part degrees toward each part stay exactly d_{i,j} v_j.
inline CleanResult clean_beta_robust(const StepGraphon& w, double beta) {
    if (!(beta > 0.0 && beta < 0.5))
        throw parameter_error("clean_beta_robust: beta outside (0, 1/2)");
    const int m = w.parts();
    auto densities = w.densities();
    double l1 = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double& d = densities[i][j];
            double nd = d;
            if (d < beta)
                nd = 0.0;
            else if (d > 1.0 - beta)
                nd = 1.0 - beta;
            l1 += std::abs(d - nd) * w.weight(i) * w.weight(j);
            d = nd;
        }
    StepGraphon cleaned(w.weights(), densities);
    RobustProfile profile{DensityProfile{w.weights(), cleaned.densities()}, beta};
    profile.validate();
    return CleanResult{std::move(cleaned), std::move(profile), l1};
}

inline CleanResult clean_beta_robust(const StepGraphon& w, const PipelineParams& params) {
    return clean_beta_robust(w, params.beta);
}

// Class-level cleaning used by the pipeline: thresholds are decided by the
// CLASS density (shared across the family), then applied block-wise at full
// part resolution. Keeps class-level degrees exactly at the cleaned class
// matrix times class footprints for every member.
inline StepGraphon clean_with_classes(const StepGraphon& w,
                                      const std::vector<int>& part_to_class,
                                      const std::vector<std::vector<double>>& class_matrix,
                                      double beta) {
    const int m = w.parts();
    auto densities = w.densities();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double dc = class_matrix[part_to_class[i]][part_to_class[j]];
            if (dc < beta)
                densities[i][j] = 0.0;
            else if (dc > 1.0 - beta)
                densities[i][j] = 1.0 - beta;
        }
    return StepGraphon(w.weights(), densities);
}

struct StepPartitionReport {
    bool pass = false;
    double worst_relative_deviation = 0.0;
    // (class, class) pair attaining the worst deviation
    int worst_i = -1, worst_j = -1;
};

// Checks that within each class, per-part degrees toward every class lie in
// (1 +- lambda) * (class density * class footprint).
inline StepPartitionReport verify_step_partition(const StepGraphon& w,
                                                 const WeightedEquitableCoarsening& c,
                                                 double lambda) {
    if (static_cast<int>(c.class_of.size()) != w.parts())
        throw usage_error("verify_step_partition: coarsening does not match graphon");
    const int m = w.parts();
    const int k = c.classes();
    StepPartitionReport rep;
    rep.pass = true;
    for (int i = 0; i < m; ++i) {
        std::vector<double> deg(k, 0.0);
        for (int j = 0; j < m; ++j) deg[c.class_of[j]] += w.degree(i, j);
        const int ci = c.class_of[i];
        for (int cj = 0; cj < k; ++cj) {
            const double target = c.class_matrix[ci][cj] * c.class_footprint[cj];
            double rel;
            if (target == 0.0)
                rel = deg[cj] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            else
                rel = std::abs(deg[cj] - target) / target;
            if (rel > rep.worst_relative_deviation) {
                rep.worst_relative_deviation = rel;
                rep.worst_i = ci;
                rep.worst_j = cj;
            }
            if (rel > lambda + 1e-12) rep.pass = false;
        }
    }
    return rep;
}

}  // namespace forge
