#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forge/cutmetric.hpp"
#include "oracles.hpp"

using namespace forge;

namespace {

SignedStepKernel random_kernel(int parts, Rng& rng) {
    std::vector<double> w(parts);
    double sum = 0.0;
    for (double& x : w) sum += x = 0.1 + rng.unit();
    for (double& x : w) x /= sum;
    std::vector<std::vector<double>> v(parts, std::vector<double>(parts, 0.0));
    for (int i = 0; i < parts; ++i)
        for (int j = i; j < parts; ++j) v[i][j] = v[j][i] = 2.0 * rng.unit() - 1.0;
    return SignedStepKernel(std::move(w), std::move(v));
}

// Dense fractional grid search over indicator vectors s, t in {0, step,
// 2*step, ..., 1}^M. The inner maximization over t is separable and its
// optimum lies on the grid, so it is evaluated exactly.
double grid_search_norm(const SignedStepKernel& k, double step) {
    const int m = k.parts();
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a[i][j] = k.weights[i] * k.weights[j] * k.values[i][j];
    const int levels = static_cast<int>(std::lround(1.0 / step)) + 1;
    long long total = 1;
    for (int i = 0; i < m; ++i) total *= levels;
    double best = 0.0;
    std::vector<double> s(m);
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        for (int i = 0; i < m; ++i) {
            s[i] = step * static_cast<double>(c % levels);
            c /= levels;
        }
        double pos = 0.0, neg = 0.0;
        for (int j = 0; j < m; ++j) {
            double col = 0.0;
            for (int i = 0; i < m; ++i) col += s[i] * a[i][j];
            if (col > 0.0)
                pos += col;  // optimal t_j = 1, a grid point
            else
                neg -= col;
        }
        best = std::max({best, pos, neg});
    }
    return best;
}

}  // namespace

TEST_CASE("exact cut norm on hand-checked kernels") {
    CHECK(cut_norm_exact(SignedStepKernel({1.0}, {{0.3}})) == doctest::Approx(0.3));
    CHECK(cut_norm_exact(SignedStepKernel({1.0}, {{0.0}})) == doctest::Approx(0.0));
    CHECK(cut_norm_exact(SignedStepKernel({0.5, 0.5}, {{0.5, -0.5}, {-0.5, 0.5}})) ==
          doctest::Approx(0.125));
    CHECK(cut_norm_exact(SignedStepKernel({0.5, 0.5}, {{0.0, 0.0}, {0.0, 0.0}})) ==
          doctest::Approx(0.0));
    CHECK(cut_norm_exact(SignedStepKernel({1.0}, {{-0.4}})) == doctest::Approx(0.4));
}

TEST_CASE("oracle limit") {
    std::vector<double> w(25, 1.0 / 25.0);
    std::vector<std::vector<double>> v(25, std::vector<double>(25, 0.1));
    CHECK_THROWS_AS(cut_norm_exact(SignedStepKernel(w, v)), oracle_limit_error);
}

TEST_CASE("exact cut norm agrees with dense fractional grid search") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const auto k = random_kernel(1 + static_cast<int>(rng.below(3)), rng);
        CHECK(cut_norm_exact(k) == doctest::Approx(grid_search_norm(k, 0.05)).epsilon(1e-9));
    }
}

TEST_CASE("exact cut norm invariances") {
    Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(5));
        const auto k = random_kernel(m, rng);
        const double norm = cut_norm_exact(k);

        // Scaling.
        auto scaled = k;
        for (auto& row : scaled.values)
            for (double& x : row) x *= 0.5;
        CHECK(cut_norm_exact(scaled) == doctest::Approx(0.5 * norm));

        // Simultaneous permutation.
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = m - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        std::vector<double> pw(m);
        std::vector<std::vector<double>> pv(m, std::vector<double>(m));
        for (int i = 0; i < m; ++i) pw[i] = k.weights[perm[i]];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) pv[i][j] = k.values[perm[i]][perm[j]];
        CHECK(cut_norm_exact(SignedStepKernel(pw, pv)) == doctest::Approx(norm));

        // L1 upper bound.
        double l1 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                l1 += std::abs(k.values[i][j]) * k.weights[i] * k.weights[j];
        CHECK(norm <= l1 + 1e-12);
    }
}

TEST_CASE("heuristic is a lower bound and usually tight") {
    Rng rng(47);
    CHECK(cut_norm_heuristic(SignedStepKernel({0.5, 0.5}, {{0.0, 0.0}, {0.0, 0.0}}), 8, 1) ==
          doctest::Approx(0.0));
    CHECK(cut_norm_heuristic(SignedStepKernel({1.0}, {{0.3}}), 8, 1) == doctest::Approx(0.3));
    int tight = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto k = random_kernel(2 + static_cast<int>(rng.below(11)), rng);
        const double exact = cut_norm_exact(k);
        const double heur = cut_norm_heuristic(k, 64, 1000 + trial);
        CHECK(heur <= exact + 1e-12);
        if (heur >= 0.9 * exact) ++tight;
    }
    CHECK(tight >= 45);
}

TEST_CASE("cut distance between step graphons") {
    // A graphon and its part relabeling are at distance exactly zero.
    const StepGraphon g({0.3, 0.7}, {{0.2, 0.6}, {0.6, 0.4}});
    const StepGraphon relabeled({0.7, 0.3}, {{0.4, 0.6}, {0.6, 0.2}});
    const auto zero = cut_distance_step(g, relabeled);
    CHECK(zero.value == doctest::Approx(0.0));
    CHECK(zero.flag == CutDistanceFlag::exact_zero);

    const auto constants =
        cut_distance_step(StepGraphon::constant(0.5), StepGraphon::constant(0.4));
    CHECK(constants.value == doctest::Approx(0.1));

    // Fractionally isomorphic but not weakly isomorphic: the diagonal-0.3 and
    // diagonal-0.7 two-block graphons have different triangle densities, so
    // the distance is positive; the reported upper bound is the identity
    // overlay's cut norm.
    const StepGraphon two({0.5, 0.5}, {{0.3, 0.7}, {0.7, 0.3}});
    const StepGraphon flipped({0.5, 0.5}, {{0.7, 0.3}, {0.3, 0.7}});
    const auto positive = cut_distance_step(two, flipped);
    CHECK(positive.value == doctest::Approx(0.1));
    CHECK(positive.flag == CutDistanceFlag::upper_bound);

    const auto mixed = cut_distance_step(two, StepGraphon::constant(0.5));
    CHECK(mixed.value == doctest::Approx(0.05));
    CHECK(mixed.flag == CutDistanceFlag::upper_bound);
}

TEST_CASE("cut distance triangle inequality on matched structures") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(4));
        std::vector<double> w(m);
        double sum = 0.0;
        for (double& x : w) sum += x = 0.1 + rng.unit();
        for (double& x : w) x /= sum;
        auto make = [&] {
            std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) d[i][j] = d[j][i] = rng.unit();
            return StepGraphon(w, d);
        };
        const auto a = make(), b = make(), c = make();
        const double ab = cut_distance_step(a, b).value;
        const double bc = cut_distance_step(b, c).value;
        const double ac = cut_distance_step(a, c).value;
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("zoom bound arithmetic") {
    CHECK(zoom_bound(10, 10) == doctest::Approx(0.0));
    CHECK(zoom_bound(2100, 2000) == doctest::Approx(2.0 * 100.0 / 2100.0));
    CHECK(zoom_bound(10, 5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(zoom_bound(5, 6), usage_error);
    CHECK_THROWS_AS(zoom_bound(5, 0), usage_error);
}

TEST_CASE("distance report on a hand-built equitable graph") {
    // C6 with a single part: targets met exactly, cleaning of constant-0.5
    // costs nothing.
    FICertificate cert;
    cert.part_sizes = {6};
    cert.degree_matrix = {{2}};
    PartitionedGraph pg(oracles::cycle(6), {{0, 1, 2, 3, 4, 5}});
    PipelineParams params;
    params.beta = 0.05;
    params.delta = 1e-4;
    params.gamma = 4;
    params.m = 6;
    const auto rep = certified_distance_report(StepGraphon::constant(0.5), pg, cert, params);
    CHECK(rep.cleaning_l1 == doctest::Approx(0.0));
    CHECK(rep.targets_exact);
    CHECK(rep.stepped_density_max_dev == 0.0);
    CHECK(rep.sampling_bound_vacuous);  // 22/sqrt(log2 6) >> 1

    // Perturbing one edge breaks exactness.
    PartitionedGraph broken(oracles::path(6), {{0, 1, 2, 3, 4, 5}});
    const auto bad = certified_distance_report(StepGraphon::constant(0.5), broken, cert, params);
    CHECK_FALSE(bad.targets_exact);
}
