#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forge/balancer.hpp"
#include "forge/sampler.hpp"
#include "oracles.hpp"

using namespace forge;

TEST_CASE("gamma rounding") {
    const auto off = gamma_round_matrix({{0.0, 0.5}, {0.5, 0.0}}, 0.02, 0.05, 100);
    CHECK(off.num[0][1] == 49);  // ceil(100*0.5*1.02/1.05) = ceil(48.57)
    CHECK(off.num[0][0] == 0);   // rounding of 0 stays 0 (and even)

    const auto diag = gamma_round_matrix({{0.5}}, 0.02, 0.05, 100);
    CHECK(diag.num[0][0] == 50);  // next even numerator above 48.57

    CHECK_THROWS_AS(gamma_round_matrix({{0.99}}, 0.4, 0.05, 100), parameter_error);
    CHECK_THROWS_AS(gamma_round_matrix({{0.5}}, 0.02, 0.05, 99), parameter_error);
}

TEST_CASE("certificate verification") {
    FICertificate c6cert;
    c6cert.part_sizes = {6};
    c6cert.degree_matrix = {{2}};
    const PartitionedGraph c6(oracles::cycle(6), {{0, 1, 2, 3, 4, 5}});
    CHECK(verify_certificate(c6, c6cert));

    const PartitionedGraph p6(oracles::path(6), {{0, 1, 2, 3, 4, 5}});
    CHECK_FALSE(verify_certificate(p6, c6cert));  // one edge off

    FICertificate wrong = c6cert;
    wrong.degree_matrix = {{3}};
    CHECK_FALSE(verify_certificate(c6, wrong));
}

namespace {

PipelineParams make_params(double beta, double alpha, double lambda, double delta,
                           long long gamma, long long m, long long n) {
    PipelineParams p;
    p.epsilon = 0.3;
    p.beta = beta;
    p.alpha = alpha;
    p.lambda = lambda;
    p.delta = delta;
    p.gamma = gamma;
    p.m = m;
    p.n = n;
    p.mode = ParamMode::practical;
    return p;
}

BalancedGraph build_from_sample(const StepGraphon& w, const RobustProfile& profile,
                                const PipelineParams& params, std::uint64_t seed) {
    const auto outcome = sample_with_events(w, profile, params, seed, 100);
    return build_balanced(outcome.graph, profile, params, params.n);
}

}  // namespace

TEST_CASE("single-cluster balancing yields an exactly regular graph") {
    const auto params = make_params(0.3, 0.25, 0.05, 1e-3, 40, 400, 520);
    const RobustProfile profile{DensityProfile{{1.0}, {{0.5}}}, params.beta};
    const auto result = build_from_sample(StepGraphon::constant(0.5), profile, params, 91);

    CHECK(result.graph.graph().n() == 520);
    CHECK(result.certificate.part_sizes == std::vector<long long>{0, 520});
    const long long target = result.certificate.degree_matrix[1][1];
    CHECK(target % 2 == 0);
    for (int deg : result.graph.graph().degrees()) CHECK(deg == target);
    CHECK(verify_certificate(result.graph, result.certificate));
    CHECK(result.deleted_edges == 0);
    CHECK(result.targets.consistent());
    // Stepped density equals the rounded target density exactly.
    CHECK(stepped_density(result.graph, 1, 1) ==
          doctest::Approx(result.targets.dstar.entry(0, 0)));
}

TEST_CASE("two-cluster balancing hits every degree target exactly") {
    const auto params = make_params(0.3, 0.25, 0.05, 1e-3, 40, 800, 1100);
    const StepGraphon w({0.5, 0.5}, {{0.6, 0.4}, {0.4, 0.6}});
    const RobustProfile profile{DensityProfile{w.weights(), w.densities()}, params.beta};
    const auto result = build_from_sample(w, profile, params, 1203);

    CHECK(result.graph.graph().n() == 1100);
    CHECK(result.certificate.part_sizes[1] == 520);
    CHECK(result.certificate.part_sizes[2] == 520);
    CHECK(result.certificate.part_sizes[0] == 60);
    CHECK(verify_certificate(result.graph, result.certificate));

    // The counting identity holds in exact integers.
    const auto& d = result.certificate.degree_matrix;
    const auto& p = result.certificate.part_sizes;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(d[i][j] * p[i] == d[j][i] * p[j]);

    // Filler vertices are isolated.
    const auto degs = result.graph.graph().degrees();
    for (int v : result.graph.parts()[0]) CHECK(degs[v] == 0);

    // Two builds from the same profile share the certificate, and the
    // outputs are fractionally isomorphic by construction.
    const auto again = build_from_sample(w, profile, params, 5407);
    CHECK(again.certificate == result.certificate);
}

TEST_CASE("sub-threshold clusters end up isolated") {
    auto params = make_params(0.3, 0.25, 0.05, 0.09, 20, 800, 1200);
    const StepGraphon w({0.4875, 0.4875, 0.025},
                        {{0.6, 0.4, 0.3}, {0.4, 0.6, 0.3}, {0.3, 0.3, 0.5}});
    const RobustProfile profile{DensityProfile{w.weights(), w.densities()}, params.beta};
    // Footprint 0.025 < delta/M = 0.03: cluster 3 must come out isolated.
    bool built = false;
    for (std::uint64_t seed = 1; seed <= 60 && !built; ++seed) {
        try {
            const auto result = build_from_sample(w, profile, params, seed * 1000);
            built = true;
            CHECK(verify_certificate(result.graph, result.certificate));
            CHECK(result.deleted_edges > 0);  // cluster 3's sampled edges
            const auto degs = result.graph.graph().degrees();
            for (int v : result.graph.parts()[3]) CHECK(degs[v] == 0);
            for (int j = 0; j < 4; ++j) {
                CHECK(result.certificate.degree_matrix[3][j] == 0);
                CHECK(result.certificate.degree_matrix[j][3] == 0);
            }
            // Deletion budget from the construction: at most 2*delta*n^2.
            CHECK(result.deleted_edges <=
                  static_cast<long long>(2.0 * params.delta * 1200.0 * 1200.0));
        } catch (const layout_error&) {
            // Small cluster overflowed its rounded size on this seed; the
            // abort is the documented behavior. Try another seed.
        }
    }
    CHECK(built);
}

TEST_CASE("buffer layout errors surface") {
    // n smaller than the padded sizes: impossible layout.
    const auto params = make_params(0.3, 0.25, 0.05, 1e-3, 40, 400, 410);
    const RobustProfile profile{DensityProfile{{1.0}, {{0.5}}}, params.beta};
    const auto outcome =
        sample_with_events(StepGraphon::constant(0.5), profile, params, 91, 100);
    CHECK_THROWS_AS(build_balanced(outcome.graph, profile, params, 410), layout_error);
}

TEST_CASE("added edges never collide with sampled edges") {
    // FiniteGraph construction rejects duplicates, so a successful build is
    // itself the proof; additionally check the construction's edge discipline.
    const auto params = make_params(0.3, 0.25, 0.05, 1e-3, 40, 400, 520);
    const RobustProfile profile{DensityProfile{{1.0}, {{0.5}}}, params.beta};
    const auto outcome =
        sample_with_events(StepGraphon::constant(0.5), profile, params, 333, 100);
    const auto result = build_balanced(outcome.graph, profile, params, params.n);
    // Every sampled edge is still present (no deletions for on-threshold
    // clusters) and every new edge touches at least one buffer vertex.
    const auto& final_edges = result.graph.graph().edges();
    const auto& sampled = outcome.graph.graph().edges();
    for (const auto& e : sampled)
        CHECK(std::binary_search(final_edges.begin(), final_edges.end(), e));
    const int m = static_cast<int>(params.m);
    for (const auto& e : final_edges)
        if (!std::binary_search(sampled.begin(), sampled.end(), e))
            CHECK(std::max(e.first, e.second) >= m);
}
