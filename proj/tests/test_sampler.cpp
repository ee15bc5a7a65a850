#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forge/sampler.hpp"

using namespace forge;

TEST_CASE("deterministic degenerate graphons") {
    const auto k4 = sample_once(StepGraphon::constant(1.0), 4, 7);
    CHECK(k4.graph().edge_count() == 6);
    CHECK(k4.part_count() == 1);

    const auto empty = sample_once(StepGraphon::constant(0.0), 5, 7);
    CHECK(empty.graph().edge_count() == 0);

    const StepGraphon blocks({0.5, 0.5}, {{1.0, 0.0}, {0.0, 1.0}});
    const auto cliques = sample_once(blocks, 6, 99);
    const auto part = cliques.part_of();
    for (int u = 0; u < 6; ++u)
        for (int v = u + 1; v < 6; ++v) {
            const bool adjacent = [&] {
                for (const auto& [a, b] : cliques.graph().edges())
                    if (a == u && b == v) return true;
                return false;
            }();
            CHECK(adjacent == (part[u] == part[v]));
        }

    CHECK_THROWS_AS(sample_once(StepGraphon::constant(0.5), 1, 7), usage_error);
}

TEST_CASE("bitwise determinism") {
    const StepGraphon w({0.3, 0.7}, {{0.2, 0.6}, {0.6, 0.4}});
    const auto a = sample_once(w, 64, 123456);
    const auto b = sample_once(w, 64, 123456);
    CHECK(a.graph() == b.graph());
    CHECK(a.parts() == b.parts());
    const auto c = sample_once(w, 64, 123457);
    CHECK(a.graph().edges() != c.graph().edges());
}

TEST_CASE("edge probability calibration") {
    const double d = 0.37;
    const StepGraphon w = StepGraphon::constant(d);
    int edges = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s)
        edges += sample_once(w, 2, 777000 + s).graph().edge_count() > 0 ? 1 : 0;
    const double freq = static_cast<double>(edges) / trials;
    CHECK(std::abs(freq - d) <= 3.0 * std::sqrt(d * (1 - d) / trials));
}

TEST_CASE("part size calibration") {
    const StepGraphon w({0.3, 0.7}, {{0.0, 0.0}, {0.0, 0.0}});
    const long long m = 10;
    double mean = 0.0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s)
        mean += static_cast<double>(sample_once(w, m, 31000 + s).parts()[0].size());
    mean /= trials;
    const double expect = 0.3 * m;
    const double stderr_bound = std::sqrt(m * 0.3 * 0.7 / trials);
    CHECK(std::abs(mean - expect) <= 3.0 * stderr_bound);
}

TEST_CASE("rejection sampling accepts and re-verifies") {
    PipelineParams params;
    params.beta = 0.2;
    params.lambda = 0.05;
    params.delta = 1e-3;
    params.m = 600;
    params.n = 720;
    params.gamma = 48;
    params.alpha = 0.19;

    const RobustProfile profile{DensityProfile{{1.0}, {{0.5}}}, params.beta};
    const auto outcome =
        sample_with_events(StepGraphon::constant(0.5), profile, params, 2024, 100);
    CHECK(outcome.attempts >= 1);
    CHECK(outcome.event_report.size_event_pass);
    CHECK(outcome.event_report.degree_event_pass);
    // Independent re-verification from scratch.
    const auto recheck = check_events(outcome.graph, profile, params);
    CHECK(recheck.size_event_pass);
    CHECK(recheck.degree_event_pass);
    CHECK(recheck.worst_degree_deviation ==
          doctest::Approx(outcome.event_report.worst_degree_deviation));
}

TEST_CASE("complete graphon accepted on the first attempt") {
    // Degrees are exactly m-1; the +-1-widened band around d*v*m = m always
    // contains m-1, so acceptance happens immediately for any lambda.
    PipelineParams params;
    params.lambda = 1e-9;
    params.delta = 1e-3;
    params.m = 50;
    const RobustProfile profile{DensityProfile{{1.0}, {{1.0}}}, 0.2};
    const auto outcome =
        sample_with_events(StepGraphon::constant(1.0), profile, params, 5, 1);
    CHECK(outcome.attempts == 1);
    CHECK(outcome.graph.graph().edge_count() == 50 * 49 / 2);
}

TEST_CASE("budget exhaustion on impossible slack") {
    // With essentially zero slack every degree must be within 1 of d*m,
    // which a Binomial(m-1, 1/2) sample virtually never achieves for all
    // vertices at once.
    PipelineParams params;
    params.lambda = 1e-9;
    params.delta = 1e-3;
    params.m = 100;
    const RobustProfile profile{DensityProfile{{1.0}, {{0.5}}}, 0.2};
    CHECK_THROWS_AS(
        sample_with_events(StepGraphon::constant(0.5), profile, params, 11, 20),
        concentration_error);
}

TEST_CASE("part merging through a class map") {
    // Two graphon parts mapping to one cluster: FS checks run at the cluster
    // level and the merged part is the whole vertex set.
    const StepGraphon w({0.5, 0.5}, {{0.3, 0.7}, {0.7, 0.3}});
    PipelineParams params;
    params.beta = 0.2;
    params.lambda = 0.05;
    params.delta = 1e-3;
    params.m = 500;
    const RobustProfile profile{DensityProfile{{1.0}, {{0.5}}}, params.beta};
    const auto outcome = sample_with_events(w, profile, params, 303, 100, {0, 0});
    CHECK(outcome.graph.part_count() == 1);
    CHECK(outcome.graph.parts()[0].size() == 500);
    CHECK(outcome.event_report.size_event_pass);
    CHECK(outcome.event_report.degree_event_pass);
}
