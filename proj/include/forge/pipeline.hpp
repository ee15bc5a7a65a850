#pragma once

// End-to-end orchestration: derive parameters from (epsilon, n), extract the
// shared quotient profile from the first family member, match every other
// member onto it, then clean -> sample -> balance per member and verify the
// family pairwise. Regular mode specializes to single-class quotients and
// produces exactly D-regular graphs.

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "forge/balancer.hpp"
#include "forge/cutmetric.hpp"
#include "forge/fintest.hpp"
#include "forge/kernelcore.hpp"
#include "forge/quotient.hpp"
#include "forge/sampler.hpp"

namespace forge {

enum class RunMode { general, regular };

struct RunBudgets {
    int sample_attempts = 100;  // rejection-sampling budget per member try
    int member_retries = 5;     // fresh-seed retries per member
};

struct RunConfig {
    std::vector<StepGraphon> family;
    double epsilon = 0.0;
    long long n = 0;
    RunMode mode = RunMode::general;
    std::uint64_t seed = 1;
    bool strict = false;
    std::optional<PipelineParams> params_override;
    RunBudgets budgets;
};

struct MemberResult {
    PartitionedGraph graph;
    FICertificate certificate;
    DistanceReport report;
    int sample_attempts = 0;
    int retries = 0;
    long long deleted_edges = 0;
};

struct RunResult {
    PipelineParams params;
    DensityProfile shared_profile;
    std::vector<MemberResult> members;
    std::vector<std::vector<bool>> pairwise_fi;
    bool certificates_identical = false;
    bool all_fi = false;
    std::vector<std::string> strict_violations;  // nonempty when practical fallback used
};

// Parameter derivation. Strict mode applies the theoretical constants
// verbatim; they demand an m far beyond any feasible computation, so strict
// parameter blocks virtually always fail validation and exist to report the
// violated inequalities. Practical mode picks constants sized so the
// balancer's degree-sequence steps are feasible at desk-scale n: the buffer
// (roughly beta*m*v_i per cluster) must absorb binomial degree spread, so
// beta scales with epsilon instead of epsilon/10, and the sampler slack
// 6*lambda equals beta.
inline PipelineParams derive_params(double epsilon, long long n, ParamMode mode) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw usage_error("derive_params: epsilon must be in (0,1)");
    if (n < 10) throw usage_error("derive_params: n >= 10 required");
    PipelineParams p;
    p.epsilon = epsilon;
    p.n = n;
    p.mode = mode;
    if (mode == ParamMode::strict) {
        p.beta = epsilon / 10.0;
        p.lambda = std::pow(p.beta, 4);
        p.delta = std::pow(p.beta, 10);
        p.alpha = p.beta - 20.0 * p.lambda;
    } else {
        p.beta = std::min(2.0 * epsilon / 3.0, 0.3);
        p.lambda = p.beta / 6.0;
        p.alpha = 0.95 * p.beta;
        p.delta = std::min(p.beta * p.beta * p.lambda * p.lambda, p.beta * p.lambda / 10.0);
    }
    p.m = static_cast<long long>(std::floor(static_cast<double>(n) / (1.0 + p.beta)));
    while (p.m > 1 && (1.0 + p.beta) * static_cast<double>(p.m) >
                          static_cast<double>(n) + 1e-9)
        --p.m;
    p.gamma = 2 * static_cast<long long>(std::floor(std::sqrt(static_cast<double>(p.m))));
    if (p.gamma < 2) p.gamma = 2;
    return p;
}

namespace detail {

// Part-to-class map of `member` in the SHARED class indexing of the first
// family member's coarsening.
inline std::vector<int> shared_class_map(const StepGraphon& first, const StepGraphon& member,
                                         int member_index) {
    const auto verdict = step_fi_equivalent(first, member, kDefaultTol);
    if (!verdict.equivalent)
        throw input_error("family member " + std::to_string(member_index) +
                          " is not fractionally isomorphic to member 0 (quotients differ)");
    const auto cm = coarsest_equitable(member, kDefaultTol);
    const auto& sigma = *verdict.matching;  // shared class -> member class
    std::vector<int> inverse(sigma.size());
    for (std::size_t s = 0; s < sigma.size(); ++s) inverse[sigma[s]] = static_cast<int>(s);
    std::vector<int> map(cm.class_of.size());
    for (std::size_t part = 0; part < map.size(); ++part)
        map[part] = inverse[cm.class_of[part]];
    return map;
}

inline std::uint64_t member_seed(std::uint64_t base, int member, int retry) {
    return base ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(member + 1)) ^
           (0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(retry));
}

inline void finish_family_verdicts(RunResult& result) {
    const int count = static_cast<int>(result.members.size());
    result.pairwise_fi.assign(count, std::vector<bool>(count, false));
    result.certificates_identical = true;
    result.all_fi = true;
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < count; ++j) {
            const bool fi = i == j ||
                            fractionally_isomorphic(result.members[i].graph.graph(),
                                                    result.members[j].graph.graph());
            result.pairwise_fi[i][j] = fi;
            if (!fi) result.all_fi = false;
        }
        if (!(result.members[i].certificate == result.members[0].certificate))
            result.certificates_identical = false;
    }
    if (!result.certificates_identical) result.all_fi = false;
}

}  // namespace detail

inline RunResult run(const RunConfig& config) {
    if (config.family.empty()) throw usage_error("run: empty family");
    if (config.mode == RunMode::regular)
        throw usage_error("run: use run_regular for regular mode");

    RunResult result;
    if (config.params_override) {
        result.params = *config.params_override;
    } else {
        const auto strict = derive_params(config.epsilon, config.n, ParamMode::strict);
        const auto first_coarsening = coarsest_equitable(config.family[0], kDefaultTol);
        result.strict_violations = strict.violations(first_coarsening.classes());
        if (result.strict_violations.empty()) {
            result.params = strict;
        } else if (config.strict) {
            std::string msg = "run: strict parameter block infeasible:";
            for (const auto& v : result.strict_violations) msg += " [" + v + "]";
            throw setup_error(msg);
        } else {
            result.params = derive_params(config.epsilon, config.n, ParamMode::practical);
        }
    }
    const PipelineParams& params = result.params;

    const auto c0 = coarsest_equitable(config.family[0], kDefaultTol);
    const int classes = c0.classes();
    {
        const auto bad = params.violations(classes);
        if (!bad.empty()) {
            std::string msg = "run: invalid parameters:";
            for (const auto& v : bad) msg += " [" + v + "]";
            throw parameter_error(msg);
        }
    }

    // Shared profile: the first member's quotient, cleaned at class level.
    std::vector<std::vector<double>> cleaned_matrix = c0.class_matrix;
    for (auto& row : cleaned_matrix)
        for (double& d : row) {
            if (d < params.beta)
                d = 0.0;
            else if (d > 1.0 - params.beta)
                d = 1.0 - params.beta;
        }
    result.shared_profile = DensityProfile{c0.class_footprint, c0.class_matrix};
    RobustProfile robust{DensityProfile{c0.class_footprint, cleaned_matrix}, params.beta};
    robust.validate();

    for (int k = 0; k < static_cast<int>(config.family.size()); ++k) {
        const auto& member = config.family[k];
        const auto map = k == 0 ? c0.class_of
                                : detail::shared_class_map(config.family[0], member, k);
        const auto cleaned = clean_with_classes(member, map, c0.class_matrix, params.beta);

        std::string last_failure;
        bool done = false;
        for (int retry = 0; retry < config.budgets.member_retries && !done; ++retry) {
            try {
                auto outcome = sample_with_events(cleaned, robust, params,
                                                  detail::member_seed(config.seed, k, retry),
                                                  config.budgets.sample_attempts, map);
                auto balanced = build_balanced(outcome.graph, robust, params, config.n);
                MemberResult mr;
                mr.report = certified_distance_report(member, balanced.graph,
                                                      balanced.certificate, params);
                mr.graph = std::move(balanced.graph);
                mr.certificate = std::move(balanced.certificate);
                mr.sample_attempts = outcome.attempts;
                mr.retries = retry;
                mr.deleted_edges = balanced.deleted_edges;
                result.members.push_back(std::move(mr));
                done = true;
            } catch (const concentration_error& e) {
                last_failure = e.what();
            } catch (const balance_error& e) {
                last_failure = e.what();
            }
        }
        if (!done)
            throw error("run: member " + std::to_string(k) + " failed after " +
                        std::to_string(config.budgets.member_retries) +
                        " retries; last failure: " + last_failure);
    }

    detail::finish_family_verdicts(result);
    return result;
}

// Regular mode: every member's quotient must be a single class with a common
// density d; outputs are exactly D-regular on n vertices with the same even
// D (complete/empty shortcut for d in {0,1}). No filler set and no
// gamma-divisibility: Z1 is the whole vertex set.
inline RunResult run_regular(const RunConfig& config) {
    if (config.family.empty()) throw usage_error("run_regular: empty family");
    const long long n = config.n;
    if (n < 2) throw usage_error("run_regular: n >= 2 required");

    double d = -1.0;
    for (int k = 0; k < static_cast<int>(config.family.size()); ++k) {
        const auto c = coarsest_equitable(config.family[k], kDefaultTol);
        if (c.classes() != 1)
            throw usage_error("run_regular: member " + std::to_string(k) +
                              " has a multi-class quotient; use general mode");
        const double dk = c.class_matrix[0][0];
        if (d < 0.0)
            d = dk;
        else if (std::abs(d - dk) > kDefaultTol)
            throw input_error("run_regular: member " + std::to_string(k) +
                              " has quotient density " + std::to_string(dk) +
                              " != " + std::to_string(d));
    }

    RunResult result;

    auto constant_family = [&](const FiniteGraph& g, long long degree) {
        FICertificate cert;
        cert.part_sizes = {n};
        cert.degree_matrix = {{degree}};
        for (std::size_t k = 0; k < config.family.size(); ++k) {
            MemberResult mr;
            mr.graph = PartitionedGraph(g, {[&] {
                                            std::vector<int> all(n);
                                            std::iota(all.begin(), all.end(), 0);
                                            return all;
                                        }()});
            mr.certificate = cert;
            mr.report.targets_exact = true;
            result.members.push_back(std::move(mr));
        }
        detail::finish_family_verdicts(result);
    };

    if (d <= kDefaultTol) {
        result.params = PipelineParams{};
        result.params.n = n;
        constant_family(FiniteGraph(static_cast<int>(n), {}), 0);
        return result;
    }
    if (d >= 1.0 - kDefaultTol) {
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        result.params = PipelineParams{};
        result.params.n = n;
        constant_family(FiniteGraph(static_cast<int>(n), std::move(edges)), n - 1);
        return result;
    }

    PipelineParams params =
        config.params_override ? *config.params_override
                               : derive_params(config.epsilon, n, ParamMode::practical);
    // Cleaning must not distort the single density, so cap beta below it.
    const double margin = 0.8 * std::min(d, 1.0 - d);
    if (params.beta > margin && !config.params_override) {
        params.beta = margin;
        params.lambda = params.beta / 6.0;
        params.alpha = 0.95 * params.beta;
        params.delta = std::min(params.beta * params.beta * params.lambda * params.lambda,
                                params.beta * params.lambda / 10.0);
        params.m = static_cast<long long>(
            std::floor(static_cast<double>(n) / (1.0 + params.beta)));
    }
    if (params.m >= n)
        throw parameter_error("run_regular: no buffer room (m >= n)");
    result.params = params;

    const long long degree =
        2 * static_cast<long long>(
                std::ceil((1.0 + params.alpha) / (1.0 + params.beta) * d *
                          static_cast<double>(n) / 2.0));
    if (degree > n - 1)
        throw parameter_error("run_regular: target degree exceeds n-1");

    const RobustProfile robust{DensityProfile{{1.0}, {{d}}}, params.beta};
    const long long m = params.m;
    const long long buffer = n - m;

    for (int k = 0; k < static_cast<int>(config.family.size()); ++k) {
        const auto& member = config.family[k];
        const std::vector<int> map(member.parts(), 0);
        std::string last_failure;
        bool done = false;
        for (int retry = 0; retry < config.budgets.member_retries && !done; ++retry) {
            try {
                auto outcome = sample_with_events(member, robust, params,
                                                  detail::member_seed(config.seed, k, retry),
                                                  config.budgets.sample_attempts, map);
                const auto& f = outcome.graph.graph();
                auto fdeg = f.degrees();
                std::vector<long long> a(m);
                for (long long x = 0; x < m; ++x) {
                    a[x] = degree - fdeg[x];
                    if (a[x] < 0)
                        throw balance_error("run_regular: sampled degree exceeds target",
                                            "a-sequence", 0, 0);
                }
                const long long total = std::accumulate(a.begin(), a.end(), 0LL);
                const long long q = total / buffer, r = total % buffer;
                std::vector<long long> b(buffer);
                for (long long s = 0; s < buffer; ++s) b[s] = q + (s < r ? 1 : 0);
                std::vector<std::pair<int, int>> edges = f.edges();
                try {
                    const auto real = realize_bigraphic(DegreeSequence(a), DegreeSequence(b));
                    for (const auto& [u, w] : real.graph.edges())
                        edges.emplace_back(u, static_cast<int>(m) + (w - static_cast<int>(m)));
                } catch (const feasibility_error& e) {
                    throw balance_error(std::string("run_regular: buffer bipartite step: ") +
                                            e.what(),
                                        "a-sequence", 0, 0);
                }
                std::vector<long long> c(buffer);
                for (long long s = 0; s < buffer; ++s) {
                    c[s] = degree - b[s];
                    if (c[s] < 0)
                        throw balance_error("run_regular: buffer degree exceeds target",
                                            "c-sequence", 0, 0);
                }
                try {
                    const auto real = realize_graphic(DegreeSequence(c));
                    for (const auto& [u, w] : real.edges())
                        edges.emplace_back(static_cast<int>(m) + u, static_cast<int>(m) + w);
                } catch (const feasibility_error& e) {
                    throw balance_error(std::string("run_regular: buffer graphic step: ") +
                                            e.what(),
                                        "c-sequence", 0, 0);
                }
                FiniteGraph g(static_cast<int>(n), std::move(edges));
                for (int deg_check : g.degrees())
                    if (deg_check != degree)
                        throw error("run_regular: output not exactly regular");
                std::vector<int> all(n);
                std::iota(all.begin(), all.end(), 0);
                MemberResult mr;
                mr.graph = PartitionedGraph(std::move(g), {all});
                mr.certificate.part_sizes = {n};
                mr.certificate.degree_matrix = {{degree}};
                mr.report = certified_distance_report(member, mr.graph, mr.certificate, params);
                mr.sample_attempts = outcome.attempts;
                mr.retries = retry;
                result.members.push_back(std::move(mr));
                done = true;
            } catch (const concentration_error& e) {
                last_failure = e.what();
            } catch (const balance_error& e) {
                last_failure = e.what();
            }
        }
        if (!done)
            throw error("run_regular: member " + std::to_string(k) + " failed after " +
                        std::to_string(config.budgets.member_retries) +
                        " retries; last failure: " + last_failure);
    }

    detail::finish_family_verdicts(result);
    return result;
}

}  // namespace forge
