#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "dlfh/similarity.hpp"
#include "dlfh/trainer.hpp"
#include "oracles.hpp"

using namespace dlfh;

namespace {

// Block-structured similarity from round-robin class assignment.
DenseSimilarity cluster_similarity(Index n, Index classes) {
    Eigen::MatrixXd s(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            s(i, j) = (i % classes) == (j % classes) ? 1.0 : 0.0;
    return DenseSimilarity(s);
}

TrainConfig make_config(TrainMode mode, Index c, Index T, std::uint64_t seed,
                        Index m = 0) {
    TrainConfig config;
    config.mode = mode;
    config.hyper.code_len = c;
    config.hyper.max_iter = T;
    config.hyper.seed = seed;
    config.hyper.sample_size = m;
    return config;
}

}  // namespace

TEST_CASE("init_codes determinism and domain") {
    const auto [u1, v1] = init_codes(50, 4, 123);
    const auto [u2, v2] = init_codes(50, 4, 123);
    CHECK(u1 == u2);
    CHECK(v1 == v2);
    CHECK((u1.values().array().abs() == 1.0).all());
    CHECK((v1.values().array().abs() == 1.0).all());

    const auto [u3, v3] = init_codes(50, 4, 124);
    CHECK(u1.values() != u3.values());
    CHECK(u1.values() != v1.values());
}

TEST_CASE("init_codes columns are roughly balanced") {
    for (const std::uint64_t seed : {1u, 7u, 99u}) {
        const auto [u, v] = init_codes(1000, 16, seed);
        for (Index k = 0; k < 16; ++k) {
            CHECK(std::abs(u.values().col(k).mean()) < 0.2);
            CHECK(std::abs(v.values().col(k).mean()) < 0.2);
        }
    }
}

TEST_CASE("T = 0 returns the initial codes unchanged") {
    const auto S = cluster_similarity(12, 3);
    const auto config = make_config(TrainMode::Full, 4, 0, 42);
    const TrainState state = train_full(S, config);
    const auto [u0, v0] = init_codes(12, 4, 42);
    CHECK(state.U == u0);
    CHECK(state.V == v0);
    CHECK(state.iteration == 0);
    REQUIRE(state.objective_trace.size() == 1);
    CHECK(state.objective_trace[0].iteration == 0);
}

TEST_CASE("full training is monotone and runs exactly T iterations") {
    const Index n = 120, c = 8, T = 15;
    const auto S = cluster_similarity(n, 2);
    const TrainState state = train_full(S, make_config(TrainMode::Full, c, T, 7));

    CHECK(state.iteration == T);
    const auto &trace = objective_trace(state);
    REQUIRE(trace.size() == static_cast<std::size_t>(T) + 1);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i].objective >=
              trace[i - 1].objective - 1e-9 * std::abs(trace[i - 1].objective));
    }
    CHECK(trace.back().objective > trace.front().objective);
}

TEST_CASE("one full iteration matches a hand trace of the algorithm") {
    const Index n = 8, c = 1;
    const double lambda = 8.0;
    Rng rng(31);
    const DenseSimilarity S(oracles::random_binary_matrix(n, n, rng));

    auto config = make_config(TrainMode::Full, c, 1, 5);
    config.hyper.lambda = lambda;
    const TrainState state = train_full(S, config);

    // replay: U phase first with A from (U0, V0), then V phase with the
    // already-updated U
    auto [u, v] = init_codes(n, c, 5);
    const double hess = hess_bound_coeff(n, lambda, c);
    {
        const Eigen::VectorXd g = grad_u_col(0, u, v, S, lambda);
        u.set_col(0, closed_form_update(g, hess, u.col(0)));
    }
    {
        const Eigen::VectorXd g = grad_v_col(0, u, v, S, lambda);
        v.set_col(0, closed_form_update(g, hess, v.col(0)));
    }
    CHECK(state.U == u);
    CHECK(state.V == v);
}

TEST_CASE("stochastic with m = n reproduces the full update exactly") {
    const Index n = 40, c = 4, T = 3;
    const auto S = cluster_similarity(n, 4);
    const TrainState full = train_full(S, make_config(TrainMode::Full, c, T, 9));
    const TrainState stoch =
        train_stochastic(S, make_config(TrainMode::Stochastic, c, T, 9, n));
    CHECK(full.U == stoch.U);
    CHECK(full.V == stoch.V);
}

TEST_CASE("stochastic determinism and sample-size validation") {
    const Index n = 60, c = 8;
    const auto S = cluster_similarity(n, 3);
    const auto config = make_config(TrainMode::Stochastic, c, 10, 77, 8);
    const TrainState a = train_stochastic(S, config);
    const TrainState b = train_stochastic(S, config);
    CHECK(a.U == b.U);
    CHECK(a.V == b.V);

    CHECK_THROWS_AS(
        train_stochastic(S, make_config(TrainMode::Stochastic, c, 10, 77, n + 1)),
        ConfigError);
    CHECK_THROWS_AS(train_full(S, config), ContractViolation);
}

TEST_CASE("stochastic objective trends upward") {
    const Index n = 150, c = 8;
    const auto S = cluster_similarity(n, 2);
    const TrainState state =
        train_stochastic(S, make_config(TrainMode::Stochastic, c, 20, 3, 8));
    const auto &trace = objective_trace(state);
    REQUIRE(trace.size() >= 2);
    CHECK(trace.back().objective > trace.front().objective);
}

TEST_CASE("trace stride arithmetic") {
    const Index n = 24, c = 2;
    const auto S = cluster_similarity(n, 2);

    auto config = make_config(TrainMode::Full, c, 10, 1);
    config.objective_eval_stride = 3;
    const TrainState state = train_full(S, config);
    // iterations 0 (initial), 3, 6, 9 and the final 10
    REQUIRE(state.objective_trace.size() == 5);
    CHECK(state.objective_trace[1].iteration == 3);
    CHECK(state.objective_trace.back().iteration == 10);

    auto config9 = make_config(TrainMode::Full, c, 9, 1);
    config9.objective_eval_stride = 3;
    CHECK(train_full(S, config9).objective_trace.size() == 4);
}

TEST_CASE("trace can be disabled") {
    const auto S = cluster_similarity(10, 2);
    auto config = make_config(TrainMode::Full, 2, 3, 1);
    config.trace = false;
    const TrainState state = train_full(S, config);
    CHECK(objective_trace(state).empty());
    CHECK(state.iteration == 3);
}

TEST_CASE("optional early stop halts a converged run") {
    const auto S = cluster_similarity(30, 2);
    auto config = make_config(TrainMode::Full, 4, 200, 2);
    config.early_stop = true;
    const TrainState state = train_full(S, config);
    CHECK(state.iteration < 200);

    // without the flag the run goes the full distance
    auto plain = make_config(TrainMode::Full, 4, 40, 2);
    CHECK(train_full(S, plain).iteration == 40);
}
