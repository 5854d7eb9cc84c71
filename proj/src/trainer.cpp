#include "dlfh/trainer.hpp"

#include <cmath>
#include <numeric>

namespace dlfh {

namespace {

CodeMatrix random_codes(Index n, Index c, Rng &rng) {
    Eigen::MatrixXd m(n, c);
    for (Index k = 0; k < c; ++k)
        for (Index i = 0; i < n; ++i) m(i, k) = rng.sign();
    return CodeMatrix(std::move(m));
}

Index resolve_stride(const TrainConfig &config, Index n) {
    if (config.objective_eval_stride > 0) return config.objective_eval_stride;
    return n <= 5000 ? 1 : 5;
}

// Shared loop body of both variants. `sampler` returns the similarity
// column (row) indices to use for the next U (V) phase.
template <typename Sampler>
TrainState run(const SimilarityProvider &S, const TrainConfig &config,
               Index hess_count, Sampler &&sampler) {
    const Index n = S.size();
    const Hyperparams &h = config.hyper;
    DLFH_REQUIRE(n >= 1, "training requires n >= 1");
    DLFH_REQUIRE(h.code_len >= 1, "training requires code_len >= 1");

    TrainState state;
    state.rng = Rng(h.seed);
    state.U = random_codes(n, h.code_len, state.rng);
    state.V = random_codes(n, h.code_len, state.rng);

    const Index stride = resolve_stride(config, n);
    const bool evaluate = config.trace || config.early_stop;
    double last_objective = 0.0;
    bool have_last = false;
    if (evaluate) {
        last_objective = log_likelihood(state.U, state.V, S, h.lambda);
        have_last = true;
        if (config.trace) state.objective_trace.push_back({0, last_objective});
    }

    const double hess = hess_bound_coeff(hess_count, h.lambda, h.code_len);
    for (Index t = 1; t <= h.max_iter; ++t) {
        const std::vector<Index> cols = sampler(state.rng);
        for (Index k = 0; k < h.code_len; ++k) {
            const Eigen::VectorXd g =
                grad_u_col_sampled(k, state.U, state.V, S, h.lambda, cols);
            state.U.set_col(k, closed_form_update(g, hess, state.U.col(k)));
        }
        const std::vector<Index> rows = sampler(state.rng);
        for (Index k = 0; k < h.code_len; ++k) {
            const Eigen::VectorXd g =
                grad_v_col_sampled(k, state.U, state.V, S, h.lambda, rows);
            state.V.set_col(k, closed_form_update(g, hess, state.V.col(k)));
        }
        state.iteration = t;

        if (evaluate && (t % stride == 0 || t == h.max_iter)) {
            const double obj = log_likelihood(state.U, state.V, S, h.lambda);
            if (config.trace) state.objective_trace.push_back({t, obj});
            if (config.early_stop && have_last &&
                std::abs(obj - last_objective) < 1e-6 * std::abs(obj)) {
                break;
            }
            last_objective = obj;
            have_last = true;
        }
    }
    return state;
}

}  // namespace

std::pair<CodeMatrix, CodeMatrix> init_codes(Index n, Index c,
                                             std::uint64_t seed) {
    DLFH_REQUIRE(n >= 1 && c >= 1,
                 "init_codes: need n >= 1 and c >= 1, got n=" << n << " c="
                                                              << c);
    Rng rng(seed);
    CodeMatrix u = random_codes(n, c, rng);
    CodeMatrix v = random_codes(n, c, rng);
    return {std::move(u), std::move(v)};
}

TrainState train_full(const SimilarityProvider &S, const TrainConfig &config) {
    DLFH_REQUIRE(config.mode == TrainMode::Full,
                 "train_full: config.mode must be Full");
    const Index n = S.size();
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    return run(S, config, n, [&all](Rng &) { return all; });
}

TrainState train_stochastic(const SimilarityProvider &S,
                            const TrainConfig &config) {
    DLFH_REQUIRE(config.mode == TrainMode::Stochastic,
                 "train_stochastic: config.mode must be Stochastic");
    const Index n = S.size();
    const Index m = config.hyper.resolved_sample_size();
    if (m < 1 || m > n)
        throw ConfigError("stochastic sample size " + std::to_string(m) +
                          " must be in [1, " + std::to_string(n) + "]");
    return run(S, config, m,
               [n, m](Rng &rng) { return rng.sample_without_replacement(n, m); });
}

const std::vector<TraceEntry> &objective_trace(const TrainState &state) {
    return state.objective_trace;
}

}  // namespace dlfh
