#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "dlfh/model.hpp"
#include "dlfh/similarity.hpp"
#include "oracles.hpp"

using namespace dlfh;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (const double x : v) out[i++] = x;
    return out;
}

struct SmallInstance {
    CodeMatrix U, V;
    DenseSimilarity S;
    double lambda;
};

SmallInstance random_instance(Index n, Index c, double lambda, Rng &rng) {
    return {CodeMatrix(oracles::random_sign_matrix(n, c, rng)),
            CodeMatrix(oracles::random_sign_matrix(n, c, rng)),
            DenseSimilarity(oracles::random_binary_matrix(n, n, rng)), lambda};
}

// L as a function of U column k only, everything else fixed.
double column_objective(const SmallInstance &inst, Index k,
                        const Eigen::VectorXd &col) {
    Eigen::MatrixXd u = inst.U.values();
    u.col(k) = col;
    return log_likelihood(CodeMatrix(u), inst.V, inst.S, inst.lambda);
}

}  // namespace

TEST_CASE("theta basic values") {
    CHECK(theta(vec({1, 1}), vec({1, -1}), 8.0) == 0.0);
    CHECK(theta(vec({1, 1}), vec({1, 1}), 8.0) == 8.0);
    CHECK(theta(vec({1, -1, 1}), vec({-1, -1, 1}), 6.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(theta(vec({1, 1}), vec({1, 1, 1}), 8.0), ContractViolation);
}

TEST_CASE("theta stays within [-lambda, lambda]") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Index c = 1 + static_cast<Index>(rng.uniform_index(6));
        const double lambda = 0.5 + 10.0 * rng.uniform();
        const Eigen::VectorXd u = oracles::random_sign_matrix(c, 1, rng);
        const Eigen::VectorXd v = oracles::random_sign_matrix(c, 1, rng);
        const double t = theta(u, v, lambda);
        CHECK(t >= -lambda - 1e-12);
        CHECK(t <= lambda + 1e-12);
    }
}

TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == 0.5);
    for (const double x : {0.3, 1.7, 8.0, 40.0})
        CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-14));
    for (const double x : {-8.0, 0.0, 0.3, 1.7, 8.0})
        CHECK(sigmoid(x) > sigmoid(x - 0.1));
    // frozen from an arbitrary-precision evaluation of 1/(1+e^-8)
    CHECK(sigmoid(8.0) == doctest::Approx(0.999664649869533522).epsilon(1e-12));
}

TEST_CASE("softplus overflow-safe") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus(800.0) == doctest::Approx(800.0));
    CHECK(std::isfinite(softplus(-800.0)));
    CHECK(softplus(-40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-10));
}

TEST_CASE("log_likelihood at theta = 0 is -n^2 log 2") {
    // every u row orthogonal to every v row
    const Index n = 3;
    Eigen::MatrixXd u(n, 2), v(n, 2);
    for (Index i = 0; i < n; ++i) {
        u.row(i) << 1, 1;
        v.row(i) << 1, -1;
    }
    Rng rng(5);
    const DenseSimilarity S(oracles::random_binary_matrix(n, n, rng));
    const double L = log_likelihood(CodeMatrix(u), CodeMatrix(v), S, 8.0);
    CHECK(L == doctest::Approx(-static_cast<double>(n * n) * std::log(2.0))
                   .epsilon(1e-12));
}

TEST_CASE("log_likelihood scalar case") {
    Eigen::MatrixXd u(1, 1), v(1, 1), s(1, 1);
    u << 1;
    v << 1;
    s << 1;
    const double L =
        log_likelihood(CodeMatrix(u), CodeMatrix(v), DenseSimilarity(s), 8.0);
    // frozen from an arbitrary-precision evaluation of 8 - log(1 + e^8)
    CHECK(L == doctest::Approx(-3.35406372895768832e-4).epsilon(1e-12));
}

TEST_CASE("log_likelihood equals the brute-force oracle") {
    Rng rng(40);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.uniform_index(8));
        const Index c = 1 + static_cast<Index>(rng.uniform_index(4));
        const double lambda = 0.5 + 10.0 * rng.uniform();
        const auto inst = random_instance(n, c, lambda, rng);
        const double got = log_likelihood(inst.U, inst.V, inst.S, lambda);
        const double want = oracles::naive_log_likelihood(
            inst.U.values(), inst.V.values(), inst.S.matrix().cast<double>(),
            lambda);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got < 0.0);
    }
}

TEST_CASE("log_likelihood invariant under (U,V,S) -> (V,U,S^T)") {
    Rng rng(41);
    const auto inst = random_instance(7, 3, 6.0, rng);
    const Eigen::MatrixXd st = inst.S.matrix().cast<double>().transpose();
    const double a = log_likelihood(inst.U, inst.V, inst.S, 6.0);
    const double b = log_likelihood(inst.V, inst.U, DenseSimilarity(st), 6.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("log_likelihood rejects shape mismatches") {
    Rng rng(42);
    const auto inst = random_instance(4, 2, 8.0, rng);
    const CodeMatrix bad(oracles::random_sign_matrix(5, 2, rng));
    CHECK_THROWS_AS(log_likelihood(bad, inst.V, inst.S, 8.0), ContractViolation);
    const CodeMatrix badc(oracles::random_sign_matrix(4, 3, rng));
    CHECK_THROWS_AS(log_likelihood(badc, inst.V, inst.S, 8.0),
                    ContractViolation);
}

TEST_CASE("gradients match the scalar oracle and the sampled path") {
    Rng rng(50);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.uniform_index(7));
        const Index c = 1 + static_cast<Index>(rng.uniform_index(3));
        const double lambda = 1.0 + 8.0 * rng.uniform();
        const auto inst = random_instance(n, c, lambda, rng);
        const Index k = static_cast<Index>(rng.uniform_index(c));

        const Eigen::VectorXd gu = grad_u_col(k, inst.U, inst.V, inst.S, lambda);
        const Eigen::VectorXd want = oracles::naive_grad_u_col(
            k, inst.U.values(), inst.V.values(), inst.S.matrix().cast<double>(),
            lambda);
        CHECK((gu - want).lpNorm<Eigen::Infinity>() <=
              1e-10 * (1.0 + want.lpNorm<Eigen::Infinity>()));

        // the V gradient is the mirror image under (U,S) <-> (V,S^T)
        const DenseSimilarity st(
            Eigen::MatrixXd(inst.S.matrix().cast<double>().transpose()));
        const Eigen::VectorXd gv = grad_v_col(k, inst.V, inst.U, st, lambda);
        CHECK((gu - gv).lpNorm<Eigen::Infinity>() <= 1e-12);

        // the full-range sampled path is the same arithmetic, bit for bit
        std::vector<Index> all(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
        const Eigen::VectorXd gs =
            grad_u_col_sampled(k, inst.U, inst.V, inst.S, lambda, all);
        CHECK(gu == gs);
    }
}

TEST_CASE("gradient index out of range") {
    Rng rng(51);
    const auto inst = random_instance(4, 2, 8.0, rng);
    CHECK_THROWS_AS(grad_u_col(2, inst.U, inst.V, inst.S, 8.0),
                    ContractViolation);
    CHECK_THROWS_AS(grad_v_col(-1, inst.U, inst.V, inst.S, 8.0),
                    ContractViolation);
}

TEST_CASE("gradient vanishes when A matches S at saturation") {
    // c = 1, S = indicator(u_i v_j > 0), large lambda drives A -> S
    const Index n = 6;
    Rng rng(52);
    const Eigen::MatrixXd u = oracles::random_sign_matrix(n, 1, rng);
    const Eigen::MatrixXd v = oracles::random_sign_matrix(n, 1, rng);
    Eigen::MatrixXd s(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) s(i, j) = u(i, 0) * v(j, 0) > 0 ? 1 : 0;
    const double lambda = 100.0;
    const Eigen::VectorXd g = grad_u_col(0, CodeMatrix(u), CodeMatrix(v),
                                         DenseSimilarity(s), lambda);
    CHECK(g.lpNorm<Eigen::Infinity>() <= 1e-30);
}

TEST_CASE("gradients agree with central finite differences") {
    Rng rng(60);
    const double step = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.uniform_index(19));
        const Index c = 1 + static_cast<Index>(rng.uniform_index(3));
        const double lambda = 1.0 + 7.0 * rng.uniform();
        // random real-valued point of the relaxed objective
        Eigen::MatrixXd U(n, c), V(n, c);
        for (Index k = 0; k < c; ++k)
            for (Index i = 0; i < n; ++i) {
                U(i, k) = 2.0 * rng.uniform() - 1.0;
                V(i, k) = 2.0 * rng.uniform() - 1.0;
            }
        const DenseSimilarity S(oracles::random_binary_matrix(n, n, rng));
        const Index k = static_cast<Index>(rng.uniform_index(c));

        const Eigen::VectorXd gu = grad_u_col(k, U, V, S, lambda);
        Eigen::MatrixXd work = U;
        const Eigen::VectorXd fd_u = oracles::finite_difference_gradient(
            U.col(k),
            [&](const Eigen::VectorXd &col) {
                work.col(k) = col;
                return log_likelihood(work, V, S, lambda);
            },
            step);
        CHECK((gu - fd_u).lpNorm<Eigen::Infinity>() <=
              1e-5 * std::max(1e-12, gu.lpNorm<Eigen::Infinity>()));

        const Eigen::VectorXd gv = grad_v_col(k, U, V, S, lambda);
        Eigen::MatrixXd workv = V;
        const Eigen::VectorXd fd_v = oracles::finite_difference_gradient(
            V.col(k),
            [&](const Eigen::VectorXd &col) {
                workv.col(k) = col;
                return log_likelihood(U, workv, S, lambda);
            },
            step);
        CHECK((gv - fd_v).lpNorm<Eigen::Infinity>() <=
              1e-5 * std::max(1e-12, gv.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("gradient is odd in the bit-k weights at fixed A") {
    // negating column k of both U and V leaves every Theta_ij (hence A)
    // unchanged and flips the weight factor, so both gradients negate
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.uniform_index(6));
        const Index c = 2 + static_cast<Index>(rng.uniform_index(3));
        const auto inst = random_instance(n, c, 8.0, rng);
        const Index k = static_cast<Index>(rng.uniform_index(c));
        Eigen::MatrixXd u2 = inst.U.values();
        Eigen::MatrixXd v2 = inst.V.values();
        u2.col(k) *= -1.0;
        v2.col(k) *= -1.0;
        const CodeMatrix U2(u2), V2(v2);

        CHECK(log_likelihood(U2, V2, inst.S, 8.0) ==
              doctest::Approx(log_likelihood(inst.U, inst.V, inst.S, 8.0))
                  .epsilon(1e-12));
        const Eigen::VectorXd g = grad_u_col(k, inst.U, inst.V, inst.S, 8.0);
        const Eigen::VectorXd gneg = grad_u_col(k, U2, V2, inst.S, 8.0);
        CHECK((g + gneg).lpNorm<Eigen::Infinity>() <= 1e-12);
        const Eigen::VectorXd h = grad_v_col(k, inst.U, inst.V, inst.S, 8.0);
        const Eigen::VectorXd hneg = grad_v_col(k, U2, V2, inst.S, 8.0);
        CHECK((h + hneg).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("hess_bound_coeff") {
    CHECK(hess_bound_coeff(100, 8.0, 16) == doctest::Approx(-6.25));
    CHECK(hess_bound_coeff(200, 8.0, 16) ==
          doctest::Approx(2.0 * hess_bound_coeff(100, 8.0, 16)));
    CHECK(hess_bound_coeff(100, 8.0, 1 << 20) < 0.0);
    CHECK(hess_bound_coeff(100, 8.0, 1 << 20) > -1e-4);
    CHECK_THROWS_AS(hess_bound_coeff(0, 8.0, 16), ContractViolation);
}

TEST_CASE("surrogate is tight at the anchor and degenerates to Taylor") {
    Rng rng(70);
    const Index n = 8;
    const Eigen::VectorXd anchor = oracles::random_sign_matrix(n, 1, rng);
    Eigen::VectorXd grad(n);
    for (Index i = 0; i < n; ++i) grad[i] = 2.0 * rng.uniform() - 1.0;
    const double obj = -123.456;
    CHECK(surrogate_value(anchor, anchor, grad, -2.0, obj) == obj);

    const Eigen::VectorXd cand = oracles::random_sign_matrix(n, 1, rng);
    const double taylor = obj + (cand - anchor).dot(grad);
    CHECK(surrogate_value(cand, anchor, grad, 0.0, obj) ==
          doctest::Approx(taylor).epsilon(1e-14));
}

TEST_CASE("surrogate lower-bounds the column-restricted objective") {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.uniform_index(10));
        const Index c = 1 + static_cast<Index>(rng.uniform_index(3));
        const double lambda = 0.5 + 8.0 * rng.uniform();
        const auto inst = random_instance(n, c, lambda, rng);
        const Index k = static_cast<Index>(rng.uniform_index(c));

        const Eigen::VectorXd anchor = inst.U.col(k);
        const double anchor_obj = column_objective(inst, k, anchor);
        const Eigen::VectorXd grad =
            grad_u_col(k, inst.U, inst.V, inst.S, lambda);
        const double hess = hess_bound_coeff(n, lambda, inst.U.bits());

        for (int probe = 0; probe < 5; ++probe) {
            const Eigen::VectorXd cand = oracles::random_sign_matrix(n, 1, rng);
            const double bound =
                surrogate_value(cand, anchor, grad, hess, anchor_obj);
            const double exact = column_objective(inst, k, cand);
            CHECK(bound <= exact + 1e-9 * std::abs(exact));
        }
    }
}

TEST_CASE("closed_form_update fixed point, tie rule and dominance") {
    const Eigen::VectorXd cur = vec({1, -1, 1, -1});
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
    CHECK(closed_form_update(zero, -2.0, cur) == cur);

    // |grad| > |hess| with sign opposing the current bit flips it
    const Eigen::VectorXd g = vec({-3.0, 3.0, 0.0, 0.5});
    const Eigen::VectorXd next = closed_form_update(g, -2.0, cur);
    CHECK(next[0] == -1.0);  // flipped by dominant gradient
    CHECK(next[1] == 1.0);   // flipped by dominant gradient
    CHECK(next[2] == 1.0);   // kept by the curvature term
    CHECK(next[3] == -1.0);  // |g| < |h|, kept

    // exact zero argument resolves to +1 from either side
    const Eigen::VectorXd tie =
        closed_form_update(vec({-2.0}), -2.0, vec({1.0}));
    CHECK(tie[0] == 1.0);
    const Eigen::VectorXd tie2 =
        closed_form_update(vec({2.0}), -2.0, vec({-1.0}));
    CHECK(tie2[0] == 1.0);

    CHECK_THROWS_AS(closed_form_update(zero, 2.0, cur), ContractViolation);
}

TEST_CASE("closed_form_update equals the exhaustive surrogate argmax") {
    Rng rng(80);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.uniform_index(10));
        Eigen::VectorXd grad(n);
        for (Index i = 0; i < n; ++i) grad[i] = 4.0 * (rng.uniform() - 0.5);
        const double hess = -(0.1 + 3.0 * rng.uniform());
        const Eigen::VectorXd anchor = oracles::random_sign_matrix(n, 1, rng);

        const Eigen::VectorXd got = closed_form_update(grad, hess, anchor);

        Eigen::VectorXd best;
        double best_value = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd cand(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            for (Index i = 0; i < n; ++i)
                cand[i] = (mask >> i) & 1u ? 1.0 : -1.0;
            const double value = surrogate_value(cand, anchor, grad, hess, 0.0);
            if (value > best_value) {
                best_value = value;
                best = cand;
            }
        }
        CHECK(surrogate_value(got, anchor, grad, hess, 0.0) ==
              doctest::Approx(best_value).epsilon(1e-12));
        CHECK(got == best);
    }
}

TEST_CASE("a column update never decreases the objective") {
    Rng rng(90);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.uniform_index(9));
        const Index c = 1 + static_cast<Index>(rng.uniform_index(3));
        const double lambda = 0.5 + 8.0 * rng.uniform();
        auto inst = random_instance(n, c, lambda, rng);
        const Index k = static_cast<Index>(rng.uniform_index(c));

        const double before = log_likelihood(inst.U, inst.V, inst.S, lambda);
        const Eigen::VectorXd grad =
            grad_u_col(k, inst.U, inst.V, inst.S, lambda);
        const double hess = hess_bound_coeff(n, lambda, c);
        inst.U.set_col(k, closed_form_update(grad, hess, inst.U.col(k)));
        const double after = log_likelihood(inst.U, inst.V, inst.S, lambda);
        CHECK(after >= before - 1e-9 * std::abs(before));
    }
}

TEST_CASE("hyperparameter validation") {
    Hyperparams h;
    CHECK(h.resolved_sample_size() == h.code_len);
    CHECK_NOTHROW(h.validate(100));

    Hyperparams bad = h;
    bad.lambda = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = h;
    bad.code_len = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = h;
    bad.max_iter = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = h;
    bad.sample_size = 200;
    CHECK_THROWS_AS(bad.validate(100), ConfigError);
    CHECK_NOTHROW(bad.validate(200));
}
