#include "dlfh/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace dlfh {

namespace {

constexpr Index kBlock = 256;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Index> full_range(Index n) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    return idx;
}

void check_theta_bound(const Eigen::MatrixXd &theta_block, double bound) {
    if (bound == kInf) return;
    const double limit = bound * (1.0 + 1e-12) + 1e-12;
    DLFH_REQUIRE(
        (theta_block.array().abs() <= limit).all(),
        "theta exceeded the [-lambda, lambda] range; code entries are "
        "not sign-valued (max |theta| = "
            << theta_block.array().abs().maxCoeff() << ", lambda = " << bound
            << ")");
}

// grad = (lambda/c) * sum_q (S-block col q - sigmoid(theta col q)) * G(q, k)
// where theta col q = (lambda/c) * base * G.row(q)^T. With gather_col = true
// the S-block is made of columns S_{*idx[q]} (U-phase); otherwise of rows
// S_{idx[q]*} (V-phase). A is recomputed from the current base/G on every
// call; nothing is cached across column updates.
Eigen::VectorXd residual_weighted_sum(const Eigen::MatrixXd &base,
                                      const Eigen::MatrixXd &gathered_src,
                                      Index k, const SimilarityProvider &S,
                                      double lambda, std::span<const Index> idx,
                                      bool gather_col, double theta_bound) {
    const Index n = base.rows();
    const Index c = base.cols();
    DLFH_REQUIRE(k >= 0 && k < c,
                 "column index " << k << " out of range [0, " << c << ")");
    DLFH_REQUIRE(gathered_src.cols() == c,
                 "code matrices disagree on bit count: " << c << " vs "
                                                         << gathered_src.cols());
    DLFH_REQUIRE(S.size() == n && gathered_src.rows() == n,
                 "shape mismatch: S is " << S.size() << "x" << S.size()
                                         << ", codes have " << n << " and "
                                         << gathered_src.rows() << " rows");

    const double scale = lambda / static_cast<double>(c);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd gathered, s_block, theta_block;
    const auto total = static_cast<Index>(idx.size());
    for (Index q0 = 0; q0 < total; q0 += kBlock) {
        const Index b = std::min<Index>(kBlock, total - q0);
        const std::span<const Index> chunk = idx.subspan(
            static_cast<std::size_t>(q0), static_cast<std::size_t>(b));

        gathered.resize(b, c);
        for (Index q = 0; q < b; ++q) {
            const Index j = chunk[static_cast<std::size_t>(q)];
            DLFH_REQUIRE(j >= 0 && j < n,
                         "sampled index " << j << " out of range [0, " << n
                                          << ")");
            gathered.row(q) = gathered_src.row(j);
        }

        theta_block.noalias() = scale * base * gathered.transpose();
        check_theta_bound(theta_block, theta_bound);

        if (gather_col) {
            S.gather_columns(chunk, s_block);
        } else {
            S.gather_rows(chunk, s_block);
        }

        theta_block = s_block - (1.0 + (-theta_block.array()).exp()).inverse().matrix();
        grad.noalias() += theta_block * gathered.col(k);
    }
    return grad * scale;
}

double log_likelihood_impl(const Eigen::MatrixXd &U, const Eigen::MatrixXd &V,
                           const SimilarityProvider &S, double lambda,
                           double theta_bound) {
    const Index n = U.rows();
    DLFH_REQUIRE(U.cols() == V.cols() && V.rows() == n,
                 "log_likelihood: U is " << U.rows() << "x" << U.cols()
                                         << " but V is " << V.rows() << "x"
                                         << V.cols());
    DLFH_REQUIRE(S.size() == n, "log_likelihood: S is " << S.size() << "x"
                                                        << S.size()
                                                        << " but codes have "
                                                        << n << " rows");
    const double scale = lambda / static_cast<double>(U.cols());

    double total = 0.0;
    Eigen::MatrixXd theta_block, s_block;
    std::vector<Index> chunk;
    for (Index j0 = 0; j0 < n; j0 += kBlock) {
        const Index b = std::min<Index>(kBlock, n - j0);
        chunk.resize(static_cast<std::size_t>(b));
        std::iota(chunk.begin(), chunk.end(), j0);

        theta_block.noalias() = scale * U * V.middleRows(j0, b).transpose();
        check_theta_bound(theta_block, theta_bound);
        S.gather_columns(chunk, s_block);

        const auto t = theta_block.array();
        // softplus(t), branch-free over the block: t > 0 uses t + log1p(e^-t)
        const Eigen::ArrayXXd sp =
            (t > 0.0).select(t + (-t).exp().log1p(), t.exp().log1p());
        total += (s_block.array() * t - sp).sum();
    }
    return total;
}

}  // namespace

void Hyperparams::validate(Index n) const {
    if (!(lambda > 0.0))
        throw ConfigError("lambda must be > 0, got " + std::to_string(lambda));
    if (code_len < 1)
        throw ConfigError("code length must be >= 1, got " +
                          std::to_string(code_len));
    if (max_iter < 1)
        throw ConfigError("iteration count must be >= 1, got " +
                          std::to_string(max_iter));
    const Index m = resolved_sample_size();
    if (m < 1)
        throw ConfigError("sample size must be >= 1, got " + std::to_string(m));
    if (n > 0 && m > n)
        throw ConfigError("sample size " + std::to_string(m) +
                          " exceeds training set size " + std::to_string(n));
    if (gamma_x < 0.0 || gamma_y < 0.0)
        throw ConfigError("ridge strengths must be nonnegative");
    if (kernel.anchor_count < 1)
        throw ConfigError("anchor count must be >= 1");
    if (kernel.bandwidth < 0.0)
        throw ConfigError("bandwidth must be positive (or 0 for auto)");
}

double theta(const Eigen::Ref<const Eigen::VectorXd> &u_row,
             const Eigen::Ref<const Eigen::VectorXd> &v_row, double lambda) {
    DLFH_REQUIRE(u_row.size() == v_row.size(),
                 "theta: row lengths differ, " << u_row.size() << " vs "
                                               << v_row.size());
    DLFH_REQUIRE(u_row.size() >= 1, "theta: empty rows");
    DLFH_REQUIRE(lambda > 0.0, "theta: lambda must be positive, got " << lambda);
    return lambda / static_cast<double>(u_row.size()) * u_row.dot(v_row);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_likelihood(const Eigen::MatrixXd &U, const Eigen::MatrixXd &V,
                      const SimilarityProvider &S, double lambda) {
    return log_likelihood_impl(U, V, S, lambda, kInf);
}

double log_likelihood(const CodeMatrix &U, const CodeMatrix &V,
                      const SimilarityProvider &S, double lambda) {
    return log_likelihood_impl(U.values(), V.values(), S, lambda, lambda);
}

Eigen::VectorXd grad_u_col(Index k, const Eigen::MatrixXd &U,
                           const Eigen::MatrixXd &V,
                           const SimilarityProvider &S, double lambda) {
    const auto idx = full_range(U.rows());
    return residual_weighted_sum(U, V, k, S, lambda, idx, true, kInf);
}

Eigen::VectorXd grad_u_col(Index k, const CodeMatrix &U, const CodeMatrix &V,
                           const SimilarityProvider &S, double lambda) {
    const auto idx = full_range(U.rows());
    return residual_weighted_sum(U.values(), V.values(), k, S, lambda, idx,
                                 true, lambda);
}

Eigen::VectorXd grad_v_col(Index k, const Eigen::MatrixXd &U,
                           const Eigen::MatrixXd &V,
                           const SimilarityProvider &S, double lambda) {
    const auto idx = full_range(U.rows());
    return residual_weighted_sum(V, U, k, S, lambda, idx, false, kInf);
}

Eigen::VectorXd grad_v_col(Index k, const CodeMatrix &U, const CodeMatrix &V,
                           const SimilarityProvider &S, double lambda) {
    const auto idx = full_range(U.rows());
    return residual_weighted_sum(V.values(), U.values(), k, S, lambda, idx,
                                 false, lambda);
}

Eigen::VectorXd grad_u_col_sampled(Index k, const CodeMatrix &U,
                                   const CodeMatrix &V,
                                   const SimilarityProvider &S, double lambda,
                                   std::span<const Index> cols) {
    return residual_weighted_sum(U.values(), V.values(), k, S, lambda, cols,
                                 true, lambda);
}

Eigen::VectorXd grad_v_col_sampled(Index k, const CodeMatrix &U,
                                   const CodeMatrix &V,
                                   const SimilarityProvider &S, double lambda,
                                   std::span<const Index> rows) {
    return residual_weighted_sum(V.values(), U.values(), k, S, lambda, rows,
                                 false, lambda);
}

double hess_bound_coeff(Index n_or_m, double lambda, Index c) {
    DLFH_REQUIRE(n_or_m >= 1, "hess_bound_coeff: count must be >= 1, got "
                                  << n_or_m);
    DLFH_REQUIRE(c >= 1, "hess_bound_coeff: c must be >= 1, got " << c);
    DLFH_REQUIRE(lambda > 0.0,
                 "hess_bound_coeff: lambda must be positive, got " << lambda);
    const double cd = static_cast<double>(c);
    return -static_cast<double>(n_or_m) * lambda * lambda / (4.0 * cd * cd);
}

double surrogate_value(const Eigen::Ref<const Eigen::VectorXd> &candidate,
                       const Eigen::Ref<const Eigen::VectorXd> &anchor,
                       const Eigen::Ref<const Eigen::VectorXd> &grad,
                       double hess_coeff, double anchor_objective) {
    DLFH_REQUIRE(candidate.size() == anchor.size() &&
                     anchor.size() == grad.size(),
                 "surrogate_value: length mismatch, candidate="
                     << candidate.size() << " anchor=" << anchor.size()
                     << " grad=" << grad.size());
    const Eigen::VectorXd step = candidate - anchor;
    return anchor_objective + step.dot(grad) +
           0.5 * hess_coeff * step.squaredNorm();
}

Eigen::VectorXd closed_form_update(
    const Eigen::Ref<const Eigen::VectorXd> &grad, double hess_coeff,
    const Eigen::Ref<const Eigen::VectorXd> &current_col) {
    DLFH_REQUIRE(grad.size() == current_col.size(),
                 "closed_form_update: length mismatch, grad="
                     << grad.size() << " current=" << current_col.size());
    DLFH_REQUIRE(hess_coeff < 0.0,
                 "closed_form_update: hess_coeff must be negative, got "
                     << hess_coeff);
    Eigen::VectorXd out(grad.size());
    for (Index i = 0; i < grad.size(); ++i) {
        const double arg = grad[i] - hess_coeff * current_col[i];
        out[i] = arg >= 0.0 ? 1.0 : -1.0;  // sign(0) = +1
    }
    return out;
}

}  // namespace dlfh
