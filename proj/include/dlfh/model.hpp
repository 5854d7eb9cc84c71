#ifndef DLFH_MODEL_HPP
#define DLFH_MODEL_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>

#include "dlfh/code_matrix.hpp"
#include "dlfh/common.hpp"
#include "dlfh/similarity.hpp"

namespace dlfh {

// Hyper-parameters shared by training and out-of-sample fitting.
struct Hyperparams {
    double lambda = 8.0;       // scale factor of the pairwise score
    Index code_len = 16;       // c
    Index max_iter = 30;       // T
    Index sample_size = 0;     // m for stochastic training; 0 means "use code_len"
    std::uint64_t seed = 0;
    double gamma_x = 1.0;      // ridge strength, modality x
    double gamma_y = 1.0;      // ridge strength, modality y

    struct KernelSettings {
        Index anchor_count = 500;
        double bandwidth = 0.0;  // 0 selects the mean-distance heuristic
        double reg = 1e-3;       // per-bit logistic ridge
    };
    KernelSettings kernel;

    Index resolved_sample_size() const {
        return sample_size > 0 ? sample_size : code_len;
    }

    // Throws ConfigError on out-of-range values; n is the training set size
    // (bounds sample_size), pass 0 to skip that bound.
    void validate(Index n = 0) const;
};

// Pairwise score (lambda/c) * <u_row, v_row>; always in [-lambda, +lambda]
// for sign-valued rows.
double theta(const Eigen::Ref<const Eigen::VectorXd> &u_row,
             const Eigen::Ref<const Eigen::VectorXd> &v_row, double lambda);

// 1 / (1 + e^-x).
double sigmoid(double x);

// log(1 + e^x) in the overflow-safe branch form.
double softplus(double x);

// Log-likelihood sum_{i,j} [S_ij * Theta_ij - softplus(Theta_ij)], additive
// constant dropped. The matrix overloads evaluate the same expression on the
// real relaxation (any real-valued U, V of matching shape).
double log_likelihood(const Eigen::MatrixXd &U, const Eigen::MatrixXd &V,
                      const SimilarityProvider &S, double lambda);
double log_likelihood(const CodeMatrix &U, const CodeMatrix &V,
                      const SimilarityProvider &S, double lambda);

// Gradient of the log-likelihood with respect to column k of U:
// (lambda/c) * sum_j (S_{*j} - A_{*j}) V_jk, with A = sigmoid(Theta).
Eigen::VectorXd grad_u_col(Index k, const Eigen::MatrixXd &U,
                           const Eigen::MatrixXd &V,
                           const SimilarityProvider &S, double lambda);
Eigen::VectorXd grad_u_col(Index k, const CodeMatrix &U, const CodeMatrix &V,
                           const SimilarityProvider &S, double lambda);

// Gradient with respect to column k of V, the row-wise mirror image.
Eigen::VectorXd grad_v_col(Index k, const Eigen::MatrixXd &U,
                           const Eigen::MatrixXd &V,
                           const SimilarityProvider &S, double lambda);
Eigen::VectorXd grad_v_col(Index k, const CodeMatrix &U, const CodeMatrix &V,
                           const SimilarityProvider &S, double lambda);

// Gradient restricted to a sampled set of similarity columns (rows for the V
// variant). The full-range gradient is this with cols = 0..n-1; floating
// arithmetic coincides exactly in that case.
Eigen::VectorXd grad_u_col_sampled(Index k, const CodeMatrix &U,
                                   const CodeMatrix &V,
                                   const SimilarityProvider &S, double lambda,
                                   std::span<const Index> cols);
Eigen::VectorXd grad_v_col_sampled(Index k, const CodeMatrix &U,
                                   const CodeMatrix &V,
                                   const SimilarityProvider &S, double lambda,
                                   std::span<const Index> rows);

// Diagonal coefficient -(n_or_m) * lambda^2 / (4 c^2) of the Hessian lower
// bound H_k; always negative.
double hess_bound_coeff(Index n_or_m, double lambda, Index c);

// Second-order minorant of the column-restricted objective around `anchor`:
// L(anchor) + (x - anchor)' g + (h/2) ||x - anchor||^2. Tests and the update
// derivation use it; the update itself is closed-form.
double surrogate_value(const Eigen::Ref<const Eigen::VectorXd> &candidate,
                       const Eigen::Ref<const Eigen::VectorXd> &anchor,
                       const Eigen::Ref<const Eigen::VectorXd> &grad,
                       double hess_coeff, double anchor_objective);

// Maximizer of the surrogate over sign vectors:
// sign(grad - hess_coeff * current_col), with sign(0) = +1.
Eigen::VectorXd closed_form_update(
    const Eigen::Ref<const Eigen::VectorXd> &grad, double hess_coeff,
    const Eigen::Ref<const Eigen::VectorXd> &current_col);

}  // namespace dlfh

#endif  // DLFH_MODEL_HPP
