#ifndef DLFH_OOS_HPP
#define DLFH_OOS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>

#include "dlfh/code_matrix.hpp"
#include "dlfh/common.hpp"
#include "dlfh/data_types.hpp"

namespace dlfh {

// Ridge projection hash for one modality: code = sign(W^T (x - center)).
struct LinearHashModel {
    Eigen::MatrixXd weights;  // d x c
    Eigen::VectorXd center;   // d; zero when fitted on uncentered data
};

// RBF-feature hash: per-bit logistic scores on phi(x - center) against the
// stored anchors, code = sign of the scores.
struct KernelHashModel {
    Eigen::MatrixXd anchors;          // a x d, in the centered feature space
    double bandwidth = 0.0;           // RBF sigma
    Eigen::MatrixXd per_bit_weights;  // (a+1) x c; row 0 is the intercept
    Eigen::VectorXd center;           // d
};

// Solves (X^T X + gamma I) W = X^T codes by Cholesky and certifies the
// residual to 1e-6 relative; gamma = 0 on a rank-deficient design raises
// SingularSystemError advising gamma > 0.
LinearHashModel fit_linear(const FeatureMatrix &X, const CodeMatrix &codes,
                           double gamma);

Eigen::VectorXd hash_linear(const LinearHashModel &model,
                            const Eigen::Ref<const Eigen::VectorXd> &query);
CodeMatrix hash_linear_batch(const LinearHashModel &model,
                             const Eigen::MatrixXd &queries);

// Samples anchor rows without replacement, maps points through
// phi_j(x) = exp(-||x - anchor_j||^2 / (2 sigma^2)), and fits one
// l2-regularized logistic regression per bit by damped Newton steps until
// the gradient inf-norm falls under 1e-6. bandwidth = 0 selects the mean
// pairwise distance over a subsample of up to 1000 points. A bit that does
// not converge within the iteration cap keeps its best iterate and emits a
// warning on stderr.
KernelHashModel fit_kernel(const FeatureMatrix &X, const CodeMatrix &codes,
                           Index anchor_count, double bandwidth,
                           std::uint64_t seed, double reg = 1e-3,
                           int threads = 1);

Eigen::VectorXd hash_kernel(const KernelHashModel &model,
                            const Eigen::Ref<const Eigen::VectorXd> &query);
CodeMatrix hash_kernel_batch(const KernelHashModel &model,
                             const Eigen::MatrixXd &queries);

enum class Modality : std::uint8_t { X = 0, Y = 1 };

struct HashModelFile {
    std::variant<LinearHashModel, KernelHashModel> model;
    Modality modality = Modality::X;
};

// DLFM container; exact layout in docs/FORMATS.md.
void save_hash_model(const std::string &path, const HashModelFile &file);
HashModelFile load_hash_model(const std::string &path);

}  // namespace dlfh

#endif  // DLFH_OOS_HPP
