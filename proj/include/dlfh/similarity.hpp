#ifndef DLFH_SIMILARITY_HPP
#define DLFH_SIMILARITY_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "dlfh/common.hpp"

namespace dlfh {

// Indexed source of the n x n cross-modal similarity matrix S over {0,1}.
// Yields single columns S_{*j} / rows S_{i*} and gathered blocks of them;
// consumers never require the whole matrix at once.
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;

    virtual Index size() const = 0;

    // S_{*j} as a {0,1} vector of length n.
    virtual void column(Index j, Eigen::VectorXd &out) const = 0;

    // S_{i*} as a {0,1} vector of length n.
    virtual void row(Index i, Eigen::VectorXd &out) const = 0;

    // out(:, q) = S_{*idx[q]}; out is resized to n x idx.size().
    virtual void gather_columns(std::span<const Index> idx,
                                Eigen::MatrixXd &out) const;

    // out(:, q) = S_{idx[q]*}^T; out is resized to n x idx.size().
    virtual void gather_rows(std::span<const Index> idx,
                             Eigen::MatrixXd &out) const;
};

// S materialized as a byte matrix. Memory is n^2 bytes; construction above
// the data-io threshold is the caller's responsibility.
class DenseSimilarity final : public SimilarityProvider {
public:
    using ByteMatrix =
        Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

    explicit DenseSimilarity(ByteMatrix s);

    // Validates that every entry is exactly 0 or 1.
    explicit DenseSimilarity(const Eigen::MatrixXd &s);

    Index size() const override { return s_.rows(); }
    void column(Index j, Eigen::VectorXd &out) const override;
    void row(Index i, Eigen::VectorXd &out) const override;
    void gather_columns(std::span<const Index> idx,
                        Eigen::MatrixXd &out) const override;
    void gather_rows(std::span<const Index> idx,
                     Eigen::MatrixXd &out) const override;

    const ByteMatrix &matrix() const { return s_; }

private:
    ByteMatrix s_;
};

// Label-backed provider: S_ij = 1 iff the label vectors of row i (first
// matrix) and row j (second matrix) share a nonzero inner product. Columns
// and rows are computed on demand; nothing n^2-sized is stored.
class LabelSimilarity final : public SimilarityProvider {
public:
    LabelSimilarity(Eigen::MatrixXd labels_rows, Eigen::MatrixXd labels_cols);

    Index size() const override { return labels_rows_.rows(); }
    void column(Index j, Eigen::VectorXd &out) const override;
    void row(Index i, Eigen::VectorXd &out) const override;
    void gather_columns(std::span<const Index> idx,
                        Eigen::MatrixXd &out) const override;
    void gather_rows(std::span<const Index> idx,
                     Eigen::MatrixXd &out) const override;

private:
    Eigen::MatrixXd labels_rows_;  // labels of the i axis, n x L
    Eigen::MatrixXd labels_cols_;  // labels of the j axis, n x L
};

}  // namespace dlfh

#endif  // DLFH_SIMILARITY_HPP
