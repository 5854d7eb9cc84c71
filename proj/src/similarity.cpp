#include "dlfh/similarity.hpp"

namespace dlfh {

void SimilarityProvider::gather_columns(std::span<const Index> idx,
                                        Eigen::MatrixXd &out) const {
    const Index n = size();
    out.resize(n, static_cast<Index>(idx.size()));
    Eigen::VectorXd buf(n);
    for (std::size_t q = 0; q < idx.size(); ++q) {
        column(idx[q], buf);
        out.col(static_cast<Index>(q)) = buf;
    }
}

void SimilarityProvider::gather_rows(std::span<const Index> idx,
                                     Eigen::MatrixXd &out) const {
    const Index n = size();
    out.resize(n, static_cast<Index>(idx.size()));
    Eigen::VectorXd buf(n);
    for (std::size_t q = 0; q < idx.size(); ++q) {
        row(idx[q], buf);
        out.col(static_cast<Index>(q)) = buf;
    }
}

DenseSimilarity::DenseSimilarity(ByteMatrix s) : s_(std::move(s)) {
    DLFH_REQUIRE(s_.rows() == s_.cols(),
                 "DenseSimilarity: matrix must be square, got "
                     << s_.rows() << "x" << s_.cols());
    DLFH_REQUIRE((s_.array() <= 1).all(),
                 "DenseSimilarity: entries must be 0 or 1");
}

DenseSimilarity::DenseSimilarity(const Eigen::MatrixXd &s)
    : DenseSimilarity([&s] {
          DLFH_REQUIRE((s.array() == 0.0 || s.array() == 1.0).all(),
                       "DenseSimilarity: entries must be 0 or 1");
          return ByteMatrix(s.cast<std::uint8_t>());
      }()) {}

void DenseSimilarity::column(Index j, Eigen::VectorXd &out) const {
    DLFH_REQUIRE(j >= 0 && j < size(),
                 "DenseSimilarity::column: index " << j << " out of range");
    out = s_.col(j).cast<double>();
}

void DenseSimilarity::row(Index i, Eigen::VectorXd &out) const {
    DLFH_REQUIRE(i >= 0 && i < size(),
                 "DenseSimilarity::row: index " << i << " out of range");
    out = s_.row(i).transpose().cast<double>();
}

void DenseSimilarity::gather_columns(std::span<const Index> idx,
                                     Eigen::MatrixXd &out) const {
    out.resize(size(), static_cast<Index>(idx.size()));
    for (std::size_t q = 0; q < idx.size(); ++q) {
        const Index j = idx[q];
        DLFH_REQUIRE(j >= 0 && j < size(),
                     "DenseSimilarity::gather_columns: index " << j
                                                               << " out of range");
        out.col(static_cast<Index>(q)) = s_.col(j).cast<double>();
    }
}

void DenseSimilarity::gather_rows(std::span<const Index> idx,
                                  Eigen::MatrixXd &out) const {
    out.resize(size(), static_cast<Index>(idx.size()));
    for (std::size_t q = 0; q < idx.size(); ++q) {
        const Index i = idx[q];
        DLFH_REQUIRE(i >= 0 && i < size(),
                     "DenseSimilarity::gather_rows: index " << i
                                                            << " out of range");
        out.col(static_cast<Index>(q)) = s_.row(i).transpose().cast<double>();
    }
}

LabelSimilarity::LabelSimilarity(Eigen::MatrixXd labels_rows,
                                 Eigen::MatrixXd labels_cols)
    : labels_rows_(std::move(labels_rows)), labels_cols_(std::move(labels_cols)) {
    DLFH_REQUIRE(labels_rows_.cols() == labels_cols_.cols(),
                 "LabelSimilarity: label dimensionality mismatch, "
                     << labels_rows_.cols() << " vs " << labels_cols_.cols());
    DLFH_REQUIRE(labels_rows_.rows() == labels_cols_.rows(),
                 "LabelSimilarity: S must be square; got "
                     << labels_rows_.rows() << " row labels and "
                     << labels_cols_.rows() << " column labels");
}

void LabelSimilarity::column(Index j, Eigen::VectorXd &out) const {
    DLFH_REQUIRE(j >= 0 && j < size(),
                 "LabelSimilarity::column: index " << j << " out of range");
    out = ((labels_rows_ * labels_cols_.row(j).transpose())
              .array() > 0.0)
              .cast<double>();
}

void LabelSimilarity::row(Index i, Eigen::VectorXd &out) const {
    DLFH_REQUIRE(i >= 0 && i < size(),
                 "LabelSimilarity::row: index " << i << " out of range");
    out = ((labels_cols_ * labels_rows_.row(i).transpose())
              .array() > 0.0)
              .cast<double>();
}

void LabelSimilarity::gather_columns(std::span<const Index> idx,
                                     Eigen::MatrixXd &out) const {
    const auto m = static_cast<Index>(idx.size());
    Eigen::MatrixXd gathered(m, labels_cols_.cols());
    for (Index q = 0; q < m; ++q) {
        const Index j = idx[static_cast<std::size_t>(q)];
        DLFH_REQUIRE(j >= 0 && j < size(),
                     "LabelSimilarity::gather_columns: index " << j
                                                               << " out of range");
        gathered.row(q) = labels_cols_.row(j);
    }
    out = ((labels_rows_ * gathered.transpose())
              .array() > 0.0)
              .cast<double>();
}

void LabelSimilarity::gather_rows(std::span<const Index> idx,
                                  Eigen::MatrixXd &out) const {
    const auto m = static_cast<Index>(idx.size());
    Eigen::MatrixXd gathered(m, labels_rows_.cols());
    for (Index q = 0; q < m; ++q) {
        const Index i = idx[static_cast<std::size_t>(q)];
        DLFH_REQUIRE(i >= 0 && i < size(),
                     "LabelSimilarity::gather_rows: index " << i
                                                            << " out of range");
        gathered.row(q) = labels_rows_.row(i);
    }
    out = ((labels_cols_ * gathered.transpose())
              .array() > 0.0)
              .cast<double>();
}

}  // namespace dlfh
