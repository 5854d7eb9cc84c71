#ifndef DLFH_CODE_MATRIX_HPP
#define DLFH_CODE_MATRIX_HPP

#include <Eigen/Core>
#include <utility>

#include "dlfh/common.hpp"

namespace dlfh {

// n x c sign matrix over {-1,+1}: one row of c bits per data point.
// Stored as doubles so columns and whole matrices feed matrix products
// directly; every mutator enforces the sign domain.
class CodeMatrix {
public:
    CodeMatrix() = default;

    // All entries +1.
    CodeMatrix(Index rows, Index bits)
        : m_(Eigen::MatrixXd::Ones(rows, bits)) {
        DLFH_REQUIRE(rows >= 1 && bits >= 1,
                     "CodeMatrix: need rows >= 1 and bits >= 1, got rows="
                         << rows << " bits=" << bits);
    }

    // Takes ownership of a matrix that must already be sign-valued.
    explicit CodeMatrix(Eigen::MatrixXd values) : m_(std::move(values)) {
        DLFH_REQUIRE(m_.rows() >= 1 && m_.cols() >= 1,
                     "CodeMatrix: empty matrix");
        require_signs(m_);
    }

    Index rows() const { return m_.rows(); }
    Index bits() const { return m_.cols(); }

    double operator()(Index row, Index bit) const { return m_(row, bit); }

    void set(Index row, Index bit, double value) {
        DLFH_REQUIRE(value == 1.0 || value == -1.0,
                     "CodeMatrix::set: entry must be +1 or -1, got " << value);
        m_(row, bit) = value;
    }

    Eigen::VectorXd col(Index bit) const {
        DLFH_REQUIRE(bit >= 0 && bit < bits(),
                     "CodeMatrix::col: bit " << bit << " out of range [0, "
                                             << bits() << ")");
        return m_.col(bit);
    }

    Eigen::VectorXd row(Index i) const {
        DLFH_REQUIRE(i >= 0 && i < rows(),
                     "CodeMatrix::row: row " << i << " out of range [0, "
                                             << rows() << ")");
        return m_.row(i).transpose();
    }

    void set_col(Index bit, const Eigen::Ref<const Eigen::VectorXd> &values) {
        DLFH_REQUIRE(bit >= 0 && bit < bits(),
                     "CodeMatrix::set_col: bit " << bit << " out of range [0, "
                                                 << bits() << ")");
        DLFH_REQUIRE(values.size() == rows(),
                     "CodeMatrix::set_col: length " << values.size()
                                                    << " != rows " << rows());
        require_signs(values);
        m_.col(bit) = values;
    }

    const Eigen::MatrixXd &values() const { return m_; }

    bool operator==(const CodeMatrix &other) const { return m_ == other.m_; }

private:
    template <typename Derived>
    static void require_signs(const Eigen::DenseBase<Derived> &m) {
        DLFH_REQUIRE((m.derived().array().abs() == 1.0).all(),
                     "CodeMatrix: entries must be exactly +1 or -1");
    }

    Eigen::MatrixXd m_;
};

}  // namespace dlfh

#endif  // DLFH_CODE_MATRIX_HPP
