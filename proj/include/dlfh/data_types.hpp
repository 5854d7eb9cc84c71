#ifndef DLFH_DATA_TYPES_HPP
#define DLFH_DATA_TYPES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "dlfh/common.hpp"

namespace dlfh {

// n x d real feature vectors for one modality. `center` keeps the mean that
// was subtracted when `centered` is set, so queries can be mapped into the
// same space later.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    bool centered = false;
    Eigen::VectorXd center;

    Index rows() const { return values.rows(); }
    Index dim() const { return values.cols(); }
};

// n x L multi-hot labels over {0,1}.
struct LabelMatrix {
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> values;

    Index rows() const { return values.rows(); }
    Index label_count() const { return values.cols(); }

    // Rows with no label set; such rows cannot act as supervised queries.
    std::vector<Index> empty_rows() const {
        std::vector<Index> out;
        for (Index i = 0; i < rows(); ++i)
            if ((values.row(i).array() == 0).all()) out.push_back(i);
        return out;
    }

    Eigen::MatrixXd as_double() const { return values.cast<double>(); }
};

}  // namespace dlfh

#endif  // DLFH_DATA_TYPES_HPP
