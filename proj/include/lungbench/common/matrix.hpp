#pragma once

#include <Eigen/Core>

namespace lungbench {

template <class S>
using RowMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using RowMatrixF = RowMatrix<float>;
using RowMatrixD = RowMatrix<double>;

}  // namespace lungbench
