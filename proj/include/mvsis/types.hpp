#pragma once

#include <Eigen/Dense>

namespace mvsis {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
// Row-major so that a node's row (or a matrix row in a matvec) is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace mvsis
