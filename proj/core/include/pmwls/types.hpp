#pragma once

#include <Eigen/Dense>

namespace pmwls {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Covariates are stored row-major so a single observation is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowView = Eigen::Ref<const Eigen::RowVectorXd>;
using RowOut = Eigen::Ref<Eigen::RowVectorXd>;

}  // namespace pmwls
