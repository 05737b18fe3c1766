#pragma once

#include <Eigen/Dense>

namespace dwmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// true marks an excluded entry.
using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace dwmf
