#pragma once

#include <Eigen/Dense>

namespace cbi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace cbi
