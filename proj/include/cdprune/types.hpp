#pragma once

#include <vector>

#include <Eigen/Core>

namespace cdprune {

/// Row-major so that flat indices follow (row, col) order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

/// Class indices: 0 = negative (majority), 1 = positive (minority).
using Labels = std::vector<int>;

inline constexpr int kNegative = 0;
inline constexpr int kPositive = 1;

}  // namespace cdprune
