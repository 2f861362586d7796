#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace gpc {

using Vec = Eigen::VectorXd;
/// Row-major list of vectors: row k is the k-th vector.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Orthonormal basis of the hyperplane u^⊥ as the columns of an n x (n-1)
/// matrix. u must be a unit vector.
Eigen::MatrixXd orthonormal_complement(const Vec& u);

Mat rows_from(std::span<const double> flat, int dim);
Vec vec_from(std::span<const double> values);
std::vector<double> to_std(const Vec& v);

}  // namespace gpc
