#pragma once

#include "gpc/linalg.hpp"

namespace gpc::lp {

enum class Status { Optimal, Unbounded, Infeasible };

struct Result {
    Status status = Status::Infeasible;
    Vec x;             // maximizer (valid when Optimal)
    double value = 0;  // c^T x at the maximizer
};

/// Solves  max c^T x  subject to  A x <= b  with x free, using a dense
/// two-phase tableau simplex with Bland's pivoting rule. Intended for the
/// handful-of-constraints problems arising from low-dimensional cones.
Result maximize(const Eigen::MatrixXd& A, const Vec& b, const Vec& c);

}  // namespace gpc::lp
