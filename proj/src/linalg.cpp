#include "gpc/linalg.hpp"

#include "gpc/error.hpp"

namespace gpc {

Eigen::MatrixXd orthonormal_complement(const Vec& u) {
    const Eigen::Index n = u.size();
    // Householder reflection mapping e_k to u (k = largest |u_k|); its other
    // columns span u^⊥ and are orthonormal to working precision.
    Eigen::Index k = 0;
    u.cwiseAbs().maxCoeff(&k);
    Vec w = u;
    w[k] -= (u[k] >= 0 ? 1.0 : -1.0);
    const double wn = w.squaredNorm();
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    if (wn > 1e-300) q -= 2.0 * w * w.transpose() / wn;
    Eigen::MatrixXd basis(n, n - 1);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j != k) basis.col(c++) = q.col(j);
    }
    return basis;
}

Mat rows_from(std::span<const double> flat, int dim) {
    if (dim <= 0 || flat.size() % static_cast<size_t>(dim) != 0) {
        fail(ErrorCode::DimensionMismatch, "flat vector list length is not a multiple of the dimension");
    }
    const auto rows = static_cast<Eigen::Index>(flat.size() / static_cast<size_t>(dim));
    Mat m(rows, dim);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (int c = 0; c < dim; ++c) m(r, c) = flat[static_cast<size_t>(r * dim + c)];
    }
    return m;
}

Vec vec_from(std::span<const double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace gpc
