#include "gpc/linprog.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gpc::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

struct Tableau {
    Eigen::MatrixXd t;       // rows x (cols + 1); last column is the rhs
    std::vector<int> basis;  // basic column of each row
    int cols = 0;

    double rhs(int row) const { return t(row, cols); }

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int r = 0; r < t.rows(); ++r) {
            if (r != row && t(r, col) != 0.0) {
                t.row(r) -= t(r, col) * t.row(row);
            }
        }
        basis[row] = col;
    }

    double objective(const Vec& obj) const {
        double v = 0.0;
        for (int r = 0; r < t.rows(); ++r) {
            v += obj[basis[r]] * rhs(r);
        }
        return v;
    }

    // Bland's rule: lowest-index improving column, ratio ties broken by
    // lowest basic index. Returns false when the objective is unbounded.
    bool run(const Vec& obj, const std::vector<bool>& allowed) {
        const int rows = static_cast<int>(t.rows());
        for (int guard = 0; guard < 10000; ++guard) {
            int enter = -1;
            for (int j = 0; j < cols && enter < 0; ++j) {
                if (!allowed[j]) continue;
                double reduced = obj[j];
                for (int r = 0; r < rows; ++r) reduced -= obj[basis[r]] * t(r, j);
                if (reduced > kCostTol) enter = j;
            }
            if (enter < 0) return true;

            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < rows; ++r) {
                const double a = t(r, enter);
                if (a <= kPivotTol) continue;
                const double ratio = rhs(r) / a;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis[r] < basis[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        return true;
    }
};

}  // namespace

Result maximize(const Eigen::MatrixXd& A, const Vec& b, const Vec& c) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());

    int n_art = 0;
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) ++n_art;
    }
    // Columns: x+ [0,n), x- [n,2n), slack [2n,2n+m), artificial [2n+m, ...)
    const int slack0 = 2 * n;
    const int art0 = slack0 + m;
    const int cols = art0 + n_art;

    Tableau tab;
    tab.cols = cols;
    tab.t = Eigen::MatrixXd::Zero(m, cols + 1);
    tab.basis.assign(m, -1);

    int art = art0;
    for (int i = 0; i < m; ++i) {
        const double sign = b[i] < 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
            tab.t(i, j) = sign * A(i, j);
            tab.t(i, n + j) = -sign * A(i, j);
        }
        tab.t(i, slack0 + i) = sign;
        tab.t(i, cols) = sign * b[i];
        if (b[i] < 0) {
            tab.t(i, art) = 1.0;
            tab.basis[i] = art++;
        } else {
            tab.basis[i] = slack0 + i;
        }
    }

    Result result;
    std::vector<bool> allowed(cols, true);

    if (n_art > 0) {
        Vec phase1 = Vec::Zero(cols);
        for (int j = art0; j < cols; ++j) phase1[j] = -1.0;
        tab.run(phase1, allowed);
        if (tab.objective(phase1) < -1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
            result.status = Status::Infeasible;
            return result;
        }
        for (int r = 0; r < m; ++r) {
            if (tab.basis[r] < art0) continue;
            for (int j = 0; j < art0; ++j) {
                if (std::abs(tab.t(r, j)) > 1e-9) {
                    tab.pivot(r, j);
                    break;
                }
            }
        }
        for (int j = art0; j < cols; ++j) allowed[j] = false;
    }

    Vec phase2 = Vec::Zero(cols);
    for (int j = 0; j < n; ++j) {
        phase2[j] = c[j];
        phase2[n + j] = -c[j];
    }
    if (!tab.run(phase2, allowed)) {
        result.status = Status::Unbounded;
        return result;
    }

    Vec z = Vec::Zero(cols);
    for (int r = 0; r < m; ++r) z[tab.basis[r]] = tab.rhs(r);
    result.x = z.head(n) - z.segment(n, n);
    result.value = c.dot(result.x);
    result.status = Status::Optimal;
    return result;
}

}  // namespace gpc::lp
