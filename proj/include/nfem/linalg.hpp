#pragma once

#include <vector>

namespace nfem {

// Symmetric sparse matrix in compressed row storage (full pattern stored).
class CsrMatrix {
public:
    CsrMatrix() = default;
    // pattern given as per-row sorted unique column lists
    explicit CsrMatrix(const std::vector<std::vector<int>>& pattern);

    int rows() const { return static_cast<int>(row_ptr.size()) - 1; }
    void add(int i, int j, double v); // entry must exist in the pattern
    void clear_values();
    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;
    // max_ij |A_ij - A_ji| over the stored pattern
    double max_asymmetry() const;

    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
};

struct SparseSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
};

struct CgReport {
    int iterations = 0;
    double residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients. Stops when
// ||b - Ax||_2 <= max(abs_tol, rel_tol * ||b||_2). Throws std::runtime_error
// when negative curvature is encountered (matrix not positive definite) or
// the iteration limit is exceeded.
CgReport cg_solve(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                  double rel_tol, double abs_tol, int max_iterations = -1);

} // namespace nfem
