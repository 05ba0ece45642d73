#include "nfem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfem {

CsrMatrix::CsrMatrix(const std::vector<std::vector<int>>& pattern) {
    int n = static_cast<int>(pattern.size());
    row_ptr.resize(n + 1, 0);
    for (int i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + static_cast<int>(pattern[i].size());
    col.reserve(row_ptr[n]);
    for (const auto& r : pattern) col.insert(col.end(), r.begin(), r.end());
    val.assign(col.size(), 0.0);
}

void CsrMatrix::add(int i, int j, double v) {
    auto begin = col.begin() + row_ptr[i];
    auto end = col.begin() + row_ptr[i + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) throw std::runtime_error("CsrMatrix::add: entry not in pattern");
    val[it - col.begin()] += v;
}

void CsrMatrix::clear_values() { std::fill(val.begin(), val.end(), 0.0); }

void CsrMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    int n = rows();
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::diagonal() const {
    int n = rows();
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            if (col[k] == i) d[i] = val[k];
    return d;
}

double CsrMatrix::max_asymmetry() const {
    int n = rows();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            int j = col[k];
            auto begin = col.begin() + row_ptr[j];
            auto end = col.begin() + row_ptr[j + 1];
            auto it = std::lower_bound(begin, end, i);
            double aji = (it != end && *it == i) ? val[it - col.begin()] : 0.0;
            worst = std::max(worst, std::abs(val[k] - aji));
        }
    }
    return worst;
}

namespace {

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

CgReport cg_solve(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                  double rel_tol, double abs_tol, int max_iterations) {
    int n = A.rows();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("cg_solve: size mismatch");
    x.resize(n, 0.0);
    if (max_iterations < 0) max_iterations = 20 * n + 1000;

    std::vector<double> d = A.diagonal();
    for (int i = 0; i < n; ++i) {
        if (d[i] <= 0.0) throw std::runtime_error("cg_solve: non-positive diagonal, matrix not SPD");
        d[i] = 1.0 / d[i];
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    A.matvec(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double bnorm = std::sqrt(dot_vec(b, b));
    double target = std::max(abs_tol, rel_tol * bnorm);

    double rnorm = std::sqrt(dot_vec(r, r));
    CgReport rep;
    rep.residual = rnorm;
    if (rnorm <= target) return rep;

    for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
    p = z;
    double rz = dot_vec(r, z);

    for (int it = 1; it <= max_iterations; ++it) {
        A.matvec(p, Ap);
        double pAp = dot_vec(p, Ap);
        if (pAp <= 0.0)
            throw std::runtime_error("cg_solve: negative curvature, matrix not positive definite");
        double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        rnorm = std::sqrt(dot_vec(r, r));
        rep.iterations = it;
        rep.residual = rnorm;
        if (rnorm <= target) return rep;
        for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
        double rz_new = dot_vec(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw std::runtime_error("cg_solve: iteration limit exceeded");
}

} // namespace nfem
