#include "xm/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "xm/parallel.hpp"

namespace xm {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void matmul_into(const Matrix& a, const Matrix& b, Matrix& out, int workers) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    if (out.rows() != a.rows() || out.cols() != b.cols()) out = Matrix(a.rows(), b.cols());
    const int k_dim = a.cols();
    const int cols = b.cols();
    parallel_for(a.rows(), workers, [&](int i) {
        double* out_row = out.row(i).data();
        std::fill(out_row, out_row + cols, 0.0);
        const double* a_row = a.row(i).data();
        for (int k = 0; k < k_dim; ++k) {
            const double aik = a_row[k];
            if (aik == 0.0) continue;
            const double* b_row = b.row(k).data();
            for (int j = 0; j < cols; ++j) out_row[j] += aik * b_row[j];
        }
    });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    matmul_into(a, b, out);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double frobenius_norm(const Matrix& m) {
    return l2_norm(std::span<const double>(m.data()));
}

double trace(const Matrix& m) {
    double s = 0.0;
    const int n = std::min(m.rows(), m.cols());
    for (int i = 0; i < n; ++i) s += m(i, i);
    return s;
}

double max_abs_asymmetry(const Matrix& m) {
    double worst = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
}

SymmetricEigen jacobi_eigensolve(const Matrix& sym, double tol, int max_sweeps) {
    const int n = sym.rows();
    if (n != sym.cols()) throw std::invalid_argument("jacobi_eigensolve: matrix must be square");
    Matrix a = sym;
    Matrix v = Matrix::identity(n);
    const double scale = std::max(1.0, frobenius_norm(a));

    for (int sweep = 0; sweep < max_sweeps && n > 1; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= tol * scale) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });

    SymmetricEigen result;
    result.values.resize(n);
    result.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        result.values[k] = a(order[k], order[k]);
        for (int i = 0; i < n; ++i) result.vectors(i, k) = v(i, order[k]);
    }
    return result;
}

std::vector<double> singular_values(const Matrix& m) {
    if (m.empty()) return {};
    // Work with the smaller Gram form so a d x f explain matrix costs an
    // f x f eigensolve.
    const bool tall = m.rows() >= m.cols();
    const int k = tall ? m.cols() : m.rows();
    Matrix gram(k, k);
    if (tall) {
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                double s = 0.0;
                for (int r = 0; r < m.rows(); ++r) s += m(r, i) * m(r, j);
                gram(i, j) = s;
                gram(j, i) = s;
            }
    } else {
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                double s = dot(m.row(i), m.row(j));
                gram(i, j) = s;
                gram(j, i) = s;
            }
    }
    auto eig = jacobi_eigensolve(gram);
    const double lambda_max = std::max(eig.values.back(), 0.0);
    std::vector<double> sv(k);
    for (int i = 0; i < k; ++i) {
        // eigenvalues below the solver tolerance (relative to the largest)
        // are roundoff of exact zeros; their square roots would pollute the
        // sum at the 1e-8 level otherwise
        double lambda = std::max(eig.values[k - 1 - i], 0.0);
        if (lambda < 1e-12 * lambda_max) lambda = 0.0;
        double s = std::sqrt(lambda);
        if (s < 1e-12) s = 0.0;
        sv[i] = s;
    }
    return sv;
}

double nuclear_norm(const Matrix& m) {
    const auto sv = singular_values(m);
    return std::accumulate(sv.begin(), sv.end(), 0.0);
}

double spectral_norm(const Matrix& m) {
    const auto sv = singular_values(m);
    return sv.empty() ? 0.0 : sv.front();
}

}  // namespace xm
