#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace xm {

// Dense row-major matrix of doubles. Sized for the small dense problems in
// this codebase (feature tables, explain matrices, embedding blocks); all
// factorizations go through the Jacobi solver below rather than an external
// LAPACK.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<double> row(int i) {
        return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);

// out = a * b. Rows of `out` are computed independently, so the result is
// bitwise identical for every worker count.
void matmul_into(const Matrix& a, const Matrix& b, Matrix& out, int workers = 1);

double dot(std::span<const double> a, std::span<const double> b);
double l1_norm(std::span<const double> v);
double l2_norm(std::span<const double> v);
double frobenius_norm(const Matrix& m);
double trace(const Matrix& m);
double max_abs_asymmetry(const Matrix& m);

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

// Cyclic Jacobi rotations; stops once the off-diagonal Frobenius mass drops
// below tol relative to the matrix scale.
SymmetricEigen jacobi_eigensolve(const Matrix& sym, double tol = 1e-12, int max_sweeps = 100);

// Singular values (descending) via the eigenvalues of the smaller Gram
// matrix; values below 1e-12 are treated as zero.
std::vector<double> singular_values(const Matrix& m);
double nuclear_norm(const Matrix& m);
double spectral_norm(const Matrix& m);

}  // namespace xm
