#pragma once

#include <span>

#include "xm/dense.hpp"

namespace xm {

// Weights for the two explanation constraints added to an embedder's loss.
struct XmConfig {
    double gamma = 0.0;  // sparsity weight
    double delta = 0.0;  // orthogonality weight
    bool include_diagonal = false;  // count i == j row pairs in the orthogonality sum

    bool active() const { return gamma != 0.0 || delta != 0.0; }
};

// Column-wise L1 mass of a raw explain matrix, summed over columns
// (direct entry summation).
double sparsity_loss(const Matrix& raw);

// Sum of |<row i, row j>| over ordered row pairs; i == j included only when
// include_diagonal is set (direct pair summation).
double orthogonality_loss(const Matrix& raw, bool include_diagonal = false);

// gamma * sparsity + delta * orthogonality of the explain matrix of (y, f),
// evaluated in closed form:
//   sparsity      = |y|_1 |f|_1 / (|y|_2 |f|_2)
//   orthogonality = (|y|_1^2 - |y|_2^2) / |y|_2^2   (+1 with the diagonal)
double xm_loss(std::span<const double> y, std::span<const double> f, const XmConfig& cfg);

// Analytic gradient of xm_loss with respect to y, using the sign(0) := 0
// subgradient. The loss is invariant to positive scaling of y, so the
// gradient is orthogonal to y and scales as 1/|y|.
std::vector<double> xm_gradient(std::span<const double> y, std::span<const double> f,
                                const XmConfig& cfg);

// Trainer path: feature_ratio = gamma * |f|_1 / |f|_2 precomputed per node
// (0 disables the sparsity term, e.g. for an all-zero feature vector).
void xm_gradient_accumulate(std::span<const double> y, double feature_ratio, double delta,
                            double step, std::span<double> y_inout);
void xm_gradient_into(std::span<const double> y, double feature_ratio, double delta,
                      std::span<double> grad_out);

}  // namespace xm
