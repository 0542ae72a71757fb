#pragma once

#include <optional>
#include <span>
#include <vector>

#include "xm/dense.hpp"

namespace xm {

enum class ExplainNorm { Population, PerMatrix };

// Per-node explanation: how much each embedding dimension (row) is defined
// by each sense feature (column). The raw form is the outer product of the
// embedding and feature vectors scaled by the product of their norms, so it
// has rank 1 and nuclear norm exactly 1.
struct ExplainMatrix {
    Matrix raw;                        // d x f
    std::optional<Matrix> normalized;  // in [0, 1] once a normalization ran
    int node_id = -1;
    ExplainNorm mode = ExplainNorm::Population;  // meaningful when normalized
};

// raw = y f^T / (|y| |f|). Throws ConfigError naming the offending input
// when either vector is zero.
ExplainMatrix explain_matrix(std::span<const double> y, std::span<const double> f);

struct ExplainNormalizeInfo {
    int degenerate_cells = 0;  // constant across the batch, filled with 0.5
};

// Population mode: each cell is min-max normalized across the whole batch.
// Per-matrix mode: each matrix is min-max normalized over its own entries.
ExplainNormalizeInfo normalize_explain(std::vector<ExplainMatrix>& batch, ExplainNorm mode);

// E E^T of the chosen view, symmetrized against roundoff.
Matrix gram(const ExplainMatrix& e, bool normalized_view = false);

// -tr(A log A) for a symmetric PSD matrix (0 log 0 = 0).
double von_neumann_entropy(const Matrix& a);

// tr[A (log A - log B)] - tr(A) + tr(B); +infinity when B's null space does
// not contain A's (support violation).
double bregman_divergence(const Matrix& a, const Matrix& b);

// D(A||B) - 0.5 * |A - B|_*^2 for trace-1 PSD inputs; non-negative up to
// roundoff by the matrix Pinsker inequality.
double pinsker_gap(const Matrix& a, const Matrix& b);

struct GramDiag {
    Matrix a;  // trace-normalized E E^T of the reference explanation
    Matrix b;  // trace-normalized E E^T of the compared explanation
    double entropy_a = 0.0;
    double entropy_b = 0.0;
    double divergence = 0.0;
    double pinsker_gap = 0.0;
};

GramDiag gram_diagnostics(const ExplainMatrix& reference, const ExplainMatrix& other,
                          bool normalized_view = false);

}  // namespace xm
