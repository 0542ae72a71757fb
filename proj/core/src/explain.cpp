#include "xm/explain.hpp"

#include <cmath>
#include <limits>

#include "xm/errors.hpp"

namespace xm {

ExplainMatrix explain_matrix(std::span<const double> y, std::span<const double> f) {
    const double ny = l2_norm(y);
    const double nf = l2_norm(f);
    if (ny == 0.0) throw ConfigError("explain_matrix: embedding vector is zero");
    if (nf == 0.0) throw ConfigError("explain_matrix: sense feature vector is zero");
    ExplainMatrix e;
    e.raw = Matrix(static_cast<int>(y.size()), static_cast<int>(f.size()));
    const double scale = 1.0 / (ny * nf);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j)
            e.raw(static_cast<int>(i), static_cast<int>(j)) = y[i] * f[j] * scale;
    return e;
}

ExplainNormalizeInfo normalize_explain(std::vector<ExplainMatrix>& batch, ExplainNorm mode) {
    if (batch.empty()) throw ConfigError("normalize_explain: batch is empty");
    const int d = batch.front().raw.rows();
    const int f = batch.front().raw.cols();
    for (const auto& e : batch)
        if (e.raw.rows() != d || e.raw.cols() != f)
            throw ConfigError("normalize_explain: inconsistent matrix shapes in batch");

    ExplainNormalizeInfo info;
    constexpr double kFlat = 1e-12;
    if (mode == ExplainNorm::PerMatrix) {
        for (auto& e : batch) {
            double lo = e.raw(0, 0), hi = e.raw(0, 0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < f; ++j) {
                    lo = std::min(lo, e.raw(i, j));
                    hi = std::max(hi, e.raw(i, j));
                }
            Matrix norm(d, f, 0.5);
            if (hi - lo > kFlat) {
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < f; ++j) norm(i, j) = (e.raw(i, j) - lo) / (hi - lo);
            } else {
                ++info.degenerate_cells;
            }
            e.normalized = std::move(norm);
            e.mode = mode;
        }
        return info;
    }

    // population mode: per-cell min/max across the batch
    Matrix lo(d, f, std::numeric_limits<double>::infinity());
    Matrix hi(d, f, -std::numeric_limits<double>::infinity());
    for (const auto& e : batch)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < f; ++j) {
                lo(i, j) = std::min(lo(i, j), e.raw(i, j));
                hi(i, j) = std::max(hi(i, j), e.raw(i, j));
            }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < f; ++j)
            if (hi(i, j) - lo(i, j) <= kFlat) ++info.degenerate_cells;
    for (auto& e : batch) {
        Matrix norm(d, f);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < f; ++j) {
                const double range = hi(i, j) - lo(i, j);
                norm(i, j) = range > kFlat ? (e.raw(i, j) - lo(i, j)) / range : 0.5;
            }
        e.normalized = std::move(norm);
        e.mode = mode;
    }
    return info;
}

Matrix gram(const ExplainMatrix& e, bool normalized_view) {
    const Matrix* m = &e.raw;
    if (normalized_view) {
        if (!e.normalized) throw ConfigError("gram: normalized view requested but not computed");
        m = &*e.normalized;
    }
    const int d = m->rows();
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const double s = dot(m->row(i), m->row(j));
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

namespace {

constexpr double kSymTol = 1e-9;
constexpr double kEigenFloor = -1e-10;

std::vector<double> psd_eigenvalues(const Matrix& a, const char* who, Matrix* vectors = nullptr) {
    if (a.rows() != a.cols()) throw ConfigError(std::string(who) + ": matrix must be square");
    if (max_abs_asymmetry(a) > kSymTol) throw ConfigError(std::string(who) + ": matrix is not symmetric");
    auto eig = jacobi_eigensolve(a);
    for (auto& lambda : eig.values) {
        if (lambda < kEigenFloor * std::max(1.0, std::abs(eig.values.back())))
            throw NumericalError(std::string(who) + ": matrix has a negative eigenvalue");
        lambda = std::max(lambda, 0.0);
    }
    if (vectors) *vectors = std::move(eig.vectors);
    return eig.values;
}

}  // namespace

double von_neumann_entropy(const Matrix& a) {
    const auto values = psd_eigenvalues(a, "von_neumann_entropy");
    double h = 0.0;
    for (double lambda : values)
        if (lambda > 0.0) h -= lambda * std::log(lambda);
    return h;
}

double bregman_divergence(const Matrix& a, const Matrix& b) {
    Matrix vb;
    const auto la = psd_eigenvalues(a, "bregman_divergence");
    const auto lb = psd_eigenvalues(b, "bregman_divergence", &vb);
    if (a.rows() != b.rows()) throw ConfigError("bregman_divergence: dimension mismatch");
    const int n = a.rows();

    double tr_a = 0.0, tr_b = 0.0, tr_a_log_a = 0.0;
    for (double lambda : la) {
        tr_a += lambda;
        if (lambda > 0.0) tr_a_log_a += lambda * std::log(lambda);
    }
    for (double mu : lb) tr_b += mu;

    const double zero_tol = 1e-12 * std::max(1.0, tr_b);
    double tr_a_log_b = 0.0;
    for (int j = 0; j < n; ++j) {
        // v_j^T A v_j: the weight A places on B's j-th eigendirection
        double weight = 0.0;
        for (int r = 0; r < n; ++r) {
            double av = 0.0;
            for (int c = 0; c < n; ++c) av += a(r, c) * vb(c, j);
            weight += vb(r, j) * av;
        }
        weight = std::max(weight, 0.0);
        if (lb[j] <= zero_tol) {
            if (weight > 1e-9 * std::max(1.0, tr_a))
                return std::numeric_limits<double>::infinity();  // support violation
            continue;
        }
        tr_a_log_b += weight * std::log(lb[j]);
    }
    return tr_a_log_a - tr_a_log_b - tr_a + tr_b;
}

double pinsker_gap(const Matrix& a, const Matrix& b) {
    if (std::abs(trace(a) - 1.0) > 1e-9 || std::abs(trace(b) - 1.0) > 1e-9)
        throw ConfigError("pinsker_gap: inputs must be trace-normalized (divide by the trace first)");
    const double d = bregman_divergence(a, b);
    Matrix diff(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) diff(i, j) = a(i, j) - b(i, j);
    // symmetric difference: nuclear norm is the sum of |eigenvalues|
    auto eig = jacobi_eigensolve(diff);
    double nuc = 0.0;
    for (double lambda : eig.values) nuc += std::abs(lambda);
    return d - 0.5 * nuc * nuc;
}

GramDiag gram_diagnostics(const ExplainMatrix& reference, const ExplainMatrix& other,
                          bool normalized_view) {
    GramDiag diag;
    diag.a = gram(reference, normalized_view);
    diag.b = gram(other, normalized_view);
    for (Matrix* m : {&diag.a, &diag.b}) {
        const double tr = trace(*m);
        if (tr <= 0.0) throw NumericalError("gram_diagnostics: gram matrix has non-positive trace");
        for (double& x : m->data()) x /= tr;
    }
    diag.entropy_a = von_neumann_entropy(diag.a);
    diag.entropy_b = von_neumann_entropy(diag.b);
    diag.divergence = bregman_divergence(diag.a, diag.b);
    diag.pinsker_gap = xm::pinsker_gap(diag.a, diag.b);
    return diag;
}

}  // namespace xm
