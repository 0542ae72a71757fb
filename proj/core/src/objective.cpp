#include "xm/objective.hpp"

#include <cmath>

#include "xm/errors.hpp"

namespace xm {

double sparsity_loss(const Matrix& raw) {
    double s = 0.0;
    for (double x : raw.data()) s += std::abs(x);
    return s;
}

double orthogonality_loss(const Matrix& raw, bool include_diagonal) {
    double s = 0.0;
    for (int i = 0; i < raw.rows(); ++i)
        for (int j = 0; j < raw.rows(); ++j) {
            if (i == j && !include_diagonal) continue;
            s += std::abs(dot(raw.row(i), raw.row(j)));
        }
    return s;
}

namespace {

void check_inputs(std::span<const double> y, std::span<const double> f, double& ny1, double& ny2,
                  double& nf1, double& nf2) {
    ny1 = l1_norm(y);
    ny2 = l2_norm(y);
    nf1 = l1_norm(f);
    nf2 = l2_norm(f);
    if (ny2 == 0.0) throw ConfigError("xm objective: embedding vector is zero (collapse)");
    if (nf2 == 0.0) throw ConfigError("xm objective: sense feature vector is zero");
}

}  // namespace

double xm_loss(std::span<const double> y, std::span<const double> f, const XmConfig& cfg) {
    double ny1, ny2, nf1, nf2;
    check_inputs(y, f, ny1, ny2, nf1, nf2);
    const double sparse = ny1 * nf1 / (ny2 * nf2);
    double ortho = (ny1 * ny1 - ny2 * ny2) / (ny2 * ny2);
    if (cfg.include_diagonal) ortho += 1.0;
    return cfg.gamma * sparse + cfg.delta * ortho;
}

void xm_gradient_into(std::span<const double> y, double feature_ratio, double delta,
                      std::span<double> grad_out) {
    const double ny1 = l1_norm(y);
    const double ny2 = l2_norm(y);
    const double inv2 = 1.0 / (ny2 * ny2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double sign = y[i] > 0.0 ? 1.0 : (y[i] < 0.0 ? -1.0 : 0.0);
        const double sparse = feature_ratio * (sign / ny2 - ny1 * y[i] / (ny2 * ny2 * ny2));
        // the diagonal adds a constant to the orthogonality sum, so its
        // gradient is the same in both modes
        const double ortho = delta * (2.0 * ny1 * sign * inv2 - 2.0 * ny1 * ny1 * y[i] * inv2 * inv2);
        grad_out[i] = sparse + ortho;
    }
}

void xm_gradient_accumulate(std::span<const double> y, double feature_ratio, double delta,
                            double step, std::span<double> y_inout) {
    const double ny1 = l1_norm(y);
    const double ny2 = l2_norm(y);
    const double inv2 = 1.0 / (ny2 * ny2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double sign = y[i] > 0.0 ? 1.0 : (y[i] < 0.0 ? -1.0 : 0.0);
        const double sparse = feature_ratio * (sign / ny2 - ny1 * y[i] / (ny2 * ny2 * ny2));
        const double ortho = delta * (2.0 * ny1 * sign * inv2 - 2.0 * ny1 * ny1 * y[i] * inv2 * inv2);
        y_inout[i] += step * (sparse + ortho);
    }
}

std::vector<double> xm_gradient(std::span<const double> y, std::span<const double> f,
                                const XmConfig& cfg) {
    double ny1, ny2, nf1, nf2;
    check_inputs(y, f, ny1, ny2, nf1, nf2);
    std::vector<double> grad(y.size(), 0.0);
    xm_gradient_into(y, cfg.gamma * nf1 / nf2, cfg.delta, grad);
    return grad;
}

}  // namespace xm
