#include "xm/sdne.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "xm/errors.hpp"
#include "xm/parallel.hpp"
#include "xm/rng.hpp"

namespace xm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void validate(const Graph& g, const SdneConfig& cfg, const FeatureMatrix* features) {
    if (cfg.d < 1) throw ConfigError("sdne: d must be positive");
    if (cfg.epochs < 1) throw ConfigError("sdne: epochs must be at least 1");
    if (!(cfg.lr > 0.0)) throw ConfigError("sdne: learning rate must be positive");
    if (!(cfg.beta_pen > 1.0)) throw ConfigError("sdne: beta_pen must be greater than 1");
    if (cfg.alpha < 0.0 || cfg.beta_recon < 0.0 || cfg.nu < 0.0)
        throw ConfigError("sdne: loss weights must be non-negative");
    if (cfg.batch_nodes < 0) throw ConfigError("sdne: batch_nodes must be non-negative");
    for (int h : cfg.hidden)
        if (h < 1) throw ConfigError("sdne: hidden sizes must be positive");
    if (g.edge_count() == 0) throw ConfigError("sdne: graph has no edges");
    if (cfg.xm.active()) {
        if (!features) throw ConfigError("sdne: xm is enabled but no feature matrix was given");
        if (!features->normalized) throw ConfigError("sdne: feature matrix must be normalized");
        if (features->values.rows() != g.node_count())
            throw ConfigError("sdne: feature matrix row count does not match the graph");
    }
}

}  // namespace

SdneModel::SdneModel(const Graph& g, const SdneConfig& cfg, const FeatureMatrix* features)
    : graph_(g), cfg_(cfg), features_(features) {
    validate(g, cfg, features);
    const int n = g.node_count();
    sizes_.push_back(n);
    for (int h : cfg.hidden) sizes_.push_back(h);
    sizes_.push_back(cfg.d);
    for (auto it = cfg.hidden.rbegin(); it != cfg.hidden.rend(); ++it) sizes_.push_back(*it);
    sizes_.push_back(n);
    code_layer_ = static_cast<int>(cfg.hidden.size());

    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        LayerShape shape;
        shape.in = sizes_[l];
        shape.out = sizes_[l + 1];
        shape.w_offset = offset;
        offset += static_cast<std::size_t>(shape.in) * shape.out;
        shape.b_offset = offset;
        offset += shape.out;
        layers_.push_back(shape);
    }
    params_.resize(offset);

    auto rng = make_rng(cfg.seed);
    for (const auto& layer : layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        std::uniform_real_distribution<double> init(-bound, bound);
        for (std::size_t k = 0; k < static_cast<std::size_t>(layer.in) * layer.out; ++k)
            params_[layer.w_offset + k] = init(rng);
        // biases start at zero
    }

    feature_ratio_.assign(n, 0.0);
    if (cfg.xm.active() && features) {
        for (int v = 0; v < n; ++v) {
            const double nf1 = l1_norm(features->values.row(v));
            const double nf2 = l2_norm(features->values.row(v));
            feature_ratio_[v] = nf2 > 0.0 ? cfg.xm.gamma * nf1 / nf2 : 0.0;
        }
    }
}

Matrix SdneModel::forward(std::vector<Matrix>* activations, const std::vector<int>* nodes) const {
    const int rows = nodes ? static_cast<int>(nodes->size()) : graph_.node_count();
    const int layer_count = static_cast<int>(layers_.size());
    if (activations) activations->assign(layer_count, Matrix());

    Matrix current;
    for (int l = 0; l < layer_count; ++l) {
        const auto& shape = layers_[l];
        const double* w = params_.data() + shape.w_offset;
        const double* b = params_.data() + shape.b_offset;
        Matrix out(rows, shape.out);
        if (l == 0) {
            // input rows are adjacency rows; accumulate weight rows sparsely
            parallel_for(rows, cfg_.workers, [&](int r) {
                const int node = nodes ? (*nodes)[r] : r;
                double* row = out.row(r).data();
                for (int j = 0; j < shape.out; ++j) row[j] = b[j];
                for (const auto& nb : graph_.neighbors(node)) {
                    const double* w_row = w + static_cast<std::size_t>(nb.id) * shape.out;
                    for (int j = 0; j < shape.out; ++j) row[j] += nb.w * w_row[j];
                }
                for (int j = 0; j < shape.out; ++j) row[j] = sigmoid(row[j]);
            });
        } else {
            const Matrix& input = current;
            parallel_for(rows, cfg_.workers, [&](int r) {
                double* row = out.row(r).data();
                for (int j = 0; j < shape.out; ++j) row[j] = b[j];
                const double* in_row = input.row(r).data();
                for (int k = 0; k < shape.in; ++k) {
                    const double x = in_row[k];
                    if (x == 0.0) continue;
                    const double* w_row = w + static_cast<std::size_t>(k) * shape.out;
                    for (int j = 0; j < shape.out; ++j) row[j] += x * w_row[j];
                }
                for (int j = 0; j < shape.out; ++j) row[j] = sigmoid(row[j]);
            });
        }
        if (activations) (*activations)[l] = out;
        current = std::move(out);
    }
    return current;
}

Matrix SdneModel::codes() const {
    std::vector<Matrix> acts;
    forward(&acts);
    return acts[code_layer_];
}

double SdneModel::loss() const {
    std::vector<double> scratch(params_.size());
    return loss_and_gradient(scratch).total();
}

SdneLossTerms SdneModel::batch_gradient(const std::vector<int>& nodes,
                                        std::vector<double>& grad) const {
    const int n = graph_.node_count();
    const int rows = static_cast<int>(nodes.size());
    const int layer_count = static_cast<int>(layers_.size());
    grad.assign(params_.size(), 0.0);

    std::vector<Matrix> acts;
    forward(&acts, &nodes);
    const Matrix& output = acts[layer_count - 1];
    const Matrix& code = acts[code_layer_];

    SdneLossTerms terms;

    // reconstruction: (xhat - x) entries weighted by beta_pen on edges
    Matrix d_act(rows, n);
    std::vector<double> recon_partial(rows, 0.0);
    const double pen_sq = cfg_.beta_pen * cfg_.beta_pen;
    parallel_for(rows, cfg_.workers, [&](int r) {
        const int node = nodes[r];
        double* d_row = d_act.row(r).data();
        const double* out_row = output.row(r).data();
        double local = 0.0;
        for (int j = 0; j < n; ++j) {
            const double diff = out_row[j];
            local += diff * diff;
            d_row[j] = 2.0 * cfg_.beta_recon * diff;
        }
        for (const auto& nb : graph_.neighbors(node)) {
            const double diff = out_row[nb.id] - nb.w;
            const double plain = out_row[nb.id];
            local += diff * diff * pen_sq - plain * plain;
            d_row[nb.id] = 2.0 * cfg_.beta_recon * diff * pen_sq;
        }
        recon_partial[r] = local;
    });
    for (double x : recon_partial) terms.reconstruction += x;
    terms.reconstruction *= cfg_.beta_recon;

    // gradients flowing directly into the code activations
    Matrix d_code(rows, cfg_.d);
    {
        // first-order proximity over the edges inside this node set
        std::vector<int> local(n, -1);
        for (int r = 0; r < rows; ++r) local[nodes[r]] = r;
        for (int r = 0; r < rows; ++r) {
            const int u = nodes[r];
            for (const auto& nb : graph_.neighbors(u)) {
                if (nb.id <= u) continue;  // each edge once
                const int s = local[nb.id];
                if (s < 0) continue;
                const double* yu = code.row(r).data();
                const double* yv = code.row(s).data();
                double* du = d_code.row(r).data();
                double* dv = d_code.row(s).data();
                double dist = 0.0;
                for (int k = 0; k < cfg_.d; ++k) {
                    const double diff = yu[k] - yv[k];
                    dist += diff * diff;
                    du[k] += 2.0 * cfg_.alpha * nb.w * diff;
                    dv[k] -= 2.0 * cfg_.alpha * nb.w * diff;
                }
                terms.first_order += cfg_.alpha * nb.w * dist;
            }
        }
    }
    if (cfg_.xm.active()) {
        for (int r = 0; r < rows; ++r) {
            const auto y = code.row(r);
            const double ny1 = l1_norm(y);
            const double ny2 = l2_norm(y);
            if (ny2 == 0.0) continue;  // sigmoid codes are strictly positive
            terms.sparsity += feature_ratio_[nodes[r]] * ny1 / ny2;
            terms.orthogonality +=
                cfg_.xm.delta * ((ny1 * ny1 - ny2 * ny2) / (ny2 * ny2) +
                                 (cfg_.xm.include_diagonal ? 1.0 : 0.0));
            xm_gradient_accumulate(y, feature_ratio_[nodes[r]], cfg_.xm.delta, 1.0, d_code.row(r));
        }
    }

    // backward pass
    Matrix d_upper = std::move(d_act);
    for (int l = layer_count - 1; l >= 0; --l) {
        const auto& shape = layers_[l];
        if (l == code_layer_) {
            for (std::size_t k = 0; k < d_upper.data().size(); ++k)
                d_upper.data()[k] += d_code.data()[k];
        }
        Matrix& delta = d_upper;  // becomes dL/dZ in place
        const Matrix& act = acts[l];
        parallel_for(rows, cfg_.workers, [&](int r) {
            double* d_row = delta.row(r).data();
            const double* a_row = act.row(r).data();
            for (int j = 0; j < shape.out; ++j) d_row[j] *= a_row[j] * (1.0 - a_row[j]);
        });

        double* g_w = grad.data() + shape.w_offset;
        double* g_b = grad.data() + shape.b_offset;
        for (int r = 0; r < rows; ++r) {
            const double* d_row = delta.row(r).data();
            for (int j = 0; j < shape.out; ++j) g_b[j] += d_row[j];
        }
        if (l == 0) {
            // input rows are adjacency rows: gW[k,:] += w_rk * delta[r,:]
            for (int r = 0; r < rows; ++r) {
                const double* d_row = delta.row(r).data();
                for (const auto& nb : graph_.neighbors(nodes[r])) {
                    double* g_row = g_w + static_cast<std::size_t>(nb.id) * shape.out;
                    for (int j = 0; j < shape.out; ++j) g_row[j] += nb.w * d_row[j];
                }
            }
        } else {
            const Matrix& below = acts[l - 1];
            // gW = below^T * delta, parallel over input dimension k
            parallel_for(shape.in, cfg_.workers, [&](int k) {
                double* g_row = g_w + static_cast<std::size_t>(k) * shape.out;
                for (int r = 0; r < rows; ++r) {
                    const double x = below(r, k);
                    if (x == 0.0) continue;
                    const double* d_row = delta.row(r).data();
                    for (int j = 0; j < shape.out; ++j) g_row[j] += x * d_row[j];
                }
            });
            // dL/d(below) = delta * W^T
            const double* w = params_.data() + shape.w_offset;
            Matrix d_below(rows, shape.in);
            parallel_for(rows, cfg_.workers, [&](int r) {
                const double* d_row = delta.row(r).data();
                double* out_row = d_below.row(r).data();
                for (int k = 0; k < shape.in; ++k) {
                    const double* w_row = w + static_cast<std::size_t>(k) * shape.out;
                    double s = 0.0;
                    for (int j = 0; j < shape.out; ++j) s += d_row[j] * w_row[j];
                    out_row[k] = s;
                }
            });
            d_upper = std::move(d_below);
        }
    }

    // weight decay on weights (not biases)
    for (const auto& shape : layers_) {
        const std::size_t count = static_cast<std::size_t>(shape.in) * shape.out;
        double frob = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const double w = params_[shape.w_offset + k];
            frob += w * w;
            grad[shape.w_offset + k] += 2.0 * cfg_.nu * w;
        }
        terms.regularization += cfg_.nu * frob;
    }
    return terms;
}

SdneLossTerms SdneModel::loss_and_gradient(std::vector<double>& grad) const {
    std::vector<int> all(graph_.node_count());
    std::iota(all.begin(), all.end(), 0);
    return batch_gradient(all, grad);
}

SdneLossTerms SdneModel::step(double lr) {
    std::vector<double> grad;
    const auto terms = loss_and_gradient(grad);
    for (std::size_t k = 0; k < params_.size(); ++k) params_[k] -= lr * grad[k];
    return terms;
}

SdneLossTerms SdneModel::minibatch_epoch(double lr, int epoch_index) {
    const int n = graph_.node_count();
    const int batch = std::min(cfg_.batch_nodes, n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(derive_seed(cfg_.seed, 7000 + epoch_index));
    std::shuffle(order.begin(), order.end(), rng);

    SdneLossTerms epoch_terms;
    std::vector<double> grad;
    std::vector<int> chunk;
    for (int begin = 0; begin < n; begin += batch) {
        chunk.assign(order.begin() + begin,
                     order.begin() + std::min<std::size_t>(begin + batch, n));
        const auto terms = batch_gradient(chunk, grad);
        for (std::size_t k = 0; k < params_.size(); ++k) params_[k] -= lr * grad[k];
        epoch_terms.first_order += terms.first_order;
        epoch_terms.reconstruction += terms.reconstruction;
        epoch_terms.regularization += terms.regularization;
        epoch_terms.sparsity += terms.sparsity;
        epoch_terms.orthogonality += terms.orthogonality;
    }
    return epoch_terms;
}

EmbeddingMatrix sdne_train(const Graph& g, const SdneConfig& cfg, const FeatureMatrix* features) {
    SdneModel model(g, cfg, features);
    EmbeddingMatrix emb;
    emb.d = cfg.d;
    emb.method = "sdne";
    emb.xm_enabled = cfg.xm.active();
    emb.seed = cfg.seed;
    emb.epochs = cfg.epochs;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto terms =
            cfg.batch_nodes > 0 ? model.minibatch_epoch(cfg.lr, epoch) : model.step(cfg.lr);
        const auto t1 = std::chrono::steady_clock::now();
        emb.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        if (!std::isfinite(terms.total()))
            throw NumericalError("sdne: loss diverged at epoch " + std::to_string(epoch));
    }
    emb.values = model.codes();
    for (int v = 0; v < g.node_count(); ++v) {
        const double norm = l2_norm(emb.values.row(v));
        if (!std::isfinite(norm)) throw NumericalError("sdne: non-finite embedding after training");
        if (norm < 1e-12) throw NumericalError("sdne: embedding collapse for node " + std::to_string(v));
    }
    return emb;
}

}  // namespace xm
