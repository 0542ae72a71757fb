#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xm/embedding.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"
#include "xm/objective.hpp"

namespace xm {

// Deep autoencoder embedder over adjacency rows. The total loss is
//   alpha * sum_{(i,j) in E} w_ij |y_i - y_j|^2
// + beta_recon * sum_i |(xhat_i - x_i) . b_i|^2    (b_ij = beta_pen on edges)
// + nu * sum_layers |W|_F^2
// + gamma/delta explanation terms on each code vector.
struct SdneConfig {
    int d = 16;
    std::vector<int> hidden = {256};
    int epochs = 50;
    double lr = 0.1;
    double alpha = 0.2;        // first-order proximity weight
    double beta_recon = 1.0;   // reconstruction weight
    double nu = 1e-4;          // weight decay
    double beta_pen = 2.0;     // > 1, reweights reconstruction of nonzero entries
    int batch_nodes = 0;       // minibatch size; 0 trains full-batch
    XmConfig xm;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct SdneLossTerms {
    double first_order = 0.0;
    double reconstruction = 0.0;
    double regularization = 0.0;
    double sparsity = 0.0;
    double orthogonality = 0.0;
    double total() const {
        return first_order + reconstruction + regularization + sparsity + orthogonality;
    }
};

// Full-batch model with all parameters in one flat vector so the gradient
// can be certified against finite differences.
class SdneModel {
public:
    SdneModel(const Graph& g, const SdneConfig& cfg, const FeatureMatrix* features = nullptr);

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

    // Forward + handwritten backprop over the whole graph. Fills grad
    // (same layout as parameters) and returns the loss terms at the current
    // parameters. Deterministic for every worker count.
    SdneLossTerms loss_and_gradient(std::vector<double>& grad) const;
    double loss() const;

    // One full-batch gradient descent step; returns the pre-step loss.
    SdneLossTerms step(double lr);

    // One pass over all nodes in seeded-shuffled minibatches, one descent
    // step per batch. The pair term covers the edges whose endpoints share a
    // batch. Returns the summed pre-step batch losses.
    SdneLossTerms minibatch_epoch(double lr, int epoch_index);

    Matrix codes() const;  // encoder outputs for all nodes, n x d

private:
    struct LayerShape {
        int in = 0;
        int out = 0;
        std::size_t w_offset = 0;
        std::size_t b_offset = 0;
    };

    Matrix forward(std::vector<Matrix>* activations,
                   const std::vector<int>* nodes = nullptr) const;
    SdneLossTerms batch_gradient(const std::vector<int>& nodes, std::vector<double>& grad) const;

    const Graph& graph_;
    SdneConfig cfg_;
    const FeatureMatrix* features_ = nullptr;
    std::vector<int> sizes_;        // n, hidden..., d, hidden reversed..., n
    std::vector<LayerShape> layers_;
    std::vector<double> params_;
    int code_layer_ = 0;            // index into activations for the code
    std::vector<double> feature_ratio_;  // gamma * |f|_1 / |f|_2 per node
};

EmbeddingMatrix sdne_train(const Graph& g, const SdneConfig& cfg,
                           const FeatureMatrix* features = nullptr);

}  // namespace xm
