#pragma once

#include <cstdint>

#include "xm/alias.hpp"
#include "xm/embedding.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"
#include "xm/objective.hpp"

namespace xm {

// Skip-gram edge-sampling embedder with negative sampling. First order
// models edge proximity between vertex vectors directly; second order uses
// separate context vectors.
struct LineConfig {
    int order = 1;  // 1 or 2
    int d = 16;
    int epochs = 10;
    long long samples_per_epoch = 0;  // 0 picks 100 * edge_count
    int negatives = 5;
    double rho0 = 0.025;            // initial learning rate
    double rho_floor_ratio = 0.1;   // linear decay down to rho0 * ratio
    double noise_exponent = 0.75;   // negative sampling: degree^exponent
    XmConfig xm;
    std::uint64_t seed = 1;
};

// features is required (normalized) when cfg.xm is active; ignored otherwise.
EmbeddingMatrix line_train(const Graph& g, const LineConfig& cfg,
                           const FeatureMatrix* features = nullptr);

// Sampling distributions exposed for testing: edges proportional to weight,
// noise nodes proportional to weighted_degree^exponent.
AliasTable line_edge_table(const Graph& g);
AliasTable line_noise_table(const Graph& g, double exponent);

}  // namespace xm
