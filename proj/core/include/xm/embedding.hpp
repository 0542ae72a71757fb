#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xm/dense.hpp"

namespace xm {

// Trained node embeddings plus the provenance needed to reproduce them.
struct EmbeddingMatrix {
    Matrix values;  // n x d
    int d = 0;
    std::string method;  // line1 | line2 | sdne
    bool xm_enabled = false;
    std::uint64_t seed = 0;
    int epochs = 0;
    std::vector<double> epoch_seconds;
};

// One wall-clock duration per training epoch.
inline const std::vector<double>& epoch_timings(const EmbeddingMatrix& emb) {
    return emb.epoch_seconds;
}

}  // namespace xm
