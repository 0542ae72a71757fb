#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "xm/embedding.hpp"
#include "xm/explain.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"
#include "xm/line.hpp"
#include "xm/sdne.hpp"

namespace xm {

// Edge split for link prediction: positives partitioned into train/test,
// negatives sampled from the non-edges of the original graph without
// replacement, matched in count per partition.
struct LinkSplit {
    Graph train_graph;  // positive training edges only
    std::vector<std::pair<int, int>> train_pos, train_neg, test_pos, test_neg;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
    bool resampled = false;  // split retried to avoid isolated training nodes
};

LinkSplit make_split(const Graph& g, double train_fraction, std::uint64_t seed);

enum class Combiner { Concat, Hadamard, Average };
Combiner combiner_from_name(std::string_view name);
std::string combiner_name(Combiner c);

// Pair feature for (u, v). Concat orders endpoints by id so the feature is
// symmetric; hadamard and average are symmetric already.
std::vector<double> edge_features(const EmbeddingMatrix& emb, int u, int v, Combiner combiner);

struct ClassifierConfig {
    int hidden = 64;
    int epochs = 300;
    double lr = 0.01;
    std::uint64_t seed = 1;
};

// input -> hidden (ReLU) -> logit, logistic loss, full-batch gradient
// descent.
class LinkClassifier {
public:
    LinkClassifier() = default;
    LinkClassifier(int input_dim, int hidden, std::uint64_t seed);

    void fit(const Matrix& x, const std::vector<int>& labels, int epochs, double lr);
    double score(std::span<const double> features) const;  // probability of an edge
    std::vector<double> score_all(const Matrix& x) const;
    double train_accuracy(const Matrix& x, const std::vector<int>& labels) const;

    const std::vector<double>& weights() const { return params_; }

private:
    int input_dim_ = 0;
    int hidden_ = 0;
    std::vector<double> params_;  // w1 (in x h), b1 (h), w2 (h), b2
};

LinkClassifier train_link_classifier(const Matrix& x, const std::vector<int>& labels,
                                     const ClassifierConfig& cfg);

// Mann-Whitney AUC with midrank tie handling.
double auc(std::span<const double> scores, std::span<const int> labels);

// Embedder selection for the harness: exactly one of the two configs is
// active.
struct EmbedderConfig {
    std::variant<LineConfig, SdneConfig> method;

    std::string method_name() const;
    XmConfig& xm();
    const XmConfig& xm() const;
    void set_seed(std::uint64_t seed);
    EmbedderConfig with_xm(double gamma, double delta) const;
};

EmbeddingMatrix train_embedding(const Graph& g, const EmbedderConfig& cfg,
                                const FeatureMatrix* features);

struct NormSummary {
    std::vector<double> per_node;
    double mean = 0.0;
    double se = 0.0;
    bool degenerate = false;  // every cell constant across the population
};

// Nuclear norm of each node's normalized explain matrix.
NormSummary norm_distribution(const EmbeddingMatrix& emb, const FeatureMatrix& features,
                              ExplainNorm mode = ExplainNorm::Population);

struct VariantResult {
    std::vector<double> fold_auc;
    double auc_mean = 0.0;
    double auc_se = 0.0;
    std::vector<double> fold_norm_mean;
    double norm_mean = 0.0;
    double norm_se = 0.0;
    double sec_per_epoch = 0.0;
};

struct EvalReport {
    std::string dataset;
    std::string method;
    int folds = 0;
    std::uint64_t seed = 0;
    double gamma = 0.0;
    double delta = 0.0;
    Combiner combiner = Combiner::Concat;
    VariantResult base;
    std::optional<VariantResult> xm;        // present when xm weights are set
    std::optional<double> p_value_norms;    // Welch, base vs xm fold norms
};

struct LinkPredictionOptions {
    double train_fraction = 0.6;
    Combiner combiner = Combiner::Concat;
    ClassifierConfig classifier;
    std::vector<Feature> feature_set = default_feature_set();
    int workers = 1;
    std::string dataset_name = "graph";
};

// Per fold: fresh split, embed the train graph, featurize, classify, score
// the held-out edges. When the config carries xm weights the base variant
// (gamma = delta = 0) runs on the same folds for comparison.
EvalReport run_link_prediction(const Graph& g, const EmbedderConfig& cfg, int folds,
                               std::uint64_t seed, const LinkPredictionOptions& opts = {});

struct AblationCell {
    std::string name;  // none | sparsity | orthogonality | both
    double gamma = 0.0;
    double delta = 0.0;
    std::vector<double> per_seed_norm_mean;
    double norm_mean = 0.0;
    double norm_se = 0.0;
    double sec_per_epoch = 0.0;
};

struct AblationTable {
    std::string dataset;
    std::string method;
    std::vector<AblationCell> cells;  // none, sparsity, orthogonality, both
};

// Four-configuration sweep over explanation constraints; the xm weights in
// cfg are the "on" values for each constraint.
AblationTable ablation(const Graph& g, const EmbedderConfig& cfg,
                       const std::vector<std::uint64_t>& seeds,
                       const LinkPredictionOptions& opts = {});

}  // namespace xm
