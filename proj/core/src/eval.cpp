#include "xm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "xm/errors.hpp"
#include "xm/rng.hpp"
#include "xm/stats_util.hpp"

namespace xm {

namespace {

constexpr int kMaxSplitAttempts = 200;

bool try_split(const Graph& g, double train_fraction, std::uint64_t seed, LinkSplit& out) {
    const int n = g.node_count();
    const long long m = g.edge_count();
    auto rng = make_rng(seed);

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int train_count = static_cast<int>(std::llround(train_fraction * m));

    out.train_pos.clear();
    out.test_pos.clear();
    std::vector<Edge> train_edges;
    for (long long k = 0; k < m; ++k) {
        const Edge& e = g.edges()[order[k]];
        if (k < train_count) {
            out.train_pos.emplace_back(e.u, e.v);
            train_edges.push_back(e);
        } else {
            out.test_pos.emplace_back(e.u, e.v);
        }
    }

    // negatives: uniform non-edges of the original graph, no replacement
    const long long non_edges = static_cast<long long>(n) * (n - 1) / 2 - m;
    if (non_edges < m)
        throw ConfigError("make_split: graph too dense to sample matched negative edges");
    std::unordered_set<long long> used;
    std::uniform_int_distribution<int> pick(0, n - 1);
    auto draw_negatives = [&](std::size_t count, std::vector<std::pair<int, int>>& dst) {
        dst.clear();
        while (dst.size() < count) {
            int u = pick(rng);
            int v = pick(rng);
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (g.has_edge(u, v)) continue;
            const long long key = static_cast<long long>(u) * n + v;
            if (!used.insert(key).second) continue;
            dst.emplace_back(u, v);
        }
    };
    draw_negatives(out.train_pos.size(), out.train_neg);
    draw_negatives(out.test_pos.size(), out.test_neg);

    out.train_graph = Graph::from_edges(n, std::move(train_edges), g.labels());
    for (int v = 0; v < n; ++v)
        if (out.train_graph.degree(v) == 0) return false;
    return true;
}

}  // namespace

LinkSplit make_split(const Graph& g, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("make_split: train_fraction must be in (0, 1)");
    if (g.edge_count() < 2) throw ConfigError("make_split: graph has too few edges to split");

    LinkSplit split;
    split.seed = seed;
    split.train_fraction = train_fraction;
    for (int attempt = 0; attempt < kMaxSplitAttempts; ++attempt) {
        if (try_split(g, train_fraction, derive_seed(seed, attempt), split)) {
            split.resampled = attempt > 0;
            return split;
        }
    }
    throw NumericalError("make_split: could not draw a train graph without isolated nodes");
}

Combiner combiner_from_name(std::string_view name) {
    if (name == "concat") return Combiner::Concat;
    if (name == "hadamard") return Combiner::Hadamard;
    if (name == "average") return Combiner::Average;
    throw ConfigError("unknown combiner; valid names: concat hadamard average");
}

std::string combiner_name(Combiner c) {
    switch (c) {
        case Combiner::Concat: return "concat";
        case Combiner::Hadamard: return "hadamard";
        case Combiner::Average: return "average";
    }
    return "concat";
}

std::vector<double> edge_features(const EmbeddingMatrix& emb, int u, int v, Combiner combiner) {
    if (u < 0 || v < 0 || u >= emb.values.rows() || v >= emb.values.rows())
        throw ConfigError("edge_features: node id out of range");
    const auto yu = emb.values.row(std::min(u, v));
    const auto yv = emb.values.row(std::max(u, v));
    const int d = emb.values.cols();
    std::vector<double> out;
    switch (combiner) {
        case Combiner::Concat:
            out.reserve(2 * d);
            out.insert(out.end(), yu.begin(), yu.end());
            out.insert(out.end(), yv.begin(), yv.end());
            break;
        case Combiner::Hadamard:
            out.resize(d);
            for (int k = 0; k < d; ++k) out[k] = yu[k] * yv[k];
            break;
        case Combiner::Average:
            out.resize(d);
            for (int k = 0; k < d; ++k) out[k] = 0.5 * (yu[k] + yv[k]);
            break;
    }
    return out;
}

LinkClassifier::LinkClassifier(int input_dim, int hidden, std::uint64_t seed)
    : input_dim_(input_dim), hidden_(hidden) {
    if (input_dim < 1 || hidden < 1) throw ConfigError("LinkClassifier: bad dimensions");
    params_.assign(static_cast<std::size_t>(input_dim) * hidden + hidden + hidden + 1, 0.0);
    auto rng = make_rng(seed);
    const double bound1 = std::sqrt(2.0 / input_dim);
    const double bound2 = std::sqrt(2.0 / hidden);
    std::uniform_real_distribution<double> init1(-bound1, bound1);
    std::uniform_real_distribution<double> init2(-bound2, bound2);
    for (int k = 0; k < input_dim * hidden; ++k) params_[k] = init1(rng);
    double* w2 = params_.data() + static_cast<std::size_t>(input_dim) * hidden + hidden;
    for (int k = 0; k < hidden; ++k) w2[k] = init2(rng);
}

void LinkClassifier::fit(const Matrix& x, const std::vector<int>& labels, int epochs, double lr) {
    const int n = x.rows();
    if (n != static_cast<int>(labels.size())) throw ConfigError("LinkClassifier: label count mismatch");
    double* w1 = params_.data();
    double* b1 = w1 + static_cast<std::size_t>(input_dim_) * hidden_;
    double* w2 = b1 + hidden_;
    double* b2 = w2 + hidden_;

    std::vector<double> grad(params_.size(), 0.0);
    Matrix h(n, hidden_);
    std::vector<double> dlogit(n);
    const double inv_n = 1.0 / n;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double* g_w1 = grad.data();
        double* g_b1 = g_w1 + static_cast<std::size_t>(input_dim_) * hidden_;
        double* g_w2 = g_b1 + hidden_;
        double* g_b2 = g_w2 + hidden_;
        for (int i = 0; i < n; ++i) {
            const double* xi = x.row(i).data();
            double* hi = h.row(i).data();
            for (int j = 0; j < hidden_; ++j) {
                double z = b1[j];
                const double* w_col = w1 + j;
                for (int k = 0; k < input_dim_; ++k) z += xi[k] * w_col[static_cast<std::size_t>(k) * hidden_];
                hi[j] = z > 0.0 ? z : 0.0;
            }
            double logit = *b2;
            for (int j = 0; j < hidden_; ++j) logit += hi[j] * w2[j];
            const double p = 1.0 / (1.0 + std::exp(-logit));
            dlogit[i] = (p - labels[i]) * inv_n;
        }
        for (int i = 0; i < n; ++i) {
            const double* xi = x.row(i).data();
            const double* hi = h.row(i).data();
            const double dz = dlogit[i];
            *g_b2 += dz;
            for (int j = 0; j < hidden_; ++j) {
                g_w2[j] += dz * hi[j];
                if (hi[j] > 0.0) {
                    const double dh = dz * w2[j];
                    g_b1[j] += dh;
                    double* g_col = g_w1 + j;
                    for (int k = 0; k < input_dim_; ++k)
                        g_col[static_cast<std::size_t>(k) * hidden_] += dh * xi[k];
                }
            }
        }
        for (std::size_t k = 0; k < params_.size(); ++k) params_[k] -= lr * grad[k];
    }
}

double LinkClassifier::score(std::span<const double> features) const {
    const double* w1 = params_.data();
    const double* b1 = w1 + static_cast<std::size_t>(input_dim_) * hidden_;
    const double* w2 = b1 + hidden_;
    const double* b2 = w2 + hidden_;
    double logit = *b2;
    for (int j = 0; j < hidden_; ++j) {
        double z = b1[j];
        for (int k = 0; k < input_dim_; ++k) z += features[k] * w1[static_cast<std::size_t>(k) * hidden_ + j];
        if (z > 0.0) logit += z * w2[j];
    }
    return 1.0 / (1.0 + std::exp(-logit));
}

std::vector<double> LinkClassifier::score_all(const Matrix& x) const {
    std::vector<double> scores(x.rows());
    for (int i = 0; i < x.rows(); ++i) scores[i] = score(x.row(i));
    return scores;
}

double LinkClassifier::train_accuracy(const Matrix& x, const std::vector<int>& labels) const {
    int hits = 0;
    for (int i = 0; i < x.rows(); ++i) hits += (score(x.row(i)) >= 0.5) == (labels[i] == 1);
    return static_cast<double>(hits) / x.rows();
}

LinkClassifier train_link_classifier(const Matrix& x, const std::vector<int>& labels,
                                     const ClassifierConfig& cfg) {
    int pos = 0, neg = 0;
    for (int label : labels) (label == 1 ? pos : neg) += 1;
    if (pos < 2 || neg < 2)
        throw ConfigError("train_link_classifier: need at least 2 examples of each class");
    LinkClassifier clf(x.cols(), cfg.hidden, cfg.seed);
    clf.fit(x, labels, cfg.epochs, cfg.lr);
    return clf;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ConfigError("auc: size mismatch");
    std::size_t pos = 0, neg = 0;
    for (int label : labels) (label == 1 ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw ConfigError("auc: both classes must be present");

    // midranks
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k)
        if (labels[k] == 1) rank_sum_pos += rank[k];
    const double u = rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

std::string EmbedderConfig::method_name() const {
    if (const auto* line = std::get_if<LineConfig>(&method))
        return line->order == 1 ? "line1" : "line2";
    return "sdne";
}

XmConfig& EmbedderConfig::xm() {
    if (auto* line = std::get_if<LineConfig>(&method)) return line->xm;
    return std::get<SdneConfig>(method).xm;
}

const XmConfig& EmbedderConfig::xm() const {
    if (const auto* line = std::get_if<LineConfig>(&method)) return line->xm;
    return std::get<SdneConfig>(method).xm;
}

void EmbedderConfig::set_seed(std::uint64_t seed) {
    if (auto* line = std::get_if<LineConfig>(&method))
        line->seed = seed;
    else
        std::get<SdneConfig>(method).seed = seed;
}

EmbedderConfig EmbedderConfig::with_xm(double gamma, double delta) const {
    EmbedderConfig out = *this;
    out.xm().gamma = gamma;
    out.xm().delta = delta;
    return out;
}

EmbeddingMatrix train_embedding(const Graph& g, const EmbedderConfig& cfg,
                                const FeatureMatrix* features) {
    if (const auto* line = std::get_if<LineConfig>(&cfg.method)) return line_train(g, *line, features);
    return sdne_train(g, std::get<SdneConfig>(cfg.method), features);
}

NormSummary norm_distribution(const EmbeddingMatrix& emb, const FeatureMatrix& features,
                              ExplainNorm mode) {
    if (emb.values.rows() != features.values.rows())
        throw ConfigError("norm_distribution: embedding and feature row counts differ");
    const int n = emb.values.rows();
    std::vector<ExplainMatrix> batch;
    batch.reserve(n);
    for (int v = 0; v < n; ++v) {
        batch.push_back(explain_matrix(emb.values.row(v), features.values.row(v)));
        batch.back().node_id = v;
    }
    const auto info = normalize_explain(batch, mode);
    NormSummary summary;
    summary.per_node.resize(n);
    for (int v = 0; v < n; ++v) summary.per_node[v] = nuclear_norm(*batch[v].normalized);
    summary.mean = mean(summary.per_node);
    summary.se = standard_error(summary.per_node);
    summary.degenerate =
        info.degenerate_cells == emb.values.cols() * features.values.cols();
    return summary;
}

namespace {

Matrix featurize_pairs(const EmbeddingMatrix& emb,
                       const std::vector<std::pair<int, int>>& pos,
                       const std::vector<std::pair<int, int>>& neg, Combiner combiner,
                       std::vector<int>& labels) {
    const std::size_t total = pos.size() + neg.size();
    labels.clear();
    labels.reserve(total);
    Matrix x;
    std::size_t row = 0;
    auto append = [&](const std::vector<std::pair<int, int>>& pairs, int label) {
        for (const auto& [u, v] : pairs) {
            const auto f = edge_features(emb, u, v, combiner);
            if (x.empty()) x = Matrix(static_cast<int>(total), static_cast<int>(f.size()));
            std::copy(f.begin(), f.end(), x.row(static_cast<int>(row)).begin());
            labels.push_back(label);
            ++row;
        }
    };
    append(pos, 1);
    append(neg, 0);
    return x;
}

VariantResult eval_variant(const EmbedderConfig& cfg, int folds, std::uint64_t seed,
                           const LinkPredictionOptions& opts,
                           const std::vector<LinkSplit>& splits,
                           const std::vector<FeatureMatrix>& fold_features) {
    VariantResult result;
    double epoch_secs = 0.0;
    long long epochs = 0;
    for (int fold = 0; fold < folds; ++fold) {
        const LinkSplit& split = splits[fold];
        EmbedderConfig fold_cfg = cfg;
        fold_cfg.set_seed(derive_seed(seed, 1000 + fold));
        EmbeddingMatrix emb;
        try {
            emb = train_embedding(split.train_graph, fold_cfg, &fold_features[fold]);
        } catch (const NumericalError& e) {
            throw NumericalError("fold " + std::to_string(fold) + ": " + e.what());
        }

        std::vector<int> train_labels, test_labels;
        const Matrix train_x =
            featurize_pairs(emb, split.train_pos, split.train_neg, opts.combiner, train_labels);
        const Matrix test_x =
            featurize_pairs(emb, split.test_pos, split.test_neg, opts.combiner, test_labels);
        ClassifierConfig clf_cfg = opts.classifier;
        clf_cfg.seed = derive_seed(seed, 2000 + fold);
        const auto clf = train_link_classifier(train_x, train_labels, clf_cfg);
        const auto scores = clf.score_all(test_x);
        result.fold_auc.push_back(auc(scores, test_labels));

        const auto norms = norm_distribution(emb, fold_features[fold], ExplainNorm::Population);
        result.fold_norm_mean.push_back(norms.mean);
        for (double s : emb.epoch_seconds) epoch_secs += s;
        epochs += emb.epoch_seconds.size();
    }
    result.auc_mean = mean(result.fold_auc);
    result.auc_se = standard_error(result.fold_auc);
    result.norm_mean = mean(result.fold_norm_mean);
    result.norm_se = standard_error(result.fold_norm_mean);
    result.sec_per_epoch = epochs > 0 ? epoch_secs / static_cast<double>(epochs) : 0.0;
    return result;
}

}  // namespace

EvalReport run_link_prediction(const Graph& g, const EmbedderConfig& cfg, int folds,
                               std::uint64_t seed, const LinkPredictionOptions& opts) {
    if (folds < 2) throw ConfigError("run_link_prediction: folds must be at least 2");

    std::vector<LinkSplit> splits;
    std::vector<FeatureMatrix> fold_features;
    for (int fold = 0; fold < folds; ++fold) {
        splits.push_back(make_split(g, opts.train_fraction, derive_seed(seed, fold)));
        FeatureOptions fopts;
        fopts.workers = opts.workers;
        fold_features.push_back(
            normalize_features(structural_features(splits.back().train_graph, opts.feature_set, fopts)));
    }

    EvalReport report;
    report.dataset = opts.dataset_name;
    report.method = cfg.method_name();
    report.folds = folds;
    report.seed = seed;
    report.gamma = cfg.xm().gamma;
    report.delta = cfg.xm().delta;
    report.combiner = opts.combiner;

    const bool xm_on = cfg.xm().active();
    const EmbedderConfig base_cfg = cfg.with_xm(0.0, 0.0);
    report.base = eval_variant(base_cfg, folds, seed, opts, splits, fold_features);
    if (xm_on) {
        report.xm = eval_variant(cfg, folds, seed, opts, splits, fold_features);
        report.p_value_norms = welch_t(report.base.fold_norm_mean, report.xm->fold_norm_mean);
    }
    return report;
}

AblationTable ablation(const Graph& g, const EmbedderConfig& cfg,
                       const std::vector<std::uint64_t>& seeds,
                       const LinkPredictionOptions& opts) {
    if (seeds.size() < 3) throw ConfigError("ablation: need at least 3 seeds");
    const double gamma = cfg.xm().gamma;
    const double delta = cfg.xm().delta;

    FeatureOptions fopts;
    fopts.workers = opts.workers;
    const FeatureMatrix features =
        normalize_features(structural_features(g, opts.feature_set, fopts));

    AblationTable table;
    table.dataset = opts.dataset_name;
    table.method = cfg.method_name();
    const std::vector<std::tuple<std::string, double, double>> cells = {
        {"none", 0.0, 0.0},
        {"sparsity", gamma, 0.0},
        {"orthogonality", 0.0, delta},
        {"both", gamma, delta},
    };
    for (const auto& [name, cell_gamma, cell_delta] : cells) {
        AblationCell cell;
        cell.name = name;
        cell.gamma = cell_gamma;
        cell.delta = cell_delta;
        double epoch_secs = 0.0;
        long long epochs = 0;
        for (std::uint64_t seed : seeds) {
            EmbedderConfig run_cfg = cfg.with_xm(cell_gamma, cell_delta);
            run_cfg.set_seed(seed);
            const auto emb = train_embedding(g, run_cfg, &features);
            const auto norms = norm_distribution(emb, features, ExplainNorm::Population);
            cell.per_seed_norm_mean.push_back(norms.mean);
            for (double s : emb.epoch_seconds) epoch_secs += s;
            epochs += emb.epoch_seconds.size();
        }
        cell.norm_mean = mean(cell.per_seed_norm_mean);
        cell.norm_se = standard_error(cell.per_seed_norm_mean);
        cell.sec_per_epoch = epochs > 0 ? epoch_secs / static_cast<double>(epochs) : 0.0;
        table.cells.push_back(std::move(cell));
    }
    return table;
}

}  // namespace xm
