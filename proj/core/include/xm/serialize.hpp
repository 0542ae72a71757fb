#pragma once

#include <string>
#include <vector>

#include "xm/embedding.hpp"
#include "xm/eval.hpp"
#include "xm/explain.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"

namespace xm {

// CSV: header = feature names, one row per node.
std::string feature_matrix_csv(const FeatureMatrix& fm);
std::string feature_matrix_json(const FeatureMatrix& fm);
FeatureMatrix read_feature_matrix_csv(const std::string& path);

// CSV: one row per node; metadata (method, d, seed, timings) goes to JSON.
std::string embedding_csv(const EmbeddingMatrix& emb);
std::string embedding_json(const EmbeddingMatrix& emb, std::uint64_t graph_hash);
EmbeddingMatrix read_embedding_csv(const std::string& path);

// CSV: rows = embedding dimensions, columns = named sense features.
std::string explain_csv(const ExplainMatrix& e, const std::vector<std::string>& feature_names,
                        bool normalized_view);
std::string explain_json(const ExplainMatrix& e, const std::vector<std::string>& feature_names);

std::string graph_stats_json(const GraphStats& stats);
std::string graph_stats_csv(const GraphStats& stats);

std::string eval_report_json(const EvalReport& report);
// Flat rows: dataset, method, gamma, delta, auc mean/se, norm mean/se,
// p-value, seconds per epoch. One row per variant.
std::string eval_report_csv(const EvalReport& report);

std::string ablation_json(const AblationTable& table);
std::string ablation_csv(const AblationTable& table);

std::string norm_summary_csv(const NormSummary& norms);

}  // namespace xm
