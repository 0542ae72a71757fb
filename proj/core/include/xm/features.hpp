#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xm/dense.hpp"
#include "xm/graph.hpp"

namespace xm {

// Human-understandable per-node quantities used to explain embedding
// dimensions.
enum class Feature {
    Degree,
    WeightedDegree,
    Clustering,
    PprMean,
    PprStd,
    AvgNeighborDegree,
    AvgNeighborClustering,
    EgoNetEdges,
    BurtConstraint,
    Betweenness,
    Eccentricity,
    PageRank,
    DegreeCentrality,
    Katz,
    EigenvectorCentrality,
};

std::string feature_name(Feature f);
Feature feature_from_name(std::string_view name);  // ConfigError lists valid names
const std::vector<Feature>& all_features();        // the full 15-feature set

// Default working subset: degree, clustering coefficient, std of the
// personalized PageRank vector, average neighbor degree, average neighbor
// clustering, eccentricity, Katz centrality.
const std::vector<Feature>& default_feature_set();

struct FeatureMatrix {
    Matrix values;                        // n x f
    std::vector<std::string> names;      // column labels
    bool normalized = false;
    std::vector<double> col_min;         // recorded by normalize_features
    std::vector<double> col_max;
    std::vector<bool> constant_columns;  // flagged columns mapped to 0.5
    bool unreachable_anchor = false;     // positional features only
};

struct FeatureOptions {
    double ppr_damping = 0.85;
    double ppr_tol = 1e-8;
    int ppr_max_iter = 10000;
    double katz_alpha = 0.0;  // 0 picks 0.85 / lambda_max
    double katz_beta = 1.0;
    int workers = 1;
};

FeatureMatrix structural_features(const Graph& g, const std::vector<Feature>& set,
                                  const FeatureOptions& opts = {});

// Two columns per anchor: BFS hop count to the anchor and the anchor's entry
// in each node's personalized PageRank vector. Unreachable pairs get
// diameter + 1 and set the unreachable_anchor flag.
FeatureMatrix positional_features(const Graph& g, const std::vector<int>& anchors,
                                  const FeatureOptions& opts = {});

// Power iteration with restart at v; `degenerate` (when given) reports an
// isolated restart node whose vector collapses onto itself.
std::vector<double> personalized_pagerank(const Graph& g, int v, double damping, double tol,
                                          int max_iter = 10000, bool* degenerate = nullptr);

std::vector<double> pagerank(const Graph& g, double damping = 0.85, double tol = 1e-12,
                             int max_iter = 10000);

// Fixed-point solve of x = alpha*A*x + beta*1, L2-normalized. Throws
// NumericalError when the iteration diverges (alpha >= 1/lambda_max).
std::vector<double> katz_centrality(const Graph& g, double alpha, double beta = 1.0);
double katz_default_alpha(const Graph& g);  // 0.85 / lambda_max estimate

std::vector<double> eccentricity(const Graph& g);  // per connected component
std::vector<int> bfs_hops(const Graph& g, int source);  // -1 when unreachable
int graph_diameter(const Graph& g);                // max finite eccentricity

std::vector<double> burt_constraint(const Graph& g);
std::vector<double> betweenness(const Graph& g, int workers = 1);
std::vector<double> eigenvector_centrality(const Graph& g, double tol = 1e-12, int max_iter = 10000);
std::vector<double> ego_net_edges(const Graph& g);
std::vector<double> avg_neighbor_degree(const Graph& g);
std::vector<double> avg_neighbor_clustering(const Graph& g);

// Per-column min-max to [0, 1]; constant columns become 0.5 and are flagged.
FeatureMatrix normalize_features(const FeatureMatrix& f);

// Absolute Pearson correlations between feature columns; constant columns
// correlate 0 with everything else.
Matrix feature_correlations(const FeatureMatrix& f);

}  // namespace xm
