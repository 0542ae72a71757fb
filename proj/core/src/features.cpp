#include "xm/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "xm/errors.hpp"
#include "xm/parallel.hpp"

namespace xm {

namespace {

const std::map<Feature, std::string> kFeatureNames = {
    {Feature::Degree, "degree"},
    {Feature::WeightedDegree, "weighted_degree"},
    {Feature::Clustering, "clustering_coefficient"},
    {Feature::PprMean, "ppr_mean"},
    {Feature::PprStd, "ppr_std"},
    {Feature::AvgNeighborDegree, "avg_neighbor_degree"},
    {Feature::AvgNeighborClustering, "avg_neighbor_clustering"},
    {Feature::EgoNetEdges, "ego_net_edges"},
    {Feature::BurtConstraint, "burt_constraint"},
    {Feature::Betweenness, "betweenness"},
    {Feature::Eccentricity, "eccentricity"},
    {Feature::PageRank, "pagerank"},
    {Feature::DegreeCentrality, "degree_centrality"},
    {Feature::Katz, "katz"},
    {Feature::EigenvectorCentrality, "eigenvector_centrality"},
};

}  // namespace

std::string feature_name(Feature f) { return kFeatureNames.at(f); }

Feature feature_from_name(std::string_view name) {
    for (const auto& [feature, label] : kFeatureNames) {
        if (label == name) return feature;
    }
    std::ostringstream msg;
    msg << "unknown feature \"" << name << "\"; valid names:";
    for (const auto& [feature, label] : kFeatureNames) msg << ' ' << label;
    throw ConfigError(msg.str());
}

const std::vector<Feature>& all_features() {
    static const std::vector<Feature> kAll = {
        Feature::Degree,        Feature::WeightedDegree,  Feature::Clustering,
        Feature::PprMean,       Feature::PprStd,          Feature::AvgNeighborDegree,
        Feature::AvgNeighborClustering, Feature::EgoNetEdges, Feature::BurtConstraint,
        Feature::Betweenness,   Feature::Eccentricity,    Feature::PageRank,
        Feature::DegreeCentrality, Feature::Katz,         Feature::EigenvectorCentrality,
    };
    return kAll;
}

const std::vector<Feature>& default_feature_set() {
    static const std::vector<Feature> kDefault = {
        Feature::Degree,          Feature::Clustering,
        Feature::PprStd,          Feature::AvgNeighborDegree,
        Feature::AvgNeighborClustering, Feature::Eccentricity,
        Feature::Katz,
    };
    return kDefault;
}

std::vector<double> personalized_pagerank(const Graph& g, int v, double damping, double tol,
                                          int max_iter, bool* degenerate) {
    const int n = g.node_count();
    if (v < 0 || v >= n) throw ConfigError("personalized_pagerank: node id out of range");
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("personalized_pagerank: damping must be in (0,1)");
    if (!(tol > 0.0)) throw ConfigError("personalized_pagerank: tol must be positive");
    if (degenerate) *degenerate = false;

    if (g.degree(v) == 0) {
        // isolated restart node: all mass stays at v
        if (degenerate) *degenerate = true;
        std::vector<double> p(n, 0.0);
        p[v] = 1.0;
        return p;
    }

    std::vector<double> p(n, 0.0), next(n, 0.0);
    p[v] = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        double dangling = 0.0;
        for (int u = 0; u < n; ++u) {
            if (p[u] == 0.0) continue;
            const double wd = g.weighted_degree(u);
            if (wd == 0.0) {
                dangling += p[u];
                continue;
            }
            const double share = damping * p[u] / wd;
            for (const auto& nb : g.neighbors(u)) next[nb.id] += share * nb.w;
        }
        // restart mass plus mass stranded on degree-0 nodes returns to v
        next[v] += 1.0 - damping + damping * dangling;
        double delta = 0.0;
        for (int u = 0; u < n; ++u) delta = std::max(delta, std::abs(next[u] - p[u]));
        p.swap(next);
        if (delta < tol) break;
    }
    return p;
}

std::vector<double> pagerank(const Graph& g, double damping, double tol, int max_iter) {
    const int n = g.node_count();
    std::vector<double> p(n, 1.0 / n), next(n, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        double dangling = 0.0;
        for (int u = 0; u < n; ++u) {
            const double wd = g.weighted_degree(u);
            if (wd == 0.0) {
                dangling += p[u];
                continue;
            }
            const double share = damping * p[u] / wd;
            for (const auto& nb : g.neighbors(u)) next[nb.id] += share * nb.w;
        }
        const double uniform = (1.0 - damping + damping * dangling) / n;
        double delta = 0.0;
        for (int u = 0; u < n; ++u) {
            next[u] += uniform;
            delta = std::max(delta, std::abs(next[u] - p[u]));
        }
        p.swap(next);
        if (delta < tol) break;
    }
    return p;
}

double katz_default_alpha(const Graph& g) {
    const int n = g.node_count();
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n, 0.0);
    double lambda = 1.0;
    for (int it = 0; it < 200; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int u = 0; u < n; ++u)
            for (const auto& nb : g.neighbors(u)) next[nb.id] += nb.w * x[u];
        const double norm = l2_norm(next);
        if (norm == 0.0) return 0.85;  // edgeless graph, any alpha converges
        lambda = norm;
        for (int u = 0; u < n; ++u) next[u] /= norm;
        x.swap(next);
    }
    return 0.85 / lambda;
}

std::vector<double> katz_centrality(const Graph& g, double alpha, double beta) {
    const int n = g.node_count();
    if (!(alpha > 0.0)) throw ConfigError("katz_centrality: alpha must be positive");
    if (!(beta > 0.0)) throw ConfigError("katz_centrality: beta must be positive");
    std::vector<double> x(n, beta), next(n, 0.0);
    double prev_delta = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    for (int it = 0; it < 20000; ++it) {
        for (int u = 0; u < n; ++u) next[u] = beta;
        for (int u = 0; u < n; ++u) {
            const double xu = x[u];
            for (const auto& nb : g.neighbors(u)) next[nb.id] += alpha * nb.w * xu;
        }
        double delta = 0.0;
        double magnitude = 0.0;
        for (int u = 0; u < n; ++u) {
            delta = std::max(delta, std::abs(next[u] - x[u]));
            magnitude = std::max(magnitude, std::abs(next[u]));
        }
        x.swap(next);
        if (delta < 1e-10) {
            const double norm = l2_norm(x);
            for (int u = 0; u < n; ++u) x[u] /= norm;
            return x;
        }
        if (!std::isfinite(magnitude) || magnitude > 1e150)
            throw NumericalError("katz_centrality: iteration diverged; use a smaller alpha (< 1/lambda_max)");
        growth_streak = delta > prev_delta * (1.0 + 1e-12) ? growth_streak + 1 : 0;
        if (growth_streak > 50)
            throw NumericalError("katz_centrality: iteration diverged; use a smaller alpha (< 1/lambda_max)");
        prev_delta = delta;
    }
    throw NumericalError("katz_centrality: no convergence; use a smaller alpha (< 1/lambda_max)");
}

std::vector<int> bfs_hops(const Graph& g, int source) {
    std::vector<int> dist(g.node_count(), -1);
    std::deque<int> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto& nb : g.neighbors(u)) {
            if (dist[nb.id] < 0) {
                dist[nb.id] = dist[u] + 1;
                queue.push_back(nb.id);
            }
        }
    }
    return dist;
}

std::vector<double> eccentricity(const Graph& g) {
    const int n = g.node_count();
    std::vector<double> ecc(n, 0.0);
    for (int v = 0; v < n; ++v) {
        const auto dist = bfs_hops(g, v);
        int far = 0;
        for (int d : dist) far = std::max(far, d);
        ecc[v] = far;
    }
    return ecc;
}

int graph_diameter(const Graph& g) {
    const auto ecc = eccentricity(g);
    int d = 0;
    for (double e : ecc) d = std::max(d, static_cast<int>(e));
    return d;
}

std::vector<double> burt_constraint(const Graph& g) {
    const int n = g.node_count();
    std::vector<double> c(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double wi = g.weighted_degree(i);
        if (wi == 0.0) continue;  // degree-0 node: constraint 0
        auto nbs = g.neighbors(i);
        double total = 0.0;
        for (const auto& j : nbs) {
            double p_ij = j.w / wi;
            double indirect = 0.0;
            for (const auto& q : nbs) {
                if (q.id == j.id) continue;
                const double wq = g.weighted_degree(q.id);
                if (wq == 0.0) continue;
                // p_iq * p_qj with p_qj read from q's adjacency
                for (const auto& qn : g.neighbors(q.id)) {
                    if (qn.id == j.id) {
                        indirect += (q.w / wi) * (qn.w / wq);
                        break;
                    }
                }
            }
            total += (p_ij + indirect) * (p_ij + indirect);
        }
        c[i] = total;
    }
    return c;
}

std::vector<double> betweenness(const Graph& g, int workers) {
    const int n = g.node_count();
    // Brandes accumulation, one source at a time. Sources are grouped in
    // fixed blocks reduced in block order, so totals are independent of the
    // worker count.
    constexpr int kBlocks = 64;
    const int blocks = std::min(kBlocks, n);
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
    parallel_for(blocks, workers, [&](int b) {
        const int begin = static_cast<int>(static_cast<long long>(n) * b / blocks);
        const int end = static_cast<int>(static_cast<long long>(n) * (b + 1) / blocks);
        auto& acc = partial[b];
        std::vector<int> order;
        std::vector<std::vector<int>> preds(n);
        std::vector<double> sigma(n), delta(n);
        std::vector<int> dist(n);
        for (int s = begin; s < end; ++s) {
            order.clear();
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::fill(delta.begin(), delta.end(), 0.0);
            std::fill(dist.begin(), dist.end(), -1);
            for (auto& p : preds) p.clear();
            sigma[s] = 1.0;
            dist[s] = 0;
            std::deque<int> queue{s};
            while (!queue.empty()) {
                const int v = queue.front();
                queue.pop_front();
                order.push_back(v);
                for (const auto& nb : g.neighbors(v)) {
                    if (dist[nb.id] < 0) {
                        dist[nb.id] = dist[v] + 1;
                        queue.push_back(nb.id);
                    }
                    if (dist[nb.id] == dist[v] + 1) {
                        sigma[nb.id] += sigma[v];
                        preds[nb.id].push_back(v);
                    }
                }
            }
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                const int w = *it;
                for (int p : preds[w]) delta[p] += sigma[p] / sigma[w] * (1.0 + delta[w]);
                if (w != s) acc[w] += delta[w];
            }
        }
    });
    std::vector<double> bc(n, 0.0);
    for (int b = 0; b < blocks; ++b)
        for (int v = 0; v < n; ++v) bc[v] += partial[b][v];
    for (int v = 0; v < n; ++v) bc[v] /= 2.0;  // undirected pairs counted twice
    return bc;
}

std::vector<double> eigenvector_centrality(const Graph& g, double tol, int max_iter) {
    const int n = g.node_count();
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int u = 0; u < n; ++u) {
            const double xu = x[u];
            for (const auto& nb : g.neighbors(u)) next[nb.id] += nb.w * xu;
        }
        const double norm = l2_norm(next);
        if (norm == 0.0) return x;  // edgeless graph
        double delta = 0.0;
        for (int u = 0; u < n; ++u) {
            next[u] /= norm;
            delta = std::max(delta, std::abs(next[u] - x[u]));
        }
        x.swap(next);
        if (delta < tol) break;
    }
    return x;
}

std::vector<double> ego_net_edges(const Graph& g) {
    const auto links = neighbor_link_counts(g);
    std::vector<double> ego(g.node_count());
    for (int v = 0; v < g.node_count(); ++v)
        ego[v] = static_cast<double>(g.degree(v)) + static_cast<double>(links[v]);
    return ego;
}

std::vector<double> avg_neighbor_degree(const Graph& g) {
    const int n = g.node_count();
    std::vector<double> out(n, 0.0);
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) == 0) continue;
        double s = 0.0;
        for (const auto& nb : g.neighbors(v)) s += g.degree(nb.id);
        out[v] = s / g.degree(v);
    }
    return out;
}

std::vector<double> avg_neighbor_clustering(const Graph& g) {
    const int n = g.node_count();
    const auto clustering = clustering_coefficients(g);
    std::vector<double> out(n, 0.0);
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) == 0) continue;
        double s = 0.0;
        for (const auto& nb : g.neighbors(v)) s += clustering[nb.id];
        out[v] = s / g.degree(v);
    }
    return out;
}

FeatureMatrix structural_features(const Graph& g, const std::vector<Feature>& set,
                                  const FeatureOptions& opts) {
    if (set.empty()) throw ConfigError("structural_features: feature set is empty");
    {
        auto sorted = set;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ConfigError("structural_features: duplicate feature in set");
    }
    const int n = g.node_count();
    FeatureMatrix fm;
    fm.values = Matrix(n, static_cast<int>(set.size()));
    fm.names.reserve(set.size());

    const bool wants_ppr = std::find(set.begin(), set.end(), Feature::PprMean) != set.end() ||
                           std::find(set.begin(), set.end(), Feature::PprStd) != set.end();
    std::vector<double> ppr_mean(n, 0.0), ppr_std(n, 0.0);
    if (wants_ppr) {
        parallel_for(n, opts.workers, [&](int v) {
            const auto p = personalized_pagerank(g, v, opts.ppr_damping, opts.ppr_tol, opts.ppr_max_iter);
            const double m = std::accumulate(p.begin(), p.end(), 0.0) / n;
            double var = 0.0;
            for (double x : p) var += (x - m) * (x - m);
            ppr_mean[v] = m;
            ppr_std[v] = std::sqrt(var / n);
        });
    }

    for (std::size_t col = 0; col < set.size(); ++col) {
        const Feature f = set[col];
        fm.names.push_back(feature_name(f));
        std::vector<double> column;
        switch (f) {
            case Feature::Degree: {
                column.resize(n);
                for (int v = 0; v < n; ++v) column[v] = g.degree(v);
                break;
            }
            case Feature::WeightedDegree: {
                column.resize(n);
                for (int v = 0; v < n; ++v) column[v] = g.weighted_degree(v);
                break;
            }
            case Feature::Clustering:
                column = clustering_coefficients(g);
                break;
            case Feature::PprMean:
                column = ppr_mean;
                break;
            case Feature::PprStd:
                column = ppr_std;
                break;
            case Feature::AvgNeighborDegree:
                column = avg_neighbor_degree(g);
                break;
            case Feature::AvgNeighborClustering:
                column = avg_neighbor_clustering(g);
                break;
            case Feature::EgoNetEdges:
                column = ego_net_edges(g);
                break;
            case Feature::BurtConstraint:
                column = burt_constraint(g);
                break;
            case Feature::Betweenness:
                column = betweenness(g, opts.workers);
                break;
            case Feature::Eccentricity:
                column = eccentricity(g);
                break;
            case Feature::PageRank:
                column = pagerank(g);
                break;
            case Feature::DegreeCentrality: {
                column.resize(n);
                for (int v = 0; v < n; ++v)
                    column[v] = n > 1 ? g.degree(v) / static_cast<double>(n - 1) : 0.0;
                break;
            }
            case Feature::Katz: {
                const double alpha = opts.katz_alpha > 0.0 ? opts.katz_alpha : katz_default_alpha(g);
                column = katz_centrality(g, alpha, opts.katz_beta);
                break;
            }
            case Feature::EigenvectorCentrality:
                column = eigenvector_centrality(g);
                break;
        }
        for (int v = 0; v < n; ++v) fm.values(v, static_cast<int>(col)) = column[v];
    }
    return fm;
}

FeatureMatrix positional_features(const Graph& g, const std::vector<int>& anchors,
                                  const FeatureOptions& opts) {
    if (anchors.empty()) throw ConfigError("positional_features: anchors must be non-empty");
    const int n = g.node_count();
    for (int a : anchors)
        if (a < 0 || a >= n) throw ConfigError("positional_features: anchor id out of range");

    FeatureMatrix fm;
    fm.values = Matrix(n, static_cast<int>(anchors.size()) * 2);
    const int diameter = graph_diameter(g);

    // every node's personalized PageRank, sampled at the anchors
    Matrix anchor_ppr(n, static_cast<int>(anchors.size()));
    parallel_for(n, opts.workers, [&](int v) {
        const auto p = personalized_pagerank(g, v, opts.ppr_damping, opts.ppr_tol, opts.ppr_max_iter);
        for (std::size_t a = 0; a < anchors.size(); ++a)
            anchor_ppr(v, static_cast<int>(a)) = p[anchors[a]];
    });

    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const int anchor = anchors[a];
        fm.names.push_back("hops_to_" + g.label(anchor));
        fm.names.push_back("anchor_ppr_" + g.label(anchor));
        const auto hops = bfs_hops(g, anchor);
        for (int v = 0; v < n; ++v) {
            double h = hops[v];
            if (hops[v] < 0) {
                h = diameter + 1;
                fm.unreachable_anchor = true;
            }
            fm.values(v, static_cast<int>(2 * a)) = h;
            fm.values(v, static_cast<int>(2 * a + 1)) = anchor_ppr(v, static_cast<int>(a));
        }
    }
    return fm;
}

FeatureMatrix normalize_features(const FeatureMatrix& f) {
    FeatureMatrix out = f;
    const int n = f.values.rows();
    const int cols = f.values.cols();
    out.col_min.assign(cols, 0.0);
    out.col_max.assign(cols, 0.0);
    out.constant_columns.assign(cols, false);
    for (int j = 0; j < cols; ++j) {
        double lo = f.values(0, j), hi = f.values(0, j);
        for (int i = 1; i < n; ++i) {
            lo = std::min(lo, f.values(i, j));
            hi = std::max(hi, f.values(i, j));
        }
        out.col_min[j] = lo;
        out.col_max[j] = hi;
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
            out.constant_columns[j] = true;
            for (int i = 0; i < n; ++i) out.values(i, j) = 0.5;
        } else {
            for (int i = 0; i < n; ++i) out.values(i, j) = (f.values(i, j) - lo) / (hi - lo);
        }
    }
    out.normalized = true;
    return out;
}

Matrix feature_correlations(const FeatureMatrix& f) {
    const int n = f.values.rows();
    const int cols = f.values.cols();
    if (n < 3) throw ConfigError("feature_correlations: need at least 3 rows");
    std::vector<double> means(cols, 0.0), stds(cols, 0.0);
    for (int j = 0; j < cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += f.values(i, j);
        means[j] = s / n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = f.values(i, j) - means[j];
            var += d * d;
        }
        stds[j] = std::sqrt(var / n);
    }
    Matrix corr(cols, cols);
    for (int a = 0; a < cols; ++a) {
        corr(a, a) = 1.0;
        for (int b = a + 1; b < cols; ++b) {
            double cov = 0.0;
            for (int i = 0; i < n; ++i) cov += (f.values(i, a) - means[a]) * (f.values(i, b) - means[b]);
            cov /= n;
            double r = 0.0;
            if (stds[a] > 1e-15 && stds[b] > 1e-15) r = std::abs(cov / (stds[a] * stds[b]));
            r = std::min(r, 1.0);
            corr(a, b) = r;
            corr(b, a) = r;
        }
    }
    return corr;
}

}  // namespace xm
