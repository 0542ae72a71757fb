#include "xm/line.hpp"

#include <chrono>
#include <cmath>

#include "xm/errors.hpp"
#include "xm/rng.hpp"

namespace xm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void validate(const Graph& g, const LineConfig& cfg, const FeatureMatrix* features) {
    if (cfg.order != 1 && cfg.order != 2) throw ConfigError("line: order must be 1 or 2");
    if (cfg.d < 1) throw ConfigError("line: d must be positive");
    if (cfg.epochs < 1) throw ConfigError("line: epochs must be at least 1");
    if (cfg.negatives < 1) throw ConfigError("line: negatives must be at least 1");
    if (!(cfg.rho0 > 0.0)) throw ConfigError("line: rho0 must be positive");
    if (cfg.samples_per_epoch < 0) throw ConfigError("line: samples_per_epoch must be non-negative");
    if (g.edge_count() == 0) throw ConfigError("line: graph has no edges");
    for (int v = 0; v < g.node_count(); ++v)
        if (g.degree(v) == 0) throw ConfigError("line: graph has an isolated node");
    if (cfg.xm.active()) {
        if (!features) throw ConfigError("line: xm is enabled but no feature matrix was given");
        if (!features->normalized) throw ConfigError("line: feature matrix must be normalized");
        if (features->values.rows() != g.node_count())
            throw ConfigError("line: feature matrix row count does not match the graph");
    }
}

}  // namespace

AliasTable line_edge_table(const Graph& g) {
    std::vector<double> weights;
    weights.reserve(g.edges().size());
    for (const auto& e : g.edges()) weights.push_back(e.w);
    return AliasTable(weights);
}

AliasTable line_noise_table(const Graph& g, double exponent) {
    std::vector<double> weights(g.node_count());
    for (int v = 0; v < g.node_count(); ++v) weights[v] = std::pow(g.weighted_degree(v), exponent);
    return AliasTable(weights);
}

EmbeddingMatrix line_train(const Graph& g, const LineConfig& cfg, const FeatureMatrix* features) {
    validate(g, cfg, features);
    const int n = g.node_count();
    const int d = cfg.d;
    const long long spe =
        cfg.samples_per_epoch > 0 ? cfg.samples_per_epoch : 100LL * g.edge_count();
    const long long total = spe * cfg.epochs;

    auto rng = make_rng(cfg.seed);
    std::uniform_real_distribution<double> init(-0.5 / d, 0.5 / d);

    Matrix vertex(n, d);
    for (double& x : vertex.data()) x = init(rng);
    Matrix context;  // second order only; zero-initialized like the reference family
    if (cfg.order == 2) context = Matrix(n, d);

    const AliasTable edge_table = line_edge_table(g);
    const AliasTable noise_table = line_noise_table(g, cfg.noise_exponent);
    std::uniform_int_distribution<int> direction(0, 1);

    // precompute the per-node sparsity factor gamma * |f|_1 / |f|_2
    std::vector<double> feature_ratio(n, 0.0);
    const bool use_xm = cfg.xm.active();
    if (use_xm) {
        for (int v = 0; v < n; ++v) {
            const double nf1 = l1_norm(features->values.row(v));
            const double nf2 = l2_norm(features->values.row(v));
            feature_ratio[v] = nf2 > 0.0 ? cfg.xm.gamma * nf1 / nf2 : 0.0;
        }
    }

    EmbeddingMatrix emb;
    emb.d = d;
    emb.method = cfg.order == 1 ? "line1" : "line2";
    emb.xm_enabled = use_xm;
    emb.seed = cfg.seed;
    emb.epochs = cfg.epochs;

    std::vector<double> u_accum(d);
    long long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        for (long long s = 0; s < spe; ++s, ++step) {
            const double progress = static_cast<double>(step) / static_cast<double>(total);
            const double rho = cfg.rho0 * std::max(1.0 - progress, cfg.rho_floor_ratio);

            const Edge& e = g.edges()[edge_table.sample(rng)];
            int u = e.u, v = e.v;
            if (direction(rng)) std::swap(u, v);

            double* src = vertex.row(u).data();
            std::fill(u_accum.begin(), u_accum.end(), 0.0);
            for (int k = 0; k <= cfg.negatives; ++k) {
                int target = v;
                double label = 1.0;
                if (k > 0) {
                    target = static_cast<int>(noise_table.sample(rng));
                    // avoid pairing the source with itself; capped so tiny
                    // graphs cannot spin forever
                    for (int attempt = 0; target == u && attempt < 32; ++attempt)
                        target = static_cast<int>(noise_table.sample(rng));
                    if (target == u) target = v;
                    label = 0.0;
                }
                double* tgt =
                    cfg.order == 2 ? context.row(target).data() : vertex.row(target).data();
                double z = 0.0;
                for (int i = 0; i < d; ++i) z += src[i] * tgt[i];
                const double coef = rho * (label - sigmoid(z));
                for (int i = 0; i < d; ++i) {
                    u_accum[i] += coef * tgt[i];
                    tgt[i] += coef * src[i];
                }
            }
            for (int i = 0; i < d; ++i) src[i] += u_accum[i];

            if (use_xm && (feature_ratio[u] != 0.0 || cfg.xm.delta != 0.0)) {
                xm_gradient_accumulate(vertex.row(u), feature_ratio[u], cfg.xm.delta, -rho,
                                       vertex.row(u));
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        emb.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }

    for (int v = 0; v < n; ++v) {
        const double norm = l2_norm(vertex.row(v));
        if (!std::isfinite(norm)) throw NumericalError("line: training diverged (non-finite embedding)");
        if (norm < 1e-12) throw NumericalError("line: embedding collapse for node " + std::to_string(v));
    }
    emb.values = std::move(vertex);
    return emb;
}

}  // namespace xm
