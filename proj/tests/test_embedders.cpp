#include <doctest.h>

#include <cmath>
#include <map>

#include "xm/alias.hpp"
#include "xm/errors.hpp"
#include "xm/eval.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"
#include "xm/line.hpp"
#include "xm/rng.hpp"
#include "xm/sdne.hpp"
#include "xm/stats_util.hpp"

using namespace xm;

namespace {

FeatureMatrix default_features(const Graph& g) {
    return normalize_features(structural_features(g, default_feature_set()));
}

double cosine(std::span<const double> a, std::span<const double> b) {
    return dot(a, b) / (l2_norm(a) * l2_norm(b));
}

}  // namespace

TEST_CASE("alias table reproduces its weights") {
    const std::vector<double> weights{1.0, 3.0, 0.5, 5.5};
    AliasTable table{weights};
    auto rng = make_rng(123);
    constexpr int kDraws = 1000000;
    std::vector<long long> counts(weights.size(), 0);
    for (int i = 0; i < kDraws; ++i) ++counts[table.sample(rng)];

    const double total = 10.0;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double expected = kDraws * weights[k] / total;
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    CHECK(chi_square_pvalue(chi2, static_cast<int>(weights.size()) - 1) > 0.01);
}

TEST_CASE("line noise distribution follows degree^0.75") {
    const auto g = karate();
    AliasTable noise = line_noise_table(g, 0.75);
    auto rng = make_rng(99);
    constexpr int kDraws = 1000000;
    std::vector<long long> counts(g.node_count(), 0);
    for (int i = 0; i < kDraws; ++i) ++counts[noise.sample(rng)];

    double total = 0.0;
    for (int v = 0; v < g.node_count(); ++v) total += std::pow(g.weighted_degree(v), 0.75);
    double chi2 = 0.0;
    for (int v = 0; v < g.node_count(); ++v) {
        const double expected = kDraws * std::pow(g.weighted_degree(v), 0.75) / total;
        chi2 += (counts[v] - expected) * (counts[v] - expected) / expected;
    }
    CHECK(chi_square_pvalue(chi2, g.node_count() - 1) > 0.01);
}

TEST_CASE("line edge sampling respects weights") {
    const auto g = Graph::from_edges(4, {{0, 1, 4.0}, {1, 2, 1.0}, {2, 3, 3.0}});
    AliasTable edges = line_edge_table(g);
    auto rng = make_rng(7);
    constexpr int kDraws = 1000000;
    std::vector<long long> counts(3, 0);
    for (int i = 0; i < kDraws; ++i) ++counts[edges.sample(rng)];
    double chi2 = 0.0;
    const double weights[3] = {4.0, 1.0, 3.0};
    for (int k = 0; k < 3; ++k) {
        const double expected = kDraws * weights[k] / 8.0;
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    CHECK(chi_square_pvalue(chi2, 2) > 0.01);
}

TEST_CASE("line separates barbell cliques") {
    const auto g = barbell(5, 0);
    LineConfig cfg;
    cfg.d = 16;
    cfg.order = 1;
    cfg.epochs = 10;
    cfg.seed = 3;
    const auto emb = line_train(g, cfg);

    double intra = 0.0, inter = 0.0;
    int intra_n = 0, inter_n = 0;
    for (int u = 0; u < 10; ++u)
        for (int v = u + 1; v < 10; ++v) {
            const bool same = (u < 5) == (v < 5);
            const double c = cosine(emb.values.row(u), emb.values.row(v));
            (same ? intra : inter) += c;
            (same ? intra_n : inter_n) += 1;
        }
    CHECK(intra / intra_n > inter / inter_n);
}

TEST_CASE("line determinism and the zero-weight no-op") {
    const auto g = karate();
    const auto features = default_features(g);
    LineConfig cfg;
    cfg.d = 8;
    cfg.epochs = 2;
    cfg.seed = 42;

    const auto a = line_train(g, cfg);
    const auto b = line_train(g, cfg);
    CHECK(a.values.data() == b.values.data());

    LineConfig with_xm = cfg;
    with_xm.xm.gamma = 0.0;
    with_xm.xm.delta = 0.0;
    // inactive weights: identical trajectory, bit for bit
    const auto c = line_train(g, with_xm, &features);
    CHECK(a.values.data() == c.values.data());

    LineConfig on = cfg;
    on.xm.gamma = 0.5;
    on.xm.delta = 0.5;
    const auto d = line_train(g, on, &features);
    CHECK(d.values.data() != a.values.data());
    CHECK(d.xm_enabled);
}

TEST_CASE("line config validation") {
    const auto g = karate();
    LineConfig cfg;
    SUBCASE("epochs") {
        cfg.epochs = 0;
        CHECK_THROWS_AS(line_train(g, cfg), ConfigError);
    }
    SUBCASE("negatives") {
        cfg.negatives = 0;
        CHECK_THROWS_AS(line_train(g, cfg), ConfigError);
    }
    SUBCASE("order") {
        cfg.order = 3;
        CHECK_THROWS_AS(line_train(g, cfg), ConfigError);
    }
    SUBCASE("xm needs features") {
        cfg.xm.gamma = 1.0;
        CHECK_THROWS_AS(line_train(g, cfg), ConfigError);
    }
    SUBCASE("xm needs normalized features") {
        cfg.xm.gamma = 1.0;
        auto raw = structural_features(g, default_feature_set());
        CHECK_THROWS_AS(line_train(g, cfg, &raw), ConfigError);
    }
    SUBCASE("isolated nodes are rejected") {
        const auto lonely = Graph::from_edges(3, {{0, 1, 1.0}});
        CHECK_THROWS_AS(line_train(lonely, cfg), ConfigError);
    }
}

TEST_CASE("second-order line trains and differs from first order") {
    const auto g = karate();
    LineConfig cfg;
    cfg.d = 8;
    cfg.epochs = 3;
    cfg.seed = 5;
    cfg.order = 2;
    const auto emb2 = line_train(g, cfg);
    CHECK(emb2.method == "line2");
    cfg.order = 1;
    const auto emb1 = line_train(g, cfg);
    CHECK(emb1.method == "line1");
    CHECK(emb1.values.data() != emb2.values.data());
    CHECK(static_cast<int>(emb1.epoch_seconds.size()) == 3);
}

TEST_CASE("sdne reconstruction loss decreases on a tiny graph") {
    const auto g = Graph::from_edges(2, {{0, 1, 1.0}});
    SdneConfig cfg;
    cfg.d = 2;
    cfg.hidden = {4};
    cfg.epochs = 1;
    cfg.lr = 0.1;
    cfg.alpha = 0.0;  // isolate the reconstruction path
    cfg.nu = 0.0;
    cfg.seed = 8;
    SdneModel model(g, cfg);
    std::vector<double> recon;
    for (int epoch = 0; epoch < 55; ++epoch) recon.push_back(model.step(cfg.lr).reconstruction);
    for (std::size_t k = 5; k + 1 < recon.size(); ++k)  // allow a short warmup
        CHECK(recon[k + 1] <= recon[k] + 1e-12);
}

TEST_CASE("sdne backprop matches finite differences") {
    const auto g = barbell(3, 0);  // 6 nodes
    const auto features = default_features(g);
    SdneConfig cfg;
    cfg.d = 2;
    cfg.hidden = {2};
    cfg.alpha = 0.7;
    cfg.beta_recon = 1.0;
    cfg.nu = 1e-3;
    cfg.beta_pen = 5.0;
    cfg.xm.gamma = 0.4;
    cfg.xm.delta = 0.3;
    cfg.seed = 13;
    SdneModel model(g, cfg, &features);

    std::vector<double> grad;
    model.loss_and_gradient(grad);
    auto& params = model.parameters();
    const double h = 1e-6;
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = params[k];
        params[k] = saved + h;
        const double plus = model.loss();
        params[k] = saved - h;
        const double minus = model.loss();
        params[k] = saved;
        const double fd = (plus - minus) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - grad[k]));
        scale = std::max(scale, std::abs(grad[k]));
    }
    CHECK(worst <= 1e-4 * std::max(scale, 1.0));
}

TEST_CASE("sdne gradient is additive in the xm terms") {
    const auto g = barbell(3, 1);
    const auto features = default_features(g);
    SdneConfig base_cfg;
    base_cfg.d = 3;
    base_cfg.hidden = {4};
    base_cfg.seed = 21;

    SdneConfig xm_only = base_cfg;
    xm_only.alpha = 0.0;
    xm_only.beta_recon = 0.0;
    xm_only.nu = 0.0;
    xm_only.xm.gamma = 0.8;
    xm_only.xm.delta = 0.6;

    SdneConfig combined = base_cfg;
    combined.xm.gamma = 0.8;
    combined.xm.delta = 0.6;

    SdneModel a(g, base_cfg, nullptr);
    SdneModel b(g, xm_only, &features);
    SdneModel c(g, combined, &features);
    // identical seeds give identical initial parameters
    REQUIRE(a.parameters() == b.parameters());
    REQUIRE(a.parameters() == c.parameters());

    std::vector<double> ga, gb, gc;
    a.loss_and_gradient(ga);
    b.loss_and_gradient(gb);
    const auto terms = c.loss_and_gradient(gc);
    for (std::size_t k = 0; k < ga.size(); ++k)
        CHECK(gc[k] == doctest::Approx(ga[k] + gb[k]).epsilon(1e-9));
    CHECK(terms.sparsity > 0.0);
    CHECK(terms.orthogonality > 0.0);
}

TEST_CASE("sdne determinism, timings and the zero-weight no-op") {
    const auto g = karate();
    const auto features = default_features(g);
    SdneConfig cfg;
    cfg.d = 4;
    cfg.hidden = {8};
    cfg.epochs = 10;
    cfg.lr = 0.02;
    cfg.seed = 31;

    const auto a = sdne_train(g, cfg);
    const auto b = sdne_train(g, cfg);
    CHECK(a.values.data() == b.values.data());
    CHECK(static_cast<int>(a.epoch_seconds.size()) == 10);

    SdneConfig zero = cfg;
    zero.xm.gamma = 0.0;
    zero.xm.delta = 0.0;
    const auto c = sdne_train(g, zero, &features);
    CHECK(a.values.data() == c.values.data());

    SdneConfig parallel = cfg;
    parallel.workers = 4;
    const auto d = sdne_train(g, parallel);
    CHECK(a.values.data() == d.values.data());
}

TEST_CASE("sdne divergence names the epoch") {
    const auto g = karate();
    SdneConfig cfg;
    cfg.d = 4;
    cfg.hidden = {8};
    cfg.epochs = 200;
    cfg.lr = 1e12;  // the weight-decay term alone doubles the weights every step
    cfg.nu = 1.0;
    cfg.seed = 2;
    CHECK_THROWS_WITH_AS(sdne_train(g, cfg), doctest::Contains("epoch"), NumericalError);
}

TEST_CASE("sdne config validation") {
    const auto g = karate();
    SdneConfig cfg;
    SUBCASE("beta_pen must exceed 1") {
        cfg.beta_pen = 1.0;
        CHECK_THROWS_AS(sdne_train(g, cfg), ConfigError);
    }
    SUBCASE("epochs") {
        cfg.epochs = 0;
        CHECK_THROWS_AS(sdne_train(g, cfg), ConfigError);
    }
    SUBCASE("negative weights") {
        cfg.alpha = -1.0;
        CHECK_THROWS_AS(sdne_train(g, cfg), ConfigError);
    }
}

TEST_CASE("line xm update equals the base update plus the xm step") {
    const auto g = karate();
    const auto features = default_features(g);
    // one sample, so exactly one edge update happens
    LineConfig cfg;
    cfg.d = 6;
    cfg.epochs = 1;
    cfg.samples_per_epoch = 1;
    cfg.seed = 17;

    const auto base = line_train(g, cfg);
    LineConfig on = cfg;
    on.xm.gamma = 0.7;
    on.xm.delta = 0.4;
    const auto with_xm = line_train(g, on, &features);

    int touched = 0;
    for (int v = 0; v < g.node_count(); ++v) {
        std::vector<double> diff(cfg.d);
        bool changed = false;
        for (int k = 0; k < cfg.d; ++k) {
            diff[k] = with_xm.values(v, k) - base.values(v, k);
            changed = changed || diff[k] != 0.0;
        }
        if (!changed) continue;
        ++touched;
        // the only difference is -rho * xm_gradient evaluated at the
        // post-update base embedding
        const double rho = cfg.rho0;  // first sample, no decay yet
        const auto expected = xm_gradient(base.values.row(v), features.values.row(v), on.xm);
        for (int k = 0; k < cfg.d; ++k)
            CHECK(diff[k] == doctest::Approx(-rho * expected[k]).epsilon(1e-9));
    }
    CHECK(touched == 1);  // only the sampled source node gets the xm step
}
