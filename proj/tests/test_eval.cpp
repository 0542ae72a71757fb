#include <doctest.h>

#include <cmath>
#include <set>

#include "support/oracles.hpp"
#include "xm/errors.hpp"
#include "xm/eval.hpp"
#include "xm/graph.hpp"
#include "xm/rng.hpp"
#include "xm/stats_util.hpp"

using namespace xm;

TEST_CASE("make_split on karate") {
    const auto g = karate();
    const auto split = make_split(g, 0.6, 11);
    const int train = static_cast<int>(split.train_pos.size());
    CHECK((train == 46 || train == 47));
    CHECK(train + static_cast<int>(split.test_pos.size()) == 78);
    CHECK(split.train_neg.size() == split.train_pos.size());
    CHECK(split.test_neg.size() == split.test_pos.size());

    SUBCASE("deterministic for a fixed seed") {
        const auto again = make_split(g, 0.6, 11);
        CHECK(again.train_pos == split.train_pos);
        CHECK(again.test_neg == split.test_neg);
        const auto other = make_split(g, 0.6, 12);
        CHECK(other.train_pos != split.train_pos);
    }
    SUBCASE("no test edge leaks into the train graph") {
        for (const auto& [u, v] : split.test_pos) CHECK_FALSE(split.train_graph.has_edge(u, v));
        for (const auto& [u, v] : split.train_pos) CHECK(split.train_graph.has_edge(u, v));
    }
    SUBCASE("negatives are non-edges and unique across partitions") {
        std::set<std::pair<int, int>> seen;
        for (const auto& bucket : {split.train_neg, split.test_neg})
            for (const auto& [u, v] : bucket) {
                CHECK_FALSE(g.has_edge(u, v));
                CHECK(u < v);
                CHECK(seen.insert({u, v}).second);
            }
    }
    SUBCASE("train graph has no isolated nodes") {
        for (int v = 0; v < g.node_count(); ++v) CHECK(split.train_graph.degree(v) > 0);
    }
}

TEST_CASE("make_split rejects graphs without enough non-edges") {
    std::vector<Edge> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) edges.push_back({i, j, 1.0});
    const auto k5 = Graph::from_edges(5, std::move(edges));
    CHECK_THROWS_AS(make_split(k5, 0.6, 1), ConfigError);
    CHECK_THROWS_AS(make_split(karate(), 1.5, 1), ConfigError);
}

TEST_CASE("edge_features combiners") {
    EmbeddingMatrix emb;
    emb.values = Matrix(2, 2);
    emb.values(0, 0) = 1.0;
    emb.values(0, 1) = 2.0;
    emb.values(1, 0) = 3.0;
    emb.values(1, 1) = 4.0;
    emb.d = 2;

    const auto had = edge_features(emb, 0, 1, Combiner::Hadamard);
    CHECK(had == std::vector<double>{3.0, 8.0});

    const auto avg = edge_features(emb, 0, 0, Combiner::Average);
    CHECK(avg == std::vector<double>{1.0, 2.0});

    const auto ab = edge_features(emb, 0, 1, Combiner::Concat);
    const auto ba = edge_features(emb, 1, 0, Combiner::Concat);
    CHECK(ab == ba);
    CHECK(ab.size() == 4);
}

TEST_CASE("link classifier") {
    SUBCASE("separable data reaches full training accuracy") {
        Matrix x(40, 2);
        std::vector<int> labels(40);
        auto rng = make_rng(6);
        std::uniform_real_distribution<double> jitter(-0.3, 0.3);
        for (int i = 0; i < 40; ++i) {
            const int label = i % 2;
            x(i, 0) = (label ? 2.0 : -2.0) + jitter(rng);
            x(i, 1) = jitter(rng);
            labels[i] = label;
        }
        ClassifierConfig cfg;
        cfg.epochs = 500;
        cfg.lr = 0.05;
        const auto clf = train_link_classifier(x, labels, cfg);
        CHECK(clf.train_accuracy(x, labels) == doctest::Approx(1.0));
    }
    SUBCASE("shuffled labels give chance-level held-out auc") {
        auto rng = make_rng(14);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::bernoulli_distribution coin(0.5);
        Matrix train(400, 4), test(400, 4);
        std::vector<int> train_labels(400), test_labels(400);
        for (int i = 0; i < 400; ++i) {
            for (int j = 0; j < 4; ++j) {
                train(i, j) = dist(rng);
                test(i, j) = dist(rng);
            }
            train_labels[i] = coin(rng);
            test_labels[i] = coin(rng);
        }
        ClassifierConfig cfg;
        cfg.epochs = 200;
        const auto clf = train_link_classifier(train, train_labels, cfg);
        const double held_out = auc(clf.score_all(test), test_labels);
        CHECK(held_out > 0.40);
        CHECK(held_out < 0.60);
    }
    SUBCASE("same seed, same weights") {
        Matrix x(10, 2);
        std::vector<int> labels(10);
        for (int i = 0; i < 10; ++i) {
            x(i, 0) = i;
            x(i, 1) = -i;
            labels[i] = i % 2;
        }
        ClassifierConfig cfg;
        cfg.epochs = 50;
        const auto a = train_link_classifier(x, labels, cfg);
        const auto b = train_link_classifier(x, labels, cfg);
        CHECK(a.weights() == b.weights());
    }
    SUBCASE("single-class input is rejected") {
        Matrix x(4, 2);
        std::vector<int> labels{1, 1, 1, 1};
        CHECK_THROWS_AS(train_link_classifier(x, labels, ClassifierConfig{}), ConfigError);
    }
}

TEST_CASE("auc") {
    SUBCASE("perfect ordering") {
        const std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
        const std::vector<int> labels{0, 0, 1, 1};
        CHECK(auc(scores, labels) == doctest::Approx(1.0));
    }
    SUBCASE("all ties score one half") {
        const std::vector<double> scores{0.5, 0.5, 0.5, 0.5};
        const std::vector<int> labels{0, 1, 0, 1};
        CHECK(auc(scores, labels) == doctest::Approx(0.5));
    }
    SUBCASE("hand-ranked example") {
        const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
        const std::vector<int> labels{0, 0, 1, 1};
        CHECK(auc(scores, labels) == doctest::Approx(0.75));
    }
    SUBCASE("matches brute-force pair counting") {
        auto rng = make_rng(70);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        std::uniform_int_distribution<int> quantize(0, 4);
        std::bernoulli_distribution coin(0.4);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 5 + trial % 16;
            std::vector<double> scores(n);
            std::vector<int> labels(n);
            bool both = false;
            for (int i = 0; i < n; ++i) {
                scores[i] = quantize(rng) / 4.0;  // force ties
                labels[i] = coin(rng);
            }
            labels[0] = 0;
            labels[1] = 1;
            both = true;
            double pairs = 0.0;
            long long count = 0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    if (labels[p] != 1 || labels[q] != 0) continue;
                    ++count;
                    if (scores[p] > scores[q])
                        pairs += 1.0;
                    else if (scores[p] == scores[q])
                        pairs += 0.5;
                }
            REQUIRE(both);
            CHECK(auc(scores, labels) == doctest::Approx(pairs / count).epsilon(1e-12));
        }
    }
    SUBCASE("one class absent is an error") {
        const std::vector<double> scores{0.1, 0.2};
        const std::vector<int> labels{1, 1};
        CHECK_THROWS_AS(auc(scores, labels), ConfigError);
    }
}

TEST_CASE("welch t test") {
    SUBCASE("identical samples do not separate") {
        const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        CHECK(welch_t(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("distant means separate decisively") {
        std::vector<double> a, b;
        auto rng = make_rng(55);
        std::normal_distribution<double> na(0.0, 1.0), nb(10.0, 1.0);
        for (int i = 0; i < 30; ++i) {
            a.push_back(na(rng));
            b.push_back(nb(rng));
        }
        CHECK(welch_t(a, b) < 1e-10);
    }
    SUBCASE("hand-computed example: t = -1, df = 8") {
        const std::vector<double> a{1, 2, 3, 4, 5};
        const std::vector<double> b{2, 3, 4, 5, 6};
        CHECK(welch_t(a, b) == doctest::Approx(0.3466).epsilon(2e-3));
    }
    SUBCASE("symmetric in its arguments") {
        const std::vector<double> a{1.0, 1.5, 0.7, 2.0};
        const std::vector<double> b{1.1, 2.5, 3.0, 0.2, 1.4};
        CHECK(welch_t(a, b) == doctest::Approx(welch_t(b, a)).epsilon(1e-12));
    }
    SUBCASE("zero variance, equal means") {
        const std::vector<double> a{2.0, 2.0, 2.0};
        const std::vector<double> b{2.0, 2.0};
        CHECK(welch_t(a, b) == 1.0);
        const std::vector<double> c{3.0, 3.0};
        CHECK(welch_t(a, c) == 0.0);
    }
}

TEST_CASE("norm_distribution") {
    const auto g = karate();
    const auto features = normalize_features(structural_features(g, default_feature_set()));

    SUBCASE("identical rows across nodes degenerate to the 0.5 fill") {
        EmbeddingMatrix emb;
        emb.values = Matrix(g.node_count(), 4, 0.0);
        for (int v = 0; v < g.node_count(); ++v)
            for (int k = 0; k < 4; ++k) emb.values(v, k) = k + 1.0;
        FeatureMatrix constant = features;
        for (int v = 0; v < g.node_count(); ++v)
            for (int j = 0; j < constant.values.cols(); ++j) constant.values(v, j) = 0.25;
        const auto norms = norm_distribution(emb, constant);
        CHECK(norms.degenerate);
    }
    SUBCASE("one norm per node") {
        LineConfig cfg;
        cfg.d = 8;
        cfg.epochs = 2;
        cfg.seed = 9;
        const auto emb = line_train(g, cfg);
        const auto norms = norm_distribution(emb, features);
        CHECK(static_cast<int>(norms.per_node.size()) == g.node_count());
        CHECK_FALSE(norms.degenerate);
        CHECK(norms.mean > 0.0);
    }
}

TEST_CASE("run_link_prediction on karate") {
    const auto g = karate();
    EmbedderConfig cfg;
    LineConfig line;
    line.d = 16;
    line.epochs = 8;
    cfg.method = line;

    const auto report = run_link_prediction(g, cfg, 3, 7);
    CHECK(report.folds == 3);
    CHECK(static_cast<int>(report.base.fold_auc.size()) == 3);
    for (double a : report.base.fold_auc) CHECK(a > 0.5);
    CHECK_FALSE(report.xm.has_value());

    SUBCASE("identical seeds reproduce the report") {
        const auto again = run_link_prediction(g, cfg, 3, 7);
        CHECK(again.base.fold_auc == report.base.fold_auc);
        CHECK(again.base.fold_norm_mean == report.base.fold_norm_mean);
    }
}

TEST_CASE("run_link_prediction with xm compares against base") {
    const auto g = karate();
    EmbedderConfig cfg;
    LineConfig line;
    line.d = 8;
    line.epochs = 4;
    line.xm.gamma = 0.3;
    line.xm.delta = 0.3;
    cfg.method = line;
    const auto report = run_link_prediction(g, cfg, 3, 3);
    REQUIRE(report.xm.has_value());
    REQUIRE(report.p_value_norms.has_value());
    CHECK(static_cast<int>(report.xm->fold_auc.size()) == 3);
    CHECK(*report.p_value_norms >= 0.0);
    CHECK(*report.p_value_norms <= 1.0);
}

TEST_CASE("ablation with zero weights is a no-op across cells") {
    const auto g = karate();
    EmbedderConfig cfg;
    LineConfig line;
    line.d = 8;
    line.epochs = 2;
    line.xm.gamma = 0.0;
    line.xm.delta = 0.0;
    cfg.method = line;
    const auto table = ablation(g, cfg, {1, 2, 3});
    REQUIRE(table.cells.size() == 4);
    CHECK(table.cells[0].name == "none");
    CHECK(table.cells[3].name == "both");
    for (int cell = 1; cell < 4; ++cell)
        for (int s = 0; s < 3; ++s)
            CHECK(table.cells[cell].per_seed_norm_mean[s] ==
                  doctest::Approx(table.cells[0].per_seed_norm_mean[s]).epsilon(1e-12));
}

TEST_CASE("ablation requires at least 3 seeds") {
    EmbedderConfig cfg;
    cfg.method = LineConfig{};
    CHECK_THROWS_AS(ablation(karate(), cfg, {1, 2}), ConfigError);
}
