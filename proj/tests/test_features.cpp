#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support/oracles.hpp"
#include "xm/errors.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"
#include "xm/rng.hpp"

using namespace xm;

namespace {

Graph path3() {
    return Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
}

Graph k2() { return Graph::from_edges(2, {{0, 1, 1.0}}); }

Graph complete(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    return Graph::from_edges(n, std::move(edges));
}

Graph star(int leaves) {
    std::vector<Edge> edges;
    for (int i = 1; i <= leaves; ++i) edges.push_back({0, i, 1.0});
    return Graph::from_edges(leaves + 1, std::move(edges));
}

}  // namespace

TEST_CASE("degree column equals adjacency row sums") {
    const auto g = karate();
    const auto fm = structural_features(g, {Feature::Degree});
    for (int v = 0; v < g.node_count(); ++v) CHECK(fm.values(v, 0) == doctest::Approx(g.degree(v)));
    CHECK(fm.values(33, 0) == doctest::Approx(17.0));
}

TEST_CASE("clustering is 1 on a clique") {
    const auto fm = structural_features(complete(5), {Feature::Clustering});
    for (int v = 0; v < 5; ++v) CHECK(fm.values(v, 0) == doctest::Approx(1.0));
}

TEST_CASE("star center has average neighbor degree 1") {
    const auto fm = structural_features(star(5), {Feature::AvgNeighborDegree});
    CHECK(fm.values(0, 0) == doctest::Approx(1.0));
    for (int leaf = 1; leaf <= 5; ++leaf) CHECK(fm.values(leaf, 0) == doctest::Approx(5.0));
}

TEST_CASE("personalized pagerank fixed points") {
    SUBCASE("single node keeps all mass") {
        bool degenerate = false;
        const auto p = personalized_pagerank(Graph::from_edges(1, {}), 0, 0.85, 1e-10, 10000,
                                             &degenerate);
        CHECK(p[0] == doctest::Approx(1.0));
        CHECK(degenerate);
    }
    SUBCASE("two nodes split mass per the damping") {
        const auto p = personalized_pagerank(k2(), 0, 0.85, 1e-12);
        CHECK(p[0] == doctest::Approx(0.15 / (1.0 - 0.7225)).epsilon(1e-8));  // 0.5405...
        CHECK(p[1] == doctest::Approx(0.85 * 0.15 / (1.0 - 0.7225)).epsilon(1e-8));
    }
    SUBCASE("entries sum to one") {
        for (const auto& g : oracle::small_graph_suite(10, 10, 3)) {
            const auto p = personalized_pagerank(g, 0, 0.85, 1e-10);
            CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("katz centrality") {
    SUBCASE("symmetric on two nodes") {
        const auto x = katz_centrality(k2(), 0.4, 1.0);
        CHECK(x[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
        CHECK(x[1] == doctest::Approx(x[0]).epsilon(1e-12));
    }
    SUBCASE("path of three against the dense solve") {
        // exact solution of (I - 0.1 A) x = 1 is (55/49, 60/49, 55/49)
        const auto reference = oracle::katz_dense(path3(), 0.1, 1.0);
        const double norm = std::sqrt(2.0 * 55 * 55 + 60.0 * 60) / 49.0;
        CHECK(reference[0] == doctest::Approx((55.0 / 49.0) / norm).epsilon(1e-12));
        CHECK(reference[1] == doctest::Approx((60.0 / 49.0) / norm).epsilon(1e-12));
        const auto x = katz_centrality(path3(), 0.1, 1.0);
        for (int v = 0; v < 3; ++v) CHECK(x[v] == doctest::Approx(reference[v]).epsilon(1e-9));
    }
    SUBCASE("karate against the dense solve") {
        const auto g = karate();
        const double alpha = katz_default_alpha(g);
        const auto x = katz_centrality(g, alpha, 1.0);
        const auto reference = oracle::katz_dense(g, alpha, 1.0);
        for (int v = 0; v < g.node_count(); ++v)
            CHECK(x[v] == doctest::Approx(reference[v]).epsilon(1e-8));
    }
    SUBCASE("alpha beyond the spectral radius diverges") {
        // K2 has lambda_max = 1, so alpha = 1.2 cannot converge
        CHECK_THROWS_AS(katz_centrality(k2(), 1.2, 1.0), NumericalError);
    }
}

TEST_CASE("eccentricity") {
    const auto p3 = eccentricity(path3());
    CHECK(p3[0] == 2);
    CHECK(p3[1] == 1);
    CHECK(p3[2] == 2);

    for (double e : eccentricity(complete(5))) CHECK(e == 1);

    const auto bb = eccentricity(barbell(5, 0));
    CHECK(bb[4] == 2);
    CHECK(bb[5] == 2);
    for (int v : {0, 1, 2, 3, 6, 7, 8, 9}) CHECK(bb[v] == 3);
}

TEST_CASE("burt constraint") {
    const auto both = burt_constraint(k2());
    CHECK(both[0] == doctest::Approx(1.0));
    CHECK(both[1] == doctest::Approx(1.0));

    const auto s = burt_constraint(star(5));
    for (int leaf = 1; leaf <= 5; ++leaf) CHECK(s[leaf] == doctest::Approx(1.0));

    const auto tri = burt_constraint(complete(3));
    for (int v = 0; v < 3; ++v) CHECK(tri[v] == doctest::Approx(1.125));  // 2 * (0.5 + 0.25)^2
}

TEST_CASE("betweenness") {
    const auto p3 = betweenness(path3());
    CHECK(p3[0] == doctest::Approx(0.0));
    CHECK(p3[1] == doctest::Approx(1.0));
    CHECK(p3[2] == doctest::Approx(0.0));

    for (double b : betweenness(complete(5))) CHECK(b == doctest::Approx(0.0));

    const auto g = barbell(5, 0);
    const auto bc = betweenness(g);
    const auto reference = oracle::betweenness_paths(g);
    for (int v = 0; v < g.node_count(); ++v)
        CHECK(bc[v] == doctest::Approx(reference[v]).epsilon(1e-10));
    // the bridge endpoints dominate
    for (int v : {0, 1, 2, 3, 6, 7, 8, 9}) {
        CHECK(bc[4] > bc[v]);
        CHECK(bc[5] > bc[v]);
    }
}

TEST_CASE("feature oracles agree on the small-graph suite") {
    const auto suite = oracle::small_graph_suite(40, 12, 21);
    for (const auto& g : suite) {
        const auto bc = betweenness(g);
        const auto bc_ref = oracle::betweenness_paths(g);
        const auto ecc = eccentricity(g);
        const auto ecc_ref = oracle::eccentricity_bfs(g);
        const auto ego = ego_net_edges(g);
        const auto ego_ref = oracle::ego_edges_subgraph(g);
        const double alpha = katz_default_alpha(g);
        const auto katz = katz_centrality(g, alpha, 1.0);
        const auto katz_ref = oracle::katz_dense(g, alpha, 1.0);
        for (int v = 0; v < g.node_count(); ++v) {
            CHECK(bc[v] == doctest::Approx(bc_ref[v]).epsilon(1e-9));
            CHECK(ecc[v] == ecc_ref[v]);
            CHECK(ego[v] == ego_ref[v]);
            CHECK(katz[v] == doctest::Approx(katz_ref[v]).epsilon(1e-8));
        }
        for (int v : {0, g.node_count() - 1}) {
            const auto p = personalized_pagerank(g, v, 0.85, 1e-10);
            const auto p_ref = oracle::ppr_dense(g, v, 0.85);
            for (int u = 0; u < g.node_count(); ++u)
                CHECK(p[u] == doctest::Approx(p_ref[u]).epsilon(1e-6));
        }
    }
}

TEST_CASE("structural features are permutation equivariant") {
    const auto g = barbell(4, 1);
    const int n = g.node_count();
    auto rng = make_rng(123);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<Edge> relabeled;
    for (const auto& e : g.edges()) relabeled.push_back({perm[e.u], perm[e.v], e.w});
    const auto h = Graph::from_edges(n, std::move(relabeled));

    const std::vector<Feature> set = {Feature::Degree, Feature::Clustering, Feature::PprStd,
                                      Feature::AvgNeighborDegree, Feature::Betweenness,
                                      Feature::Eccentricity, Feature::Katz};
    const auto fg = structural_features(g, set);
    const auto fh = structural_features(h, set);
    for (int v = 0; v < n; ++v)
        for (int j = 0; j < fg.values.cols(); ++j)
            CHECK(fg.values(v, j) == doctest::Approx(fh.values(perm[v], j)).epsilon(1e-7));
}

TEST_CASE("feature workers do not change the output") {
    const auto g = karate();
    FeatureOptions serial;
    FeatureOptions parallel;
    parallel.workers = 4;
    const auto a = structural_features(g, default_feature_set(), serial);
    const auto b = structural_features(g, default_feature_set(), parallel);
    CHECK(a.values.data() == b.values.data());  // bitwise identical
}

TEST_CASE("positional features") {
    SUBCASE("hops separate barbell cliques") {
        const auto g = barbell(5, 0);
        const auto fm = positional_features(g, {0});  // anchor in the bottom clique
        for (int v = 0; v <= 4; ++v) CHECK(fm.values(v, 0) <= 1.0);
        for (int v = 5; v <= 9; ++v) CHECK(fm.values(v, 0) >= 2.0);
    }
    SUBCASE("anchor distance to itself is zero") {
        const auto fm = positional_features(karate(), {7});
        CHECK(fm.values(7, 0) == 0.0);
    }
    SUBCASE("path endpoints") {
        const auto fm = positional_features(path3(), {0});
        CHECK(fm.values(0, 0) == 0.0);
        CHECK(fm.values(1, 0) == 1.0);
        CHECK(fm.values(2, 0) == 2.0);
    }
    SUBCASE("unreachable anchor flags and caps the distance") {
        // two disconnected edges
        const auto g = Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
        const auto fm = positional_features(g, {0});
        CHECK(fm.unreachable_anchor);
        CHECK(fm.values(2, 0) == doctest::Approx(2.0));  // diameter 1, so 1 + 1
    }
    SUBCASE("hop columns obey the triangle inequality through anchors") {
        const auto g = karate();
        const auto fm = positional_features(g, {0, 33});
        for (int v = 0; v < g.node_count(); ++v) {
            const double via0 = fm.values(v, 0) + fm.values(33, 0);
            CHECK(fm.values(v, 2) <= via0 + 1e-12);  // d(v,33) <= d(v,0) + d(0,33)
        }
    }
    SUBCASE("anchors must be valid") {
        CHECK_THROWS_AS(positional_features(path3(), {}), ConfigError);
        CHECK_THROWS_AS(positional_features(path3(), {9}), ConfigError);
    }
}

TEST_CASE("normalize_features") {
    FeatureMatrix fm;
    fm.values = Matrix(3, 2);
    fm.names = {"a", "b"};
    const double column[3] = {2.0, 4.0, 6.0};
    for (int i = 0; i < 3; ++i) {
        fm.values(i, 0) = column[i];
        fm.values(i, 1) = 3.0;  // constant
    }
    const auto norm = normalize_features(fm);
    CHECK(norm.values(0, 0) == doctest::Approx(0.0));
    CHECK(norm.values(1, 0) == doctest::Approx(0.5));
    CHECK(norm.values(2, 0) == doctest::Approx(1.0));
    CHECK(norm.constant_columns[1]);
    for (int i = 0; i < 3; ++i) CHECK(norm.values(i, 1) == doctest::Approx(0.5));

    SUBCASE("idempotent on normalized input") {
        const auto again = normalize_features(norm);
        CHECK(again.values.data() == norm.values.data());
    }
    SUBCASE("karate max degree node maps to 1") {
        const auto g = karate();
        const auto degrees = normalize_features(structural_features(g, {Feature::Degree}));
        CHECK(degrees.values(33, 0) == doctest::Approx(1.0));
    }
    SUBCASE("the ppr mean column is constant by construction and flagged") {
        const auto g = karate();
        const auto fm2 = normalize_features(structural_features(g, {Feature::PprMean}));
        CHECK(fm2.constant_columns[0]);
    }
}

TEST_CASE("feature_correlations") {
    FeatureMatrix fm;
    fm.values = Matrix(100, 3);
    auto rng = make_rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x = dist(rng);
        fm.values(i, 0) = x;
        fm.values(i, 1) = x;      // duplicate
        fm.values(i, 2) = 0.25;   // constant
    }
    fm.names = {"x", "x2", "c"};
    const auto corr = feature_correlations(fm);
    CHECK(corr(0, 1) == doctest::Approx(1.0));
    CHECK(corr(0, 2) == doctest::Approx(0.0));
    CHECK(corr(1, 1) == doctest::Approx(1.0));

    SUBCASE("independent noise decorrelates") {
        FeatureMatrix noise;
        noise.values = Matrix(1000, 2);
        for (int i = 0; i < 1000; ++i) {
            noise.values(i, 0) = dist(rng);
            noise.values(i, 1) = dist(rng);
        }
        noise.names = {"u", "v"};
        CHECK(feature_correlations(noise)(0, 1) < 0.2);
    }
    SUBCASE("degree and degree centrality are proportional") {
        const auto g = karate();
        const auto fm2 = structural_features(g, {Feature::Degree, Feature::DegreeCentrality});
        CHECK(feature_correlations(fm2)(0, 1) == doctest::Approx(1.0));
    }
}

TEST_CASE("weighted degree collapses to degree on unweighted graphs") {
    const auto g = karate();
    const auto fm = structural_features(g, {Feature::Degree, Feature::WeightedDegree});
    for (int v = 0; v < g.node_count(); ++v)
        CHECK(fm.values(v, 0) == doctest::Approx(fm.values(v, 1)));
}

TEST_CASE("unknown feature names list the valid ones") {
    CHECK_THROWS_WITH_AS(feature_from_name("nope"), doctest::Contains("valid names"), ConfigError);
    CHECK(feature_from_name("katz") == Feature::Katz);
}

TEST_CASE("pagerank is stochastic and eigenvector centrality matches power iteration") {
    const auto g = karate();
    const auto pr = pagerank(g);
    CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    const auto ev = eigenvector_centrality(g);
    CHECK(l2_norm(ev) == doctest::Approx(1.0).epsilon(1e-9));
    // highest-degree hubs carry the most eigenvector mass in this graph
    CHECK(ev[33] > ev[11]);
}
