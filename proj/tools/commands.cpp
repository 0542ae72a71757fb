#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "xm/errors.hpp"
#include "xm/eval.hpp"
#include "xm/explain.hpp"
#include "xm/features.hpp"
#include "xm/graph.hpp"
#include "xm/io.hpp"
#include "xm/rng.hpp"
#include "xm/serialize.hpp"

namespace xmcli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

long long to_ll(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw xm::ConfigError(std::string("bad integer for ") + what + ": \"" + s + "\"");
    }
}

xm::Graph load_graph(const RunConfig& cfg) {
    const bool has_path = !cfg.graph_path.empty();
    const bool has_builtin = !cfg.builtin.empty();
    if (has_path == has_builtin)
        throw xm::ConfigError("exactly one input source required: --graph or --builtin");
    if (has_path) {
        std::ifstream in(cfg.graph_path);
        if (!in) throw xm::ParseError("cannot open graph file: " + cfg.graph_path);
        xm::LoadStats stats;
        auto g = xm::load_edge_list(in, cfg.weighted, &stats);
        if (stats.self_loops_dropped > 0)
            std::cerr << "warning: dropped " << stats.self_loops_dropped << " self-loop(s)\n";
        if (stats.duplicate_edges_dropped > 0)
            std::cerr << "warning: dropped " << stats.duplicate_edges_dropped
                      << " duplicate edge(s)\n";
        return g;
    }
    const auto parts = split(cfg.builtin, ':');
    const std::string& kind = parts[0];
    if (kind == "karate") return xm::karate();
    if (kind == "barbell") {
        if (parts.size() != 3) throw xm::ConfigError("builtin barbell:<clique_size>:<path_len>");
        return xm::barbell(static_cast<int>(to_ll(parts[1], "clique_size")),
                           static_cast<int>(to_ll(parts[2], "path_len")));
    }
    if (kind == "gnm") {
        if (parts.size() != 4) throw xm::ConfigError("builtin gnm:<n>:<m>:<seed>");
        return xm::gnm_random(static_cast<int>(to_ll(parts[1], "n")),
                              static_cast<int>(to_ll(parts[2], "m")),
                              static_cast<std::uint64_t>(to_ll(parts[3], "seed")));
    }
    if (kind == "ba") {
        if (parts.size() != 4) throw xm::ConfigError("builtin ba:<n>:<attach>:<seed>");
        return xm::barabasi_albert(static_cast<int>(to_ll(parts[1], "n")),
                                   static_cast<int>(to_ll(parts[2], "attach")),
                                   static_cast<std::uint64_t>(to_ll(parts[3], "seed")));
    }
    throw xm::ConfigError("unknown builtin \"" + kind +
                          "\"; expected karate, barbell:c:p, gnm:n:m:seed or ba:n:k:seed");
}

std::string dataset_name(const RunConfig& cfg) {
    if (!cfg.builtin.empty()) return cfg.builtin;
    return fs::path(cfg.graph_path).stem().string();
}

// Structural names plus the "positional" pseudo-feature which expands to the
// anchor columns.
struct FeatureSelection {
    std::vector<xm::Feature> structural;
    bool positional = false;
};

FeatureSelection parse_features(const RunConfig& cfg) {
    FeatureSelection sel;
    std::vector<std::string> tokens = cfg.features;
    if (tokens.empty()) tokens = {"default"};
    for (const auto& token : tokens) {
        if (token == "default") {
            for (auto f : xm::default_feature_set()) sel.structural.push_back(f);
        } else if (token == "all") {
            for (auto f : xm::all_features()) sel.structural.push_back(f);
        } else if (token == "positional") {
            sel.positional = true;
        } else {
            sel.structural.push_back(xm::feature_from_name(token));
        }
    }
    if (sel.positional && cfg.anchors.empty())
        throw xm::ConfigError("positional features require --anchors");
    return sel;
}

xm::FeatureMatrix append_columns(const xm::FeatureMatrix& a, const xm::FeatureMatrix& b) {
    xm::FeatureMatrix out;
    out.values = xm::Matrix(a.values.rows(), a.values.cols() + b.values.cols());
    for (int i = 0; i < a.values.rows(); ++i) {
        for (int j = 0; j < a.values.cols(); ++j) out.values(i, j) = a.values(i, j);
        for (int j = 0; j < b.values.cols(); ++j) out.values(i, a.values.cols() + j) = b.values(i, j);
    }
    out.names = a.names;
    out.names.insert(out.names.end(), b.names.begin(), b.names.end());
    return out;
}

xm::FeatureMatrix compute_features(const xm::Graph& g, const RunConfig& cfg,
                                   const FeatureSelection& sel) {
    xm::FeatureOptions opts;
    opts.workers = cfg.workers;
    xm::FeatureMatrix fm;
    bool have = false;
    if (!sel.structural.empty()) {
        fm = xm::structural_features(g, sel.structural, opts);
        have = true;
    }
    if (sel.positional) {
        auto pos = xm::positional_features(g, cfg.anchors, opts);
        if (pos.unreachable_anchor)
            std::cerr << "warning: some nodes cannot reach an anchor; hop distance set to diameter+1\n";
        fm = have ? append_columns(fm, pos) : std::move(pos);
        have = true;
    }
    if (!have) throw xm::ConfigError("empty feature selection");
    return fm;
}

xm::EmbedderConfig build_embedder(const RunConfig& cfg) {
    xm::XmConfig xm_cfg{cfg.gamma, cfg.delta, cfg.include_diagonal};
    const auto& m = cfg.method;
    if (m.name == "line1" || m.name == "line2") {
        xm::LineConfig line;
        line.order = m.name == "line1" ? 1 : 2;
        line.d = m.d;
        if (m.epochs > 0) line.epochs = m.epochs;
        if (m.lr > 0.0) line.rho0 = m.lr;
        line.samples_per_epoch = m.samples_per_epoch;
        line.negatives = m.negatives;
        line.xm = xm_cfg;
        line.seed = cfg.seed;
        return xm::EmbedderConfig{line};
    }
    if (m.name == "sdne") {
        xm::SdneConfig sdne;
        sdne.d = m.d;
        sdne.hidden = m.hidden;
        if (m.epochs > 0) sdne.epochs = m.epochs;
        if (m.lr > 0.0) sdne.lr = m.lr;
        sdne.alpha = m.alpha;
        sdne.beta_recon = m.beta_recon;
        sdne.nu = m.nu;
        sdne.beta_pen = m.beta_pen;
        sdne.xm = xm_cfg;
        sdne.seed = cfg.seed;
        sdne.workers = cfg.workers;
        return xm::EmbedderConfig{sdne};
    }
    throw xm::ConfigError("unknown method \"" + m.name + "\"; expected line1, line2 or sdne");
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["graph"] = cfg.graph_path;
    j["builtin"] = cfg.builtin;
    j["weighted"] = cfg.weighted;
    j["features"] = cfg.features;
    j["anchors"] = cfg.anchors;
    j["method"] = {{"name", cfg.method.name},
                   {"d", cfg.method.d},
                   {"epochs", cfg.method.epochs},
                   {"lr", cfg.method.lr},
                   {"samples_per_epoch", cfg.method.samples_per_epoch},
                   {"negatives", cfg.method.negatives},
                   {"hidden", cfg.method.hidden},
                   {"alpha", cfg.method.alpha},
                   {"beta_recon", cfg.method.beta_recon},
                   {"nu", cfg.method.nu},
                   {"beta_pen", cfg.method.beta_pen}};
    j["gamma"] = cfg.gamma;
    j["delta"] = cfg.delta;
    j["include_diagonal"] = cfg.include_diagonal;
    j["out"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["format"] = cfg.format;
    j["workers"] = cfg.workers;
    j["folds"] = cfg.folds;
    j["ablation_seeds"] = cfg.ablation_seeds;
    j["combiner"] = cfg.combiner;
    j["explain_mode"] = cfg.explain_mode;
    j["nodes"] = cfg.nodes;
    j["embedding_path"] = cfg.embedding_path;
    j["features_path"] = cfg.features_path;
    j["demo"] = cfg.demo_name;
    j["train_fraction"] = cfg.train_fraction;
    return j;
}

void config_from_json(const json& j, RunConfig& cfg) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("command", cfg.command);
    get("graph", cfg.graph_path);
    get("builtin", cfg.builtin);
    get("weighted", cfg.weighted);
    get("features", cfg.features);
    get("anchors", cfg.anchors);
    if (j.contains("method")) {
        const json& m = j.at("method");
        auto getm = [&](const char* key, auto& field) {
            if (m.contains(key)) field = m.at(key).get<std::decay_t<decltype(field)>>();
        };
        getm("name", cfg.method.name);
        getm("d", cfg.method.d);
        getm("epochs", cfg.method.epochs);
        getm("lr", cfg.method.lr);
        getm("samples_per_epoch", cfg.method.samples_per_epoch);
        getm("negatives", cfg.method.negatives);
        getm("hidden", cfg.method.hidden);
        getm("alpha", cfg.method.alpha);
        getm("beta_recon", cfg.method.beta_recon);
        getm("nu", cfg.method.nu);
        getm("beta_pen", cfg.method.beta_pen);
    }
    get("gamma", cfg.gamma);
    get("delta", cfg.delta);
    get("include_diagonal", cfg.include_diagonal);
    get("out", cfg.out_dir);
    get("seed", cfg.seed);
    get("format", cfg.format);
    get("workers", cfg.workers);
    get("folds", cfg.folds);
    get("ablation_seeds", cfg.ablation_seeds);
    get("combiner", cfg.combiner);
    get("explain_mode", cfg.explain_mode);
    get("nodes", cfg.nodes);
    get("embedding_path", cfg.embedding_path);
    get("features_path", cfg.features_path);
    get("demo", cfg.demo_name);
    get("train_fraction", cfg.train_fraction);
}

void write_config_echo(const RunConfig& cfg, const fs::path& dir,
                       std::uint64_t graph_hash) {
    json j = config_to_json(cfg);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(graph_hash));
    j["graph_hash"] = buf;
    xm::write_text_file((dir / "config.json").string(), j.dump(2) + "\n");
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) throw xm::ConfigError("--out directory is required");
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw xm::ParseError("cannot create output directory: " + cfg.out_dir);
    return dir;
}

xm::ExplainNorm parse_mode(const std::string& mode) {
    if (mode == "population") return xm::ExplainNorm::Population;
    if (mode == "per-matrix") return xm::ExplainNorm::PerMatrix;
    throw xm::ConfigError("unknown explain mode \"" + mode + "\"; expected population or per-matrix");
}

void cmd_stats(const RunConfig& cfg) {
    const auto g = load_graph(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto stats = xm::graph_stats(g);
    xm::write_text_file((dir / "stats.json").string(), xm::graph_stats_json(stats));
    xm::write_text_file((dir / "stats.csv").string(), xm::graph_stats_csv(stats));
    write_config_echo(cfg, dir, xm::content_hash(g));
    std::cerr << "stats: " << stats.node_count << " nodes, " << stats.edge_count << " edges\n";
}

void cmd_features(const RunConfig& cfg) {
    const auto g = load_graph(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto sel = parse_features(cfg);
    auto fm = compute_features(g, cfg, sel);
    fm = xm::normalize_features(fm);
    xm::write_text_file((dir / "features.csv").string(), xm::feature_matrix_csv(fm));
    if (cfg.format == "json")
        xm::write_text_file((dir / "features.json").string(), xm::feature_matrix_json(fm));
    write_config_echo(cfg, dir, xm::content_hash(g));
    std::cerr << "features: wrote " << fm.values.rows() << "x" << fm.values.cols() << " matrix\n";
}

xm::FeatureMatrix features_for_xm(const xm::Graph& g, const RunConfig& cfg) {
    const auto sel = parse_features(cfg);
    return xm::normalize_features(compute_features(g, cfg, sel));
}

void cmd_embed(const RunConfig& cfg) {
    const auto g = load_graph(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto embedder = build_embedder(cfg);
    xm::FeatureMatrix features;
    const bool xm_on = cfg.gamma != 0.0 || cfg.delta != 0.0;
    if (xm_on) features = features_for_xm(g, cfg);
    const auto emb = xm::train_embedding(g, embedder, xm_on ? &features : nullptr);
    xm::write_text_file((dir / "embedding.csv").string(), xm::embedding_csv(emb));
    xm::write_text_file((dir / "embedding.json").string(),
                        xm::embedding_json(emb, xm::content_hash(g)));
    write_config_echo(cfg, dir, xm::content_hash(g));
    double total = 0.0;
    for (double s : emb.epoch_seconds) total += s;
    std::cerr << "embed: " << emb.method << " d=" << emb.d << " trained in " << total << " s\n";
}

void cmd_explain(const RunConfig& cfg) {
    if (cfg.embedding_path.empty() || cfg.features_path.empty())
        throw xm::ConfigError("explain requires --embedding and --features-file");
    const auto dir = prepare_out_dir(cfg);
    const auto emb = xm::read_embedding_csv(cfg.embedding_path);
    const auto fm = xm::read_feature_matrix_csv(cfg.features_path);
    if (emb.values.rows() != fm.values.rows())
        throw xm::ConfigError("embedding and feature files disagree on the node count");
    const auto mode = parse_mode(cfg.explain_mode);

    const int n = emb.values.rows();
    std::vector<xm::ExplainMatrix> batch;
    batch.reserve(n);
    for (int v = 0; v < n; ++v) {
        batch.push_back(xm::explain_matrix(emb.values.row(v), fm.values.row(v)));
        batch.back().node_id = v;
    }
    xm::normalize_explain(batch, mode);

    std::vector<int> selection = cfg.nodes;
    if (selection.empty()) {
        selection.resize(n);
        for (int v = 0; v < n; ++v) selection[v] = v;
    }
    for (int v : selection) {
        if (v < 0 || v >= n) throw xm::ConfigError("explain: node id out of range: " + std::to_string(v));
        const std::string stem = "explain_node" + std::to_string(v);
        xm::write_text_file((dir / (stem + ".csv")).string(),
                            xm::explain_csv(batch[v], fm.names, /*normalized_view=*/true));
        if (cfg.format == "json")
            xm::write_text_file((dir / (stem + ".json")).string(), xm::explain_json(batch[v], fm.names));
    }

    xm::NormSummary norms;
    norms.per_node.resize(n);
    for (int v = 0; v < n; ++v) norms.per_node[v] = xm::nuclear_norm(*batch[v].normalized);
    xm::write_text_file((dir / "norms.csv").string(), xm::norm_summary_csv(norms));
    std::cerr << "explain: wrote " << selection.size() << " matrices\n";
}

void cmd_linkpred(const RunConfig& cfg) {
    const auto g = load_graph(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto embedder = build_embedder(cfg);
    xm::LinkPredictionOptions opts;
    opts.train_fraction = cfg.train_fraction;
    opts.combiner = xm::combiner_from_name(cfg.combiner);
    opts.workers = cfg.workers;
    opts.dataset_name = dataset_name(cfg);
    const auto report = xm::run_link_prediction(g, embedder, cfg.folds, cfg.seed, opts);
    xm::write_text_file((dir / "report.json").string(), xm::eval_report_json(report));
    xm::write_text_file((dir / "report.csv").string(), xm::eval_report_csv(report));
    write_config_echo(cfg, dir, xm::content_hash(g));
    std::cerr << "linkpred: base auc " << report.base.auc_mean;
    if (report.xm) std::cerr << ", xm auc " << report.xm->auc_mean;
    std::cerr << "\n";
}

void cmd_ablation(const RunConfig& cfg) {
    const auto g = load_graph(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto embedder = build_embedder(cfg);
    if (cfg.ablation_seeds < 3) throw xm::ConfigError("ablation needs --seeds of at least 3");
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < cfg.ablation_seeds; ++k) seeds.push_back(xm::derive_seed(cfg.seed, k));
    xm::LinkPredictionOptions opts;
    opts.workers = cfg.workers;
    opts.dataset_name = dataset_name(cfg);
    const auto table = xm::ablation(g, embedder, seeds, opts);
    xm::write_text_file((dir / "ablation.json").string(), xm::ablation_json(table));
    xm::write_text_file((dir / "ablation.csv").string(), xm::ablation_csv(table));
    write_config_echo(cfg, dir, xm::content_hash(g));
    for (const auto& cell : table.cells)
        std::cerr << "ablation: " << cell.name << " norm " << cell.norm_mean << " +- " << cell.norm_se
                  << " (" << cell.sec_per_epoch << " s/epoch)\n";
}

void demo_bundle(const xm::Graph& g, const RunConfig& cfg, const fs::path& dir,
                 const std::string& tag, const std::vector<int>& nodes,
                 const std::vector<std::pair<std::string, xm::FeatureMatrix>>& feature_sets) {
    for (const bool use_xm : {false, true}) {
        RunConfig run = cfg;
        if (!use_xm) {
            run.gamma = 0.0;
            run.delta = 0.0;
        }
        const auto embedder = build_embedder(run);
        // training features: structural defaults, like the quantitative runs
        const auto& train_features = feature_sets.front().second;
        const auto emb =
            xm::train_embedding(g, embedder, use_xm ? &train_features : nullptr);
        for (const auto& [set_name, fm] : feature_sets) {
            std::vector<xm::ExplainMatrix> batch;
            for (int v = 0; v < g.node_count(); ++v) {
                batch.push_back(xm::explain_matrix(emb.values.row(v), fm.values.row(v)));
                batch.back().node_id = v;
            }
            xm::normalize_explain(batch, xm::ExplainNorm::PerMatrix);
            for (int v : nodes) {
                std::string name = tag + "_node" + std::to_string(v) + "_" +
                                   (use_xm ? "xm" : "base");
                if (feature_sets.size() > 1) name += "_" + set_name;
                xm::write_text_file((dir / (name + ".csv")).string(),
                                    xm::explain_csv(batch[v], fm.names, /*normalized_view=*/true));
            }
        }
    }
}

void cmd_demo(const RunConfig& cfg) {
    const auto dir = prepare_out_dir(cfg);
    RunConfig run = cfg;
    run.method.name = "sdne";
    run.method.d = 16;
    if (run.gamma == 0.0 && run.delta == 0.0) {
        run.gamma = 2.0;
        run.delta = 2.0;
    }
    if (cfg.demo_name == "karate") {
        const auto g = xm::karate();
        run.builtin = "karate";
        run.graph_path.clear();
        xm::FeatureOptions opts;
        opts.workers = cfg.workers;
        const auto structural =
            xm::normalize_features(xm::structural_features(g, xm::default_feature_set(), opts));
        // instructor, a student, the president (0-indexed 0, 11, 33)
        demo_bundle(g, run, dir, "karate", {0, 11, 33}, {{"structural", structural}});
        write_config_echo(run, dir, xm::content_hash(g));
    } else if (cfg.demo_name == "barbell") {
        const auto g = xm::barbell(5, 0);
        run.builtin = "barbell:5:0";
        run.graph_path.clear();
        xm::FeatureOptions opts;
        opts.workers = cfg.workers;
        const auto structural =
            xm::normalize_features(xm::structural_features(g, xm::default_feature_set(), opts));
        // one anchor per clique
        const auto positional = xm::normalize_features(xm::positional_features(g, {0, 9}, opts));
        // bridge node of the top clique and a plain node of the bottom one
        demo_bundle(g, run, dir, "barbell", {5, 0},
                    {{"structural", structural}, {"positional", positional}});
        write_config_echo(run, dir, xm::content_hash(g));
    } else {
        throw xm::ConfigError("unknown demo \"" + cfg.demo_name + "\"; expected karate or barbell");
    }
    std::cerr << "demo: bundle written to " << dir << "\n";
}

}  // namespace

RunConfig overlay_config_file(const RunConfig& base, const std::string& path) {
    RunConfig merged = base;
    json j;
    try {
        j = json::parse(xm::read_text_file(path));
    } catch (const json::parse_error& e) {
        throw xm::ParseError("config file " + path + ": " + e.what());
    }
    try {
        config_from_json(j, merged);
    } catch (const json::exception& e) {
        throw xm::ConfigError("config file " + path + ": " + e.what());
    }
    return merged;
}

void run_command(const RunConfig& cfg) {
    if (cfg.command == "stats") return cmd_stats(cfg);
    if (cfg.command == "features") return cmd_features(cfg);
    if (cfg.command == "embed") return cmd_embed(cfg);
    if (cfg.command == "explain") return cmd_explain(cfg);
    if (cfg.command == "linkpred") return cmd_linkpred(cfg);
    if (cfg.command == "ablation") return cmd_ablation(cfg);
    if (cfg.command == "demo") return cmd_demo(cfg);
    throw xm::ConfigError("unknown command \"" + cfg.command + "\"");
}

}  // namespace xmcli
