#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "xm/errors.hpp"

namespace {

using xmcli::RunConfig;

void add_graph_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--graph", cfg.graph_path, "edge-list file (\"u v\" or \"u v w\" per line)");
    cmd->add_option("--builtin", cfg.builtin,
                    "builtin graph: karate | barbell:c:p | gnm:n:m:seed | ba:n:k:seed");
    cmd->add_flag("--weighted", cfg.weighted, "parse a third column as edge weight");
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--config", config_path, "JSON config file; its values override flags");
    cmd->add_option("--format", cfg.format, "matrix payload format: csv | json");
    cmd->add_option("--workers", cfg.workers, "worker threads for parallel sections");
}

void add_method_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--method", cfg.method.name, "embedder: line1 | line2 | sdne");
    cmd->add_option("--d", cfg.method.d, "embedding dimensions");
    cmd->add_option("--epochs", cfg.method.epochs, "training epochs (0 = method default)");
    cmd->add_option("--lr", cfg.method.lr, "learning rate (0 = method default)");
    cmd->add_option("--samples-per-epoch", cfg.method.samples_per_epoch,
                    "line: edge samples per epoch (0 = 100 * |E|)");
    cmd->add_option("--negatives", cfg.method.negatives, "line: negative samples per edge");
    cmd->add_option("--hidden", cfg.method.hidden, "sdne: hidden layer sizes");
    cmd->add_option("--alpha", cfg.method.alpha, "sdne: first-order proximity weight");
    cmd->add_option("--beta-recon", cfg.method.beta_recon, "sdne: reconstruction weight");
    cmd->add_option("--nu", cfg.method.nu, "sdne: weight decay");
    cmd->add_option("--beta-pen", cfg.method.beta_pen, "sdne: nonzero-entry penalty (> 1)");
    cmd->add_option("--gamma", cfg.gamma, "sparsity constraint weight");
    cmd->add_option("--delta", cfg.delta, "orthogonality constraint weight");
    cmd->add_flag("--include-diagonal", cfg.include_diagonal,
                  "count diagonal row pairs in the orthogonality term");
}

void add_feature_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--features", cfg.features,
                    "feature names, or: default | all | positional")
        ->delimiter(',');
    cmd->add_option("--anchors", cfg.anchors, "anchor node ids for positional features")
        ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xmgraph: node embeddings with explainable dimensions"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto* features = app.add_subcommand("features", "compute normalized sense features");
    add_graph_options(features, cfg);
    add_feature_options(features, cfg);
    add_common_options(features, cfg, config_path);

    auto* embed = app.add_subcommand("embed", "train node embeddings");
    add_graph_options(embed, cfg);
    add_feature_options(embed, cfg);
    add_method_options(embed, cfg);
    add_common_options(embed, cfg, config_path);
    embed->add_option("--seed", cfg.seed, "random seed")->required();

    auto* explain = app.add_subcommand("explain", "emit per-node explain matrices");
    explain->add_option("--embedding", cfg.embedding_path, "embedding.csv from `embed`");
    explain->add_option("--features-file", cfg.features_path, "features.csv from `features`");
    explain->add_option("--mode", cfg.explain_mode, "normalization: population | per-matrix");
    explain->add_option("--nodes", cfg.nodes, "node ids to export (default: all)")->delimiter(',');
    add_common_options(explain, cfg, config_path);

    auto* linkpred = app.add_subcommand("linkpred", "link prediction benchmark");
    add_graph_options(linkpred, cfg);
    add_feature_options(linkpred, cfg);
    add_method_options(linkpred, cfg);
    add_common_options(linkpred, cfg, config_path);
    linkpred->add_option("--folds", cfg.folds, "number of resampled folds");
    linkpred->add_option("--combiner", cfg.combiner, "edge feature combiner: concat | hadamard | average");
    linkpred->add_option("--train-fraction", cfg.train_fraction, "fraction of edges used for training");
    linkpred->add_option("--seed", cfg.seed, "random seed")->required();

    auto* ablation = app.add_subcommand("ablation", "norm table over the four constraint configs");
    add_graph_options(ablation, cfg);
    add_feature_options(ablation, cfg);
    add_method_options(ablation, cfg);
    add_common_options(ablation, cfg, config_path);
    ablation->add_option("--seeds", cfg.ablation_seeds, "number of seeds per configuration");
    ablation->add_option("--seed", cfg.seed, "base random seed")->required();

    auto* demo = app.add_subcommand("demo", "train base and +XM and export showcase explanations");
    demo->add_option("name", cfg.demo_name, "karate | barbell")->required();
    add_method_options(demo, cfg);
    add_common_options(demo, cfg, config_path);
    demo->add_option("--seed", cfg.seed, "random seed");

    auto* stats = app.add_subcommand("stats", "graph summary statistics");
    add_graph_options(stats, cfg);
    add_common_options(stats, cfg, config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (!config_path.empty()) cfg = xmcli::overlay_config_file(cfg, config_path);
        xmcli::run_command(cfg);
    } catch (const xm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const xm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const xm::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
