#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xmcli {

struct MethodOptions {
    std::string name = "line1";  // line1 | line2 | sdne
    int d = 16;
    int epochs = 0;     // 0 = per-method default
    double lr = 0.0;    // 0 = per-method default
    long long samples_per_epoch = 0;  // line, 0 = 100 * |E|
    int negatives = 5;                // line
    std::vector<int> hidden = {256};  // sdne
    double alpha = 0.2;               // sdne first-order weight
    double beta_recon = 1.0;          // sdne reconstruction weight
    double nu = 1e-4;                 // sdne weight decay
    double beta_pen = 10.0;           // sdne nonzero-entry penalty
};

// Resolved invocation; round-trips losslessly through its JSON file form.
struct RunConfig {
    std::string command;
    std::string graph_path;  // exactly one of graph_path/builtin
    std::string builtin;
    bool weighted = false;
    std::vector<std::string> features;  // names, or "default" / "all" / "positional"
    std::vector<int> anchors;
    MethodOptions method;
    double gamma = 0.0;
    double delta = 0.0;
    bool include_diagonal = false;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::string format = "csv";  // csv | json matrix payloads
    int workers = 1;
    int folds = 3;
    int ablation_seeds = 5;
    std::string combiner = "concat";
    std::string explain_mode = "population";  // population | per-matrix
    std::vector<int> nodes;                   // explain: selection, empty = all
    std::string embedding_path;               // explain inputs
    std::string features_path;
    std::string demo_name = "karate";
    double train_fraction = 0.6;
};

// Applies the JSON file on top of `base` (file values win) and returns the
// merged config.
RunConfig overlay_config_file(const RunConfig& base, const std::string& path);

// Executes cfg.command; throws xm errors on failure.
void run_command(const RunConfig& cfg);

}  // namespace xmcli
