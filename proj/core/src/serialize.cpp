#include "xm/serialize.hpp"

#include <sstream>

#include <json.hpp>

#include "xm/errors.hpp"
#include "xm/io.hpp"

namespace xm {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string hex_hash(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string feature_matrix_csv(const FeatureMatrix& fm) {
    return csv_to_string(fm.names, fm.values);
}

std::string feature_matrix_json(const FeatureMatrix& fm) {
    json j;
    j["names"] = fm.names;
    j["normalized"] = fm.normalized;
    if (fm.normalized) {
        j["col_min"] = fm.col_min;
        j["col_max"] = fm.col_max;
        j["constant_columns"] = std::vector<int>(fm.constant_columns.begin(), fm.constant_columns.end());
    }
    j["values"] = matrix_to_json(fm.values);
    return j.dump(2) + "\n";
}

FeatureMatrix read_feature_matrix_csv(const std::string& path) {
    auto table = read_csv_file(path);
    FeatureMatrix fm;
    fm.names = std::move(table.header);
    fm.values = std::move(table.values);
    if (fm.names.empty()) {
        for (int j = 0; j < fm.values.cols(); ++j) fm.names.push_back("f" + std::to_string(j));
    }
    if (static_cast<int>(fm.names.size()) != fm.values.cols())
        throw ParseError("feature csv: header width does not match data width");
    // a matrix whose every entry sits in [0, 1] is taken as already normalized
    bool unit_range = true;
    for (double x : fm.values.data())
        if (x < 0.0 || x > 1.0) {
            unit_range = false;
            break;
        }
    fm.normalized = unit_range;
    return fm;
}

std::string embedding_csv(const EmbeddingMatrix& emb) {
    std::vector<std::string> header;
    header.reserve(emb.values.cols());
    for (int j = 0; j < emb.values.cols(); ++j) header.push_back("y" + std::to_string(j));
    return csv_to_string(header, emb.values);
}

std::string embedding_json(const EmbeddingMatrix& emb, std::uint64_t graph_hash) {
    json j;
    j["method"] = emb.method;
    j["d"] = emb.d;
    j["nodes"] = emb.values.rows();
    j["xm_enabled"] = emb.xm_enabled;
    j["seed"] = emb.seed;
    j["epochs"] = emb.epochs;
    j["epoch_seconds"] = emb.epoch_seconds;
    j["graph_hash"] = hex_hash(graph_hash);
    return j.dump(2) + "\n";
}

EmbeddingMatrix read_embedding_csv(const std::string& path) {
    auto table = read_csv_file(path);
    EmbeddingMatrix emb;
    emb.values = std::move(table.values);
    emb.d = emb.values.cols();
    emb.method = "loaded";
    return emb;
}

std::string explain_csv(const ExplainMatrix& e, const std::vector<std::string>& feature_names,
                        bool normalized_view) {
    const Matrix* m = &e.raw;
    if (normalized_view) {
        if (!e.normalized) throw ConfigError("explain_csv: normalized view not computed");
        m = &*e.normalized;
    }
    std::vector<std::string> header = feature_names;
    if (header.empty())
        for (int j = 0; j < m->cols(); ++j) header.push_back("f" + std::to_string(j));
    if (static_cast<int>(header.size()) != m->cols())
        throw ConfigError("explain_csv: feature name count does not match matrix width");
    return csv_to_string(header, *m);
}

std::string explain_json(const ExplainMatrix& e, const std::vector<std::string>& feature_names) {
    json j;
    j["node_id"] = e.node_id;
    j["features"] = feature_names;
    j["raw"] = matrix_to_json(e.raw);
    if (e.normalized) {
        j["normalized"] = matrix_to_json(*e.normalized);
        j["mode"] = e.mode == ExplainNorm::Population ? "population" : "per-matrix";
    }
    return j.dump(2) + "\n";
}

std::string graph_stats_json(const GraphStats& s) {
    json j;
    j["nodes"] = s.node_count;
    j["edges"] = s.edge_count;
    j["mean_degree"] = s.mean_degree;
    j["degree_std"] = s.degree_std;
    j["degree_assortativity"] = s.degree_assortativity;
    j["mean_clustering"] = s.mean_clustering;
    j["transitivity"] = s.transitivity;
    j["degenerate"] = s.degenerate;
    return j.dump(2) + "\n";
}

std::string graph_stats_csv(const GraphStats& s) {
    std::ostringstream os;
    os << "nodes,edges,mean_degree,degree_std,degree_assortativity,mean_clustering,transitivity\n"
       << s.node_count << ',' << s.edge_count << ',' << format_double(s.mean_degree) << ','
       << format_double(s.degree_std) << ',' << format_double(s.degree_assortativity) << ','
       << format_double(s.mean_clustering) << ',' << format_double(s.transitivity) << "\n";
    return os.str();
}

namespace {

// Measured wall-clock values stay out of the JSON payloads so repeat runs
// with one seed are byte-identical; the flat CSV row keeps its
// seconds-per-epoch column as the timing record.
json variant_to_json(const VariantResult& v) {
    json j;
    j["auc"] = v.fold_auc;
    j["auc_mean"] = v.auc_mean;
    j["auc_se"] = v.auc_se;
    j["norm_mean_per_fold"] = v.fold_norm_mean;
    j["norm_mean"] = v.norm_mean;
    j["norm_se"] = v.norm_se;
    return j;
}

void report_row(std::ostringstream& os, const EvalReport& r, const VariantResult& v, bool xm_row) {
    os << r.dataset << ',' << r.method << ',' << format_double(xm_row ? r.gamma : 0.0) << ','
       << format_double(xm_row ? r.delta : 0.0) << ',' << format_double(v.auc_mean) << ','
       << format_double(v.auc_se) << ',' << format_double(v.norm_mean) << ','
       << format_double(v.norm_se) << ','
       << (r.p_value_norms ? format_double(*r.p_value_norms) : "") << ','
       << format_double(v.sec_per_epoch) << "\n";
}

}  // namespace

std::string eval_report_json(const EvalReport& r) {
    json j;
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    j["gamma"] = r.gamma;
    j["delta"] = r.delta;
    j["combiner"] = combiner_name(r.combiner);
    j["base"] = variant_to_json(r.base);
    if (r.xm) j["xm"] = variant_to_json(*r.xm);
    if (r.p_value_norms) j["p_value_norms"] = *r.p_value_norms;
    return j.dump(2) + "\n";
}

std::string eval_report_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "dataset,method,gamma,delta,auc_mean,auc_se,norm_mean,norm_se,p_value_norms,sec_per_epoch\n";
    report_row(os, r, r.base, false);
    if (r.xm) report_row(os, r, *r.xm, true);
    return os.str();
}

std::string ablation_json(const AblationTable& t) {
    json j;
    j["dataset"] = t.dataset;
    j["method"] = t.method;
    json cells = json::array();
    for (const auto& cell : t.cells) {
        json c;
        c["config"] = cell.name;
        c["gamma"] = cell.gamma;
        c["delta"] = cell.delta;
        c["norm_mean_per_seed"] = cell.per_seed_norm_mean;
        c["norm_mean"] = cell.norm_mean;
        c["norm_se"] = cell.norm_se;
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

std::string ablation_csv(const AblationTable& t) {
    std::ostringstream os;
    os << "dataset,method,config,gamma,delta,norm_mean,norm_se\n";
    for (const auto& cell : t.cells) {
        os << t.dataset << ',' << t.method << ',' << cell.name << ','
           << format_double(cell.gamma) << ',' << format_double(cell.delta) << ','
           << format_double(cell.norm_mean) << ',' << format_double(cell.norm_se) << "\n";
    }
    return os.str();
}

std::string norm_summary_csv(const NormSummary& norms) {
    std::ostringstream os;
    os << "node,nuclear_norm\n";
    for (std::size_t v = 0; v < norms.per_node.size(); ++v)
        os << v << ',' << format_double(norms.per_node[v]) << "\n";
    return os.str();
}

}  // namespace xm
