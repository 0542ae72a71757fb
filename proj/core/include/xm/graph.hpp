#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace xm {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

struct Neighbor {
    int id = 0;
    double w = 1.0;
};

// Undirected simple graph with dense node ids 0..n-1. Immutable after
// construction; safe to share across worker threads.
class Graph {
public:
    Graph() = default;

    // edges must be canonical: u < v, no duplicates, ids within range.
    // Labels are optional; defaults to the decimal id.
    static Graph from_edges(int node_count, std::vector<Edge> edges,
                            std::vector<std::string> labels = {});

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const Neighbor> neighbors(int v) const;
    int degree(int v) const;
    double weighted_degree(int v) const;
    bool has_edge(int u, int v) const;

    const std::string& label(int v) const { return labels_[v]; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool weighted() const { return weighted_; }

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;                 // canonical u < v, sorted
    std::vector<int> adj_offsets_;            // size n+1
    std::vector<Neighbor> adj_;               // sorted per node
    std::vector<std::string> labels_;
    bool weighted_ = false;
};

struct LoadStats {
    int self_loops_dropped = 0;
    int duplicate_edges_dropped = 0;
};

// Parses an edge list: one "u v" or "u v w" pair per line, '#' starts a
// comment. Labels are arbitrary tokens; they are kept as-is when they form
// a dense 0..n-1 integer range and are remapped to dense ids in order of
// first appearance otherwise. Self-loops are dropped and counted.
Graph load_edge_list(std::istream& in, bool weighted, LoadStats* stats = nullptr);

// Writes the graph in the same edge-list format ("# nodes <n>" header, one
// edge per line; weights included only for weighted graphs), so that
// load_edge_list(serialize(g)) reproduces g on canonical graphs.
void serialize(const Graph& g, std::ostream& out);
std::string serialize_to_string(const Graph& g);

// FNV-1a over the canonical serialization; stable content fingerprint used
// to stamp output bundles.
std::uint64_t content_hash(const Graph& g);

// Zachary's karate club network: 34 nodes, 78 edges, bundled as data.
Graph karate();

// Two cliques of clique_size joined by a path of path_len intermediate
// nodes; path_len = 0 joins them by a single bridge edge.
Graph barbell(int clique_size, int path_len);

// Uniform random graph with exactly m distinct edges.
Graph gnm_random(int n, int m, std::uint64_t seed);

// Preferential-attachment graph; every new node attaches to `attach`
// distinct existing nodes with probability proportional to degree.
Graph barabasi_albert(int n, int attach, std::uint64_t seed);

struct GraphStats {
    int node_count = 0;
    int edge_count = 0;
    double mean_degree = 0.0;
    double degree_std = 0.0;
    double degree_assortativity = 0.0;
    double mean_clustering = 0.0;
    double transitivity = 0.0;
    bool degenerate = false;  // single node or otherwise undefined statistics
};

GraphStats graph_stats(const Graph& g);

// Local clustering coefficient per node (0 for degree < 2).
std::vector<double> clustering_coefficients(const Graph& g);
// Number of edges among the neighbors of each node.
std::vector<long long> neighbor_link_counts(const Graph& g);

}  // namespace xm
