#include "xm/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "xm/errors.hpp"
#include "xm/io.hpp"
#include "xm/rng.hpp"

namespace xm {

Graph Graph::from_edges(int node_count, std::vector<Edge> edges, std::vector<std::string> labels) {
    if (node_count < 1) throw ConfigError("graph must have at least one node");
    Graph g;
    g.node_count_ = node_count;
    for (auto& e : edges) {
        if (e.u == e.v) throw ConfigError("from_edges: self-loop");
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.u < 0 || e.v >= node_count) throw ConfigError("from_edges: node id out of range");
        if (!(e.w > 0.0)) throw ConfigError("from_edges: edge weight must be positive");
        if (e.w != 1.0) g.weighted_ = true;
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i - 1].u == edges[i].u && edges[i - 1].v == edges[i].v)
            throw ConfigError("from_edges: duplicate edge");
    }
    g.edges_ = std::move(edges);

    std::vector<int> deg(node_count, 0);
    for (const auto& e : g.edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    g.adj_offsets_.assign(node_count + 1, 0);
    for (int v = 0; v < node_count; ++v) g.adj_offsets_[v + 1] = g.adj_offsets_[v] + deg[v];
    g.adj_.resize(g.adj_offsets_.back());
    std::vector<int> cursor(g.adj_offsets_.begin(), g.adj_offsets_.end() - 1);
    for (const auto& e : g.edges_) {
        g.adj_[cursor[e.u]++] = {e.v, e.w};
        g.adj_[cursor[e.v]++] = {e.u, e.w};
    }
    for (int v = 0; v < node_count; ++v) {
        std::sort(g.adj_.begin() + g.adj_offsets_[v], g.adj_.begin() + g.adj_offsets_[v + 1],
                  [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
    }

    if (labels.empty()) {
        labels.resize(node_count);
        for (int v = 0; v < node_count; ++v) labels[v] = std::to_string(v);
    } else if (static_cast<int>(labels.size()) != node_count) {
        throw ConfigError("from_edges: label count does not match node count");
    }
    g.labels_ = std::move(labels);
    return g;
}

std::span<const Neighbor> Graph::neighbors(int v) const {
    return {adj_.data() + adj_offsets_[v],
            static_cast<std::size_t>(adj_offsets_[v + 1] - adj_offsets_[v])};
}

int Graph::degree(int v) const { return adj_offsets_[v + 1] - adj_offsets_[v]; }

double Graph::weighted_degree(int v) const {
    double s = 0.0;
    for (const auto& nb : neighbors(v)) s += nb.w;
    return s;
}

bool Graph::has_edge(int u, int v) const {
    auto nbs = neighbors(u);
    auto it = std::lower_bound(nbs.begin(), nbs.end(), v,
                               [](const Neighbor& a, int id) { return a.id < id; });
    return it != nbs.end() && it->id == v;
}

namespace {

bool parse_int(const std::string& token, long long& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Graph load_edge_list(std::istream& in, bool weighted, LoadStats* stats) {
    LoadStats local;
    std::vector<std::pair<std::string, std::string>> raw_edges;
    std::vector<double> raw_weights;
    std::vector<std::string> order;             // labels by first appearance
    std::map<std::string, int> label_to_id;
    long long declared_nodes = -1;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            // "# nodes <n>" survives a round trip for graphs with isolated nodes
            std::istringstream comment(line.substr(hash + 1));
            std::string word;
            long long n = 0;
            if (comment >> word && word == "nodes" && comment >> n && n > 0) declared_nodes = n;
            line = line.substr(0, hash);
        }
        std::istringstream ls(line);
        std::string a, b, c, extra;
        if (!(ls >> a)) continue;  // blank line
        if (!(ls >> b)) throw ParseError("line " + std::to_string(line_no) + ": expected \"u v\" or \"u v w\"");
        double w = 1.0;
        if (ls >> c) {
            if (weighted) {
                try {
                    std::size_t used = 0;
                    w = std::stod(c, &used);
                    if (used != c.size()) throw std::invalid_argument(c);
                } catch (const std::exception&) {
                    throw ParseError("line " + std::to_string(line_no) + ": bad weight \"" + c + "\"");
                }
                if (!(w > 0.0) || !std::isfinite(w))
                    throw ParseError("line " + std::to_string(line_no) + ": weight must be a positive number");
            }
            if (ls >> extra)
                throw ParseError("line " + std::to_string(line_no) + ": trailing tokens after edge");
        }
        for (const auto& label : {a, b}) {
            if (!label_to_id.count(label)) {
                label_to_id[label] = static_cast<int>(order.size());
                order.push_back(label);
            }
        }
        if (a == b) {
            ++local.self_loops_dropped;
            continue;
        }
        raw_edges.emplace_back(a, b);
        raw_weights.push_back(w);
    }
    if (order.empty()) throw ParseError("edge list is empty");

    // Keep integer labels that already form a dense 0..n-1 range; remap
    // arbitrary tokens by first appearance otherwise.
    bool dense_numeric = true;
    long long max_id = -1;
    for (const auto& label : order) {
        long long value = 0;
        if (!parse_int(label, value) || value < 0) {
            dense_numeric = false;
            break;
        }
        max_id = std::max(max_id, value);
    }
    if (dense_numeric && max_id + 1 != static_cast<long long>(order.size())) dense_numeric = false;

    int node_count = static_cast<int>(order.size());
    std::vector<std::string> labels;
    auto id_of = [&](const std::string& label) {
        if (dense_numeric) {
            long long value = 0;
            parse_int(label, value);
            return static_cast<int>(value);
        }
        return label_to_id.at(label);
    };
    labels.resize(node_count);
    for (const auto& label : order) labels[id_of(label)] = label;
    if (dense_numeric && declared_nodes > node_count) {
        for (long long v = node_count; v < declared_nodes; ++v) labels.push_back(std::to_string(v));
        node_count = static_cast<int>(declared_nodes);
    }

    std::vector<Edge> edges;
    edges.reserve(raw_edges.size());
    std::unordered_set<long long> seen;
    seen.reserve(raw_edges.size() * 2);
    for (std::size_t i = 0; i < raw_edges.size(); ++i) {
        int u = id_of(raw_edges[i].first);
        int v = id_of(raw_edges[i].second);
        if (u > v) std::swap(u, v);
        const long long key = static_cast<long long>(u) * node_count + v;
        if (!seen.insert(key).second) {
            ++local.duplicate_edges_dropped;
            continue;
        }
        edges.push_back({u, v, weighted ? raw_weights[i] : 1.0});
    }
    if (edges.empty()) throw ParseError("edge list has no usable edges");

    if (stats) *stats = local;
    return Graph::from_edges(node_count, std::move(edges), std::move(labels));
}

void serialize(const Graph& g, std::ostream& out) {
    out << "# nodes " << g.node_count() << "\n";
    for (const auto& e : g.edges()) {
        out << g.label(e.u) << ' ' << g.label(e.v);
        if (g.weighted()) out << ' ' << format_double(e.w);
        out << "\n";
    }
}

std::string serialize_to_string(const Graph& g) {
    std::ostringstream os;
    serialize(g, os);
    return os.str();
}

std::uint64_t content_hash(const Graph& g) {
    return fnv1a64(serialize_to_string(g));
}

Graph barbell(int clique_size, int path_len) {
    if (clique_size < 3) throw ConfigError("barbell: clique_size must be at least 3");
    if (path_len < 0) throw ConfigError("barbell: path_len must be non-negative");
    const int n = 2 * clique_size + path_len;
    std::vector<Edge> edges;
    auto clique = [&](int base) {
        for (int i = 0; i < clique_size; ++i)
            for (int j = i + 1; j < clique_size; ++j) edges.push_back({base + i, base + j, 1.0});
    };
    clique(0);
    clique(clique_size + path_len);
    // chain from the last node of the bottom clique to the first node of the top one
    int prev = clique_size - 1;
    for (int k = 0; k < path_len; ++k) {
        edges.push_back({prev, clique_size + k, 1.0});
        prev = clique_size + k;
    }
    edges.push_back({prev, clique_size + path_len, 1.0});
    return Graph::from_edges(n, std::move(edges));
}

Graph gnm_random(int n, int m, std::uint64_t seed) {
    if (n < 1) throw ConfigError("gnm_random: n must be positive");
    const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
    if (m < 0 || m > max_edges) throw ConfigError("gnm_random: m out of range");
    auto rng = make_rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::unordered_set<long long> seen;
    std::vector<Edge> edges;
    edges.reserve(m);
    while (static_cast<int>(edges.size()) < m) {
        int u = pick(rng);
        int v = pick(rng);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        const long long key = static_cast<long long>(u) * n + v;
        if (!seen.insert(key).second) continue;
        edges.push_back({u, v, 1.0});
    }
    return Graph::from_edges(n, std::move(edges));
}

Graph barabasi_albert(int n, int attach, std::uint64_t seed) {
    if (attach < 1) throw ConfigError("barabasi_albert: attach must be positive");
    if (n < attach + 1) throw ConfigError("barabasi_albert: need more nodes than attachments");
    auto rng = make_rng(seed);
    std::vector<Edge> edges;
    std::vector<int> endpoints;  // each node repeated once per incident edge
    for (int i = 0; i < attach + 1; ++i)
        for (int j = i + 1; j < attach + 1; ++j) {
            edges.push_back({i, j, 1.0});
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    for (int v = attach + 1; v < n; ++v) {
        std::unordered_set<int> chosen;
        while (static_cast<int>(chosen.size()) < attach) {
            std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
            chosen.insert(endpoints[pick(rng)]);
        }
        for (int u : chosen) {
            edges.push_back({std::min(u, v), std::max(u, v), 1.0});
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }
    return Graph::from_edges(n, std::move(edges));
}

std::vector<long long> neighbor_link_counts(const Graph& g) {
    const int n = g.node_count();
    std::vector<long long> links(n, 0);
    for (int v = 0; v < n; ++v) {
        auto nbs = g.neighbors(v);
        long long count = 0;
        for (const auto& a : nbs) {
            // sorted-list intersection of N(v) and N(a.id), counted once per pair
            auto other = g.neighbors(a.id);
            std::size_t i = 0, j = 0;
            while (i < nbs.size() && j < other.size()) {
                if (nbs[i].id < other[j].id) {
                    ++i;
                } else if (nbs[i].id > other[j].id) {
                    ++j;
                } else {
                    ++count;
                    ++i;
                    ++j;
                }
            }
        }
        links[v] = count / 2;
    }
    return links;
}

std::vector<double> clustering_coefficients(const Graph& g) {
    const int n = g.node_count();
    const auto links = neighbor_link_counts(g);
    std::vector<double> c(n, 0.0);
    for (int v = 0; v < n; ++v) {
        const long long k = g.degree(v);
        if (k >= 2) c[v] = 2.0 * static_cast<double>(links[v]) / (static_cast<double>(k) * (k - 1));
    }
    return c;
}

GraphStats graph_stats(const Graph& g) {
    GraphStats s;
    s.node_count = g.node_count();
    s.edge_count = g.edge_count();
    const int n = g.node_count();
    s.mean_degree = 2.0 * g.edge_count() / static_cast<double>(n);

    double sq = 0.0;
    for (int v = 0; v < n; ++v) {
        const double d = g.degree(v) - s.mean_degree;
        sq += d * d;
    }
    s.degree_std = std::sqrt(sq / n);

    if (n < 2 || g.edge_count() == 0) {
        s.degenerate = true;
        return s;
    }

    // Pearson correlation of endpoint degrees over both edge orientations.
    double sum_x = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    for (const auto& e : g.edges()) {
        const double du = g.degree(e.u);
        const double dv = g.degree(e.v);
        sum_x += du + dv;
        sum_xx += du * du + dv * dv;
        sum_xy += 2.0 * du * dv;
    }
    const double pairs = 2.0 * g.edge_count();
    const double mx = sum_x / pairs;
    const double var = sum_xx / pairs - mx * mx;
    s.degree_assortativity = var > 1e-15 ? (sum_xy / pairs - mx * mx) / var : 0.0;

    const auto clustering = clustering_coefficients(g);
    double total = 0.0;
    for (double c : clustering) total += c;
    s.mean_clustering = total / n;

    const auto links = neighbor_link_counts(g);
    long long triangles3 = 0;  // 3 * number of triangles
    long long wedges = 0;
    for (int v = 0; v < n; ++v) {
        triangles3 += links[v];
        const long long k = g.degree(v);
        wedges += k * (k - 1) / 2;
    }
    s.transitivity = wedges > 0 ? static_cast<double>(triangles3) / static_cast<double>(wedges) : 0.0;
    return s;
}

}  // namespace xm
