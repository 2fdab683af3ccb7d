#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gwish/rng.hpp"

namespace gwish {

using Edge = std::pair<int, int>;

// Undirected simple graph on vertices 0..p-1.  Immutable value type; the
// edge list is kept sorted with i < j in every pair, so equal graphs
// compare equal structurally.
class Graph {
  public:
    explicit Graph(int p, std::vector<Edge> edges = {}) : p_(p) {
        if (p < 1) throw std::invalid_argument("Graph: vertex count must be >= 1");
        adj_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), 0);
        std::set<Edge> canon;
        for (auto [i, j] : edges) {
            if (i < 0 || j < 0 || i >= p || j >= p)
                throw std::out_of_range("Graph: edge endpoint out of range");
            if (i == j) throw std::invalid_argument("Graph: self-loops are not allowed");
            canon.insert({std::min(i, j), std::max(i, j)});
        }
        edges_.assign(canon.begin(), canon.end());
        nbrs_.assign(static_cast<std::size_t>(p), {});
        for (auto [i, j] : edges_) {
            at(i, j) = at(j, i) = 1;
            nbrs_[static_cast<std::size_t>(i)].push_back(j);
            nbrs_[static_cast<std::size_t>(j)].push_back(i);
        }
        for (auto& v : nbrs_) std::sort(v.begin(), v.end());
    }

    int vertex_count() const { return p_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_edge(int i, int j) const {
        check_vertex(i);
        check_vertex(j);
        return i != j && at(i, j) != 0;
    }

    const std::vector<int>& neighbors(int v) const {
        check_vertex(v);
        return nbrs_[static_cast<std::size_t>(v)];
    }

    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

    int common_neighbor_count(int i, int j) const {
        check_vertex(i);
        check_vertex(j);
        int d = 0;
        for (int w : nbrs_[static_cast<std::size_t>(i)])
            if (w != j && at(w, j)) ++d;
        return d;
    }

    Graph with_edge(int i, int j) const {
        check_vertex(i);
        check_vertex(j);
        if (i == j) throw std::invalid_argument("with_edge: self-loop");
        auto e = edges_;
        e.push_back({i, j});
        return Graph(p_, std::move(e));
    }

    Graph without_edge(int i, int j) const {
        check_vertex(i);
        check_vertex(j);
        Edge want{std::min(i, j), std::max(i, j)};
        std::vector<Edge> e;
        e.reserve(edges_.size());
        for (auto& ed : edges_)
            if (ed != want) e.push_back(ed);
        return Graph(p_, std::move(e));
    }

    std::vector<std::vector<int>> connected_components() const {
        std::vector<int> comp(static_cast<std::size_t>(p_), -1);
        std::vector<std::vector<int>> out;
        for (int s = 0; s < p_; ++s) {
            if (comp[static_cast<std::size_t>(s)] >= 0) continue;
            int id = static_cast<int>(out.size());
            out.push_back({});
            std::vector<int> stack{s};
            comp[static_cast<std::size_t>(s)] = id;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                out[static_cast<std::size_t>(id)].push_back(v);
                for (int w : neighbors(v))
                    if (comp[static_cast<std::size_t>(w)] < 0) {
                        comp[static_cast<std::size_t>(w)] = id;
                        stack.push_back(w);
                    }
            }
            std::sort(out[static_cast<std::size_t>(id)].begin(), out[static_cast<std::size_t>(id)].end());
        }
        return out;
    }

    bool operator==(const Graph& o) const { return p_ == o.p_ && edges_ == o.edges_; }
    bool operator!=(const Graph& o) const { return !(*this == o); }

    // FNV-1a over (p, sorted edges); structural fingerprint for caches.
    std::uint64_t fingerprint() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t x) {
            h ^= x;
            h *= 1099511628211ULL;
        };
        mix(static_cast<std::uint64_t>(p_));
        for (auto [i, j] : edges_) mix((static_cast<std::uint64_t>(i) << 20) | static_cast<std::uint64_t>(j));
        return h;
    }

  private:
    std::uint8_t& at(int i, int j) {
        return adj_[static_cast<std::size_t>(i) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(j)];
    }
    std::uint8_t at(int i, int j) const {
        return adj_[static_cast<std::size_t>(i) * static_cast<std::size_t>(p_) + static_cast<std::size_t>(j)];
    }
    void check_vertex(int v) const {
        if (v < 0 || v >= p_) throw std::out_of_range("Graph: vertex index out of range");
    }

    int p_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> nbrs_;
    std::vector<std::uint8_t> adj_;
};

// ------------------------------------------------------------------ paths

// Summary of the connections between the endpoints of a missing edge:
// d      = number of common neighbors (length-2 chordless paths),
// long_lengths = interior-vertex counts (>= 2) of the longer chordless
//                paths, one entry per path, unsorted multiset.
// truncated is set when enumeration hit max_len or max_paths, in which case
// long_lengths is a lower multiset.
struct PathProfile {
    int d = 0;
    std::vector<int> long_lengths;
    bool truncated = false;
};

// Enumerates chordless (induced) paths between q and r in g.  Requires the
// edge (q,r) to be absent.  Path length is counted in edges; max_len caps
// it, max_paths caps the number of recorded long paths.
inline PathProfile path_profile(const Graph& g, int q, int r, int max_len = 12,
                                int max_paths = 10000) {
    if (q < 0 || r < 0 || q >= g.vertex_count() || r >= g.vertex_count())
        throw std::out_of_range("path_profile: endpoint out of range");
    if (q == r) throw std::invalid_argument("path_profile: endpoints must differ");
    if (g.has_edge(q, r)) throw std::invalid_argument("path_profile: edge is present");
    if (max_len < 2 || max_paths < 0) throw std::invalid_argument("path_profile: bad caps");

    PathProfile out;
    out.d = g.common_neighbor_count(q, r);

    // DFS over chord-free partial paths q, v1, ..., vk.  A partial path
    // with a chord can never extend to a chordless path, so it is pruned
    // on sight: any new vertex adjacent to a non-tip path vertex is a chord.
    std::vector<char> on_path(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<int> path{q};
    on_path[static_cast<std::size_t>(q)] = 1;
    bool stop = false;

    auto dfs = [&](auto&& self, int tip) -> void {
        if (stop) return;
        int interior = static_cast<int>(path.size()) - 1;  // vertices after q
        for (int v : g.neighbors(tip)) {
            if (stop) return;
            if (v == q || on_path[static_cast<std::size_t>(v)]) continue;
            if (v == r) {
                if (interior < 2) continue;  // length-2 paths are counted in d
                bool chord = false;
                for (std::size_t k = 0; k + 1 < path.size(); ++k)
                    if (g.has_edge(path[k], r)) {
                        chord = true;
                        break;
                    }
                if (!chord) {
                    if (static_cast<int>(out.long_lengths.size()) >= max_paths) {
                        out.truncated = true;
                        stop = true;
                        return;
                    }
                    out.long_lengths.push_back(interior);
                }
                continue;
            }
            bool chord = false;
            for (std::size_t k = 0; k + 1 < path.size(); ++k)
                if (g.has_edge(path[k], v)) {
                    chord = true;
                    break;
                }
            if (chord) continue;
            if (interior + 2 > max_len) {
                // extending would exceed the length cap; deeper paths exist
                out.truncated = true;
                continue;
            }
            path.push_back(v);
            on_path[static_cast<std::size_t>(v)] = 1;
            self(self, v);
            on_path[static_cast<std::size_t>(v)] = 0;
            path.pop_back();
        }
    };
    dfs(dfs, q);
    return out;
}

// ----------------------------------------------------- perfect sequences

// Clique/separator sequence of a decomposable graph in running-intersection
// order: separators[k] = components[k+1] ∩ (components[0..k] union).
struct PerfectSequence {
    std::vector<std::vector<int>> components;
    std::vector<std::vector<int>> separators;
};

namespace detail {

struct McsResult {
    bool chordal = false;
    std::vector<int> order;        // visit order
    std::vector<int> weight;       // |visited neighbors| at visit time
    std::vector<std::vector<int>> visited_nbrs;
};

inline McsResult maximum_cardinality_search(const Graph& g, const std::vector<int>& verts) {
    McsResult res;
    int m = static_cast<int>(verts.size());
    std::vector<char> in_set(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : verts) in_set[static_cast<std::size_t>(v)] = 1;
    std::vector<char> visited(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<int> score(static_cast<std::size_t>(g.vertex_count()), 0);

    for (int step = 0; step < m; ++step) {
        int best = -1;
        for (int v : verts)
            if (!visited[static_cast<std::size_t>(v)] && (best < 0 || score[static_cast<std::size_t>(v)] > score[static_cast<std::size_t>(best)]))
                best = v;
        if (best < 0) break;  // unreachable: one unvisited vertex per step
        visited[static_cast<std::size_t>(best)] = 1;
        std::vector<int> mv;
        for (int w : g.neighbors(best))
            if (in_set[static_cast<std::size_t>(w)] && visited[static_cast<std::size_t>(w)]) mv.push_back(w);
        res.order.push_back(best);
        res.weight.push_back(static_cast<int>(mv.size()));
        res.visited_nbrs.push_back(std::move(mv));
        for (int w : g.neighbors(best))
            if (in_set[static_cast<std::size_t>(w)]) score[static_cast<std::size_t>(w)] += 1;
    }
    // chordality: each visited-neighbor set must induce a clique
    for (const auto& mv : res.visited_nbrs)
        for (std::size_t a = 0; a < mv.size(); ++a)
            for (std::size_t b = a + 1; b < mv.size(); ++b)
                if (!g.has_edge(mv[a], mv[b])) return res;
    res.chordal = true;
    return res;
}

// Blair-Peyton clique extraction from an MCS run of one connected piece.
inline void cliques_from_mcs(const McsResult& mcs, PerfectSequence& seq) {
    int m = static_cast<int>(mcs.order.size());
    std::vector<int> current{mcs.order[0]};
    for (int k = 1; k < m; ++k) {
        if (mcs.weight[static_cast<std::size_t>(k)] < mcs.weight[static_cast<std::size_t>(k - 1)] + 1) {
            std::sort(current.begin(), current.end());
            seq.components.push_back(current);
            auto sep = mcs.visited_nbrs[static_cast<std::size_t>(k)];
            std::sort(sep.begin(), sep.end());
            seq.separators.push_back(sep);
            current = mcs.visited_nbrs[static_cast<std::size_t>(k)];
            current.push_back(mcs.order[static_cast<std::size_t>(k)]);
        } else {
            current.push_back(mcs.order[static_cast<std::size_t>(k)]);
        }
    }
    std::sort(current.begin(), current.end());
    seq.components.push_back(current);
}

}  // namespace detail

// Perfect clique/separator sequence of a connected decomposable graph.
// Returns nullopt when g is connected but not decomposable; throws when g
// is disconnected.
inline std::optional<PerfectSequence> perfect_sequence(const Graph& g) {
    if (g.connected_components().size() != 1)
        throw std::invalid_argument("perfect_sequence: graph is disconnected");
    std::vector<int> verts(static_cast<std::size_t>(g.vertex_count()));
    for (int v = 0; v < g.vertex_count(); ++v) verts[static_cast<std::size_t>(v)] = v;
    auto mcs = detail::maximum_cardinality_search(g, verts);
    if (!mcs.chordal) return std::nullopt;
    PerfectSequence seq;
    detail::cliques_from_mcs(mcs, seq);
    return seq;
}

// Component-wise wrapper: concatenates the perfect sequences of every
// connected component (no cross-component separators).  nullopt when any
// component is not decomposable.
inline std::optional<PerfectSequence> perfect_sequence_by_component(const Graph& g) {
    PerfectSequence seq;
    for (const auto& comp : g.connected_components()) {
        auto mcs = detail::maximum_cardinality_search(g, comp);
        if (!mcs.chordal) return std::nullopt;
        detail::cliques_from_mcs(mcs, seq);
    }
    return seq;
}

// ------------------------------------------------------------- generators

// Random graph families used by the simulation harness:
//   scale_free : preferential-attachment tree (p-1 edges, connected)
//   random_p   : Bernoulli edges, inclusion probability 2/(p-1)
//                (expected edge count ~ p)
//   random_2p  : Bernoulli edges, probability 4/(p-1) (expected ~ 2p)
//   cluster    : max(2, floor(p/20)) near-equal vertex blocks, random_p
//                rule inside each block, no cross-block edges
inline Graph generate(const std::string& kind, int p, std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("generate: p must be >= 2");
    RngStream rng(derive_seed(seed, 0xA11CE));
    std::vector<Edge> edges;

    auto bernoulli_block = [&](int lo, int hi) {
        // vertices lo..hi-1, probability 2/(m-1) capped at 1
        int m = hi - lo;
        double prob = std::min(1.0, 2.0 / static_cast<double>(m - 1));
        for (int i = lo; i < hi; ++i)
            for (int j = i + 1; j < hi; ++j)
                if (rng.uniform() < prob) edges.push_back({i, j});
    };

    if (kind == "scale_free") {
        std::vector<int> urn{0, 1};
        edges.push_back({0, 1});
        for (int v = 2; v < p; ++v) {
            int target = urn[rng.uniform_int(urn.size())];
            edges.push_back({std::min(v, target), std::max(v, target)});
            urn.push_back(v);
            urn.push_back(target);
        }
    } else if (kind == "random_p") {
        bernoulli_block(0, p);
    } else if (kind == "random_2p") {
        double prob = std::min(1.0, 4.0 / static_cast<double>(p - 1));
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (rng.uniform() < prob) edges.push_back({i, j});
    } else if (kind == "cluster") {
        if (p < 4) throw std::invalid_argument("generate: cluster requires p >= 4");
        int c = std::max(2, p / 20);
        int base = p / c, rem = p % c;
        int lo = 0;
        for (int b = 0; b < c; ++b) {
            int size = base + (b < rem ? 1 : 0);
            bernoulli_block(lo, lo + size);
            lo += size;
        }
    } else {
        throw std::invalid_argument("generate: unsupported kind '" + kind + "'");
    }
    return Graph(p, std::move(edges));
}

}  // namespace gwish
