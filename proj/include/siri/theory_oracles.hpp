#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/rng.hpp"

namespace siri {

// Opaque per-node identifiers; pairwise distinct.
struct UidAssignment {
    std::vector<double> values;

    void validate(int n) const {
        if (static_cast<int>(values.size()) != n) throw ValidationError("uids: length != n");
        std::set<double> uniq(values.begin(), values.end());
        if (static_cast<int>(uniq.size()) != n) throw ValidationError("uids: duplicate identifier");
    }
};

inline UidAssignment random_uids(int n, Rng& rng) {
    UidAssignment out;
    std::set<double> seen;
    while (static_cast<int>(out.values.size()) < n) {
        const double v = rng.uniform01();
        if (seen.insert(v).second) out.values.push_back(v);
    }
    return out;
}

// Symbolic states of the 3-layer UID-matching triangle detector. The first
// two layers copy UIDs around (non-UID-invariant); the third layer decides
// by equality matching only, which makes the end-to-end function
// UID-invariant.
struct TriangleNetStates {
    struct Layer1 {
        double uid = 0.0;
        std::vector<double> neighbor_uids;  // ascending node-index order
    };
    struct Layer2 {
        Layer1 own;
        std::vector<Layer1> neighbor_states;
    };
    std::vector<Layer1> layer1;
    std::vector<Layer2> layer2;

    // Flat numeric view of one node's layer-2 state, for witnessing that the
    // hidden states do change under UID resampling.
    std::vector<double> flatten_layer2(int v) const {
        std::vector<double> out;
        const Layer2& s = layer2[v];
        out.push_back(s.own.uid);
        out.insert(out.end(), s.own.neighbor_uids.begin(), s.own.neighbor_uids.end());
        for (const Layer1& ns : s.neighbor_states) {
            out.push_back(ns.uid);
            out.insert(out.end(), ns.neighbor_uids.begin(), ns.neighbor_uids.end());
        }
        return out;
    }
};

inline TriangleNetStates triangle_net_states(const Graph& g, const UidAssignment& uids) {
    uids.validate(g.num_nodes());
    TriangleNetStates s;
    const int n = g.num_nodes();
    s.layer1.resize(n);
    for (int v = 0; v < n; ++v) {
        s.layer1[v].uid = uids.values[v];
        for (int u : g.neighbors(v)) s.layer1[v].neighbor_uids.push_back(uids.values[u]);
    }
    s.layer2.resize(n);
    for (int v = 0; v < n; ++v) {
        s.layer2[v].own = s.layer1[v];
        for (int u : g.neighbors(v)) s.layer2[v].neighbor_states.push_back(s.layer1[u]);
    }
    return s;
}

// Layer 3: node v fires iff some neighbor u2's UID appears in another
// neighbor u1's neighbor-UID list, i.e. two neighbors of v are adjacent.
// Decided purely by UID equality over layer-2 state contents.
inline NodeLabeling triangle_net_decide(const TriangleNetStates& s) {
    NodeLabeling out;
    out.labels.assign(s.layer2.size(), false);
    for (std::size_t v = 0; v < s.layer2.size(); ++v) {
        const auto& neigh = s.layer2[v].neighbor_states;
        bool found = false;
        for (std::size_t i = 0; i < neigh.size() && !found; ++i)
            for (std::size_t j = 0; j < neigh.size() && !found; ++j) {
                if (i == j) continue;
                for (double w : neigh[i].neighbor_uids)
                    if (w == neigh[j].uid) {
                        found = true;
                        break;
                    }
            }
        out.labels[v] = found;
    }
    return out;
}

inline NodeLabeling triangle_net_forward(const Graph& g, const UidAssignment& uids) {
    return triangle_net_decide(triangle_net_states(g, uids));
}

// ---------------------------------------------------------------------------
// Matching-oracle canonical relabeling. Node references are matched only via
// the equality oracle; identifier values are never ordered or hashed.

struct RelabelCache {
    std::vector<double> seen;  // opaque references of cached nodes, insertion order

    // o(u, v): 1 iff the two references denote the same node.
    static bool oracle_same(double a, double b) { return a == b; }

    // Returns the cached value, or assigns size(cache)+1 on first sight.
    int lookup_or_insert(double ref) {
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (oracle_same(seen[i], ref)) return static_cast<int>(i) + 1;
        seen.push_back(ref);
        return static_cast<int>(seen.size());
    }
};

// Canonical integer UIDs: first-seen node gets 1, second gets 2, and so on,
// in the given visit order (repeated visits hit the cache). Default order is
// ascending node index.
inline std::vector<int> matching_oracle_relabel(const Graph& g, const UidAssignment& uids,
                                                const std::vector<int>& visit_order = {}) {
    uids.validate(g.num_nodes());
    std::vector<int> order = visit_order;
    if (order.empty()) {
        order.resize(g.num_nodes());
        for (int i = 0; i < g.num_nodes(); ++i) order[i] = i;
    }
    RelabelCache cache;
    std::vector<int> canonical(g.num_nodes(), 0);
    for (int v : order) {
        if (v < 0 || v >= g.num_nodes()) throw ValidationError("visit order: node index out of range");
        canonical[v] = cache.lookup_or_insert(uids.values[v]);
    }
    return canonical;
}

}  // namespace siri
