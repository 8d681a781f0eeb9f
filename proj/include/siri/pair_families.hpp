#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "siri/errors.hpp"
#include "siri/generators.hpp"
#include "siri/graph.hpp"
#include "siri/isomorphism.hpp"
#include "siri/wl.hpp"

namespace siri {

struct GraphPair {
    Graph first;
    Graph second;
    bool isomorphic = false;
};

namespace detail {

// CSL skip classes for modulus n: CSL(n,a) ~ CSL(n,b) iff b = +-a or +-a^{-1}
// (mod n). Returns one representative skip per class, ascending.
inline std::vector<int> csl_class_representatives(int n) {
    std::vector<int> reps;
    std::vector<bool> seen(n, false);
    for (int s = 2; 2 * s <= n; ++s) {
        if (std::gcd(n, s) != 1 || seen[s]) continue;
        reps.push_back(s);
        int inv = 0;
        for (int t = 1; t < n; ++t)
            if ((static_cast<long long>(s) * t) % n == 1) inv = t;
        for (int c : {s, n - s, inv, n - inv})
            if (c >= 0 && c < n) seen[c] = true;
    }
    return reps;
}

}  // namespace detail

// Generates verified 1-WL-hard pairs: each returned non-isomorphic pair has
// identical WL histograms (checked on the union) and fails the exact
// isomorphism test. Families:
//   wl1-hard-basic:   (C_{2k}, C_k + C_k), k = 3, 4, ...
//   wl1-hard-regular: (Shrikhande, rook-4x4), then CSL class pairs
//   csl:              CSL class pairs of growing modulus
inline std::vector<GraphPair> generate_pair_family(const std::string& family, int count, std::uint64_t seed = 0) {
    (void)seed;  // all families are currently deterministic constructions
    std::vector<GraphPair> out;
    // Candidates failing either check are dropped, so every returned pair is
    // WL-equivalent yet non-isomorphic.
    auto push_verified = [&](Graph a, Graph b) {
        if (!wl_equivalent(a, b)) return;
        if (are_isomorphic(a, b)) return;
        out.push_back(GraphPair{std::move(a), std::move(b), false});
    };

    if (family == "wl1-hard-basic") {
        for (int k = 3; static_cast<int>(out.size()) < count; ++k) {
            if (2 * k > 64) throw CapacityError("wl1-hard-basic: exhausted sizes <= 64");
            push_verified(generate({GraphKind::Cycle, 2 * k}), generate({GraphKind::DisjointCycles, 2 * k}));
        }
        return out;
    }

    auto push_csl_pairs = [&](int n) {
        std::vector<int> reps = detail::csl_class_representatives(n);
        for (std::size_t i = 0; i < reps.size() && static_cast<int>(out.size()) < count; ++i)
            for (std::size_t j = i + 1; j < reps.size() && static_cast<int>(out.size()) < count; ++j) {
                GeneratorSpec a{GraphKind::CircularSkipLink, n};
                a.skip = reps[i];
                GeneratorSpec b{GraphKind::CircularSkipLink, n};
                b.skip = reps[j];
                push_verified(generate(a), generate(b));
            }
    };

    if (family == "wl1-hard-regular") {
        push_verified(generate({GraphKind::Shrikhande}), generate({GraphKind::Rook4x4}));
        for (int n = 11; static_cast<int>(out.size()) < count; n += 2) {
            if (n > 64) throw CapacityError("wl1-hard-regular: exhausted sizes <= 64");
            push_csl_pairs(n);
        }
        return out;
    }

    if (family == "csl") {
        for (int n = 11; static_cast<int>(out.size()) < count; n += 2) {
            if (n > 64) throw CapacityError("csl: exhausted sizes <= 64");
            push_csl_pairs(n);
        }
        return out;
    }

    throw ValidationError("family: unknown pair family '" + family + "'");
}

// Pair-list file: lines of `<path1> <path2> <iso:0|1>`.
struct PairListEntry {
    std::string path1;
    std::string path2;
    bool isomorphic = false;
};

inline void write_pair_list(const std::vector<PairListEntry>& entries, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    for (const auto& e : entries) os << e.path1 << ' ' << e.path2 << ' ' << (e.isomorphic ? 1 : 0) << '\n';
}

inline std::vector<PairListEntry> read_pair_list(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open: " + path);
    std::vector<PairListEntry> out;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        PairListEntry e;
        int iso = 0;
        if (!(ls >> e.path1 >> e.path2 >> iso) || (iso != 0 && iso != 1))
            throw ParseError(line_no, "expected '<path1> <path2> <iso:0|1>'");
        e.isomorphic = (iso == 1);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace siri
