#pragma once

#include <cstdint>
#include <vector>

#include "fdsrank/digraph.hpp"

namespace fdsrank {

// Family of pairwise independent p-walks: every walk has p+1 vertices, and no
// two walks share a vertex at the same position.
struct WalkFamily {
    int p = 1;
    std::vector<std::vector<int>> walks;

    std::size_t size() const { return walks.size(); }
};

// Throws input_error unless every walk is a length-p walk of d and the family
// is pairwise independent.
void validate_walk_family(const Digraph& d, const WalkFamily& family);

// Maximum number of pairwise independent p-walks, via max-flow on the layered
// graph with p+1 vertex layers and unit vertex capacities (vertex splitting).
// p is capped at n internally: the value is constant for p >= n.
int walk_packing_number(const Digraph& d, int p);

struct BruteForceOptions {
    int max_n = 7;
    std::uint64_t node_budget = std::uint64_t(1) << 26;
};

// Independent oracle: enumerates families of vertex-disjoint cycles and paths
// by backtracking and maximizes sum |C_i| + sum max(|P_j| - p, 0).
int walk_packing_bruteforce(const Digraph& d, int p, BruteForceOptions options = {});

// Closed form for p = 1: n - max over S of (|S| - |N^-(S)|), by 2^n subset
// enumeration (guard n <= 20).
int walk_packing_edmonds(const Digraph& d);

// Maximum family itself: exactly walk_packing_number(d, p) pairwise
// independent p-walks, read as rotations of vertex-disjoint cycles and
// sliding windows of vertex-disjoint paths.  Consequently each vertex has
// the same predecessor on every walk it appears on, which copy_walk_system
// and red_light_system require.  Deterministic for a fixed digraph encoding.
WalkFamily walk_certificate(const Digraph& d, int p);

// Vertex-disjoint cycles covering the maximum number of vertices, via a
// min-cost assignment (skipping a vertex costs 1).  Cycles are vertex lists
// in traversal order; deterministic.
std::vector<std::vector<int>> max_disjoint_cycle_family(const Digraph& d);

// True iff disjoint cycles can cover all of V, i.e. walk_packing_number(d, n) == n.
bool has_cycle_cover(const Digraph& d);

} // namespace fdsrank
