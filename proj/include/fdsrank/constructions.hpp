#pragma once

#include <cstdint>
#include <vector>

#include "fdsrank/digraph.hpp"
#include "fdsrank/fds.hpp"
#include "fdsrank/walks.hpp"

namespace fdsrank {

// Copy system over q = 2: along every walk, each vertex copies its
// predecessor's coordinate; vertices on no walk are constant 0.  After p
// steps the rank is 2^|walks| when walks is a maximum family.
Fds copy_walk_system(const Digraph& d, const WalkFamily& walks);

// Red-light system over q >= 3: along every walk, a vertex flips its
// predecessor's 0/1 value when all its other in-neighbours show 2, and copies
// otherwise; vertices on no walk map to 1 exactly when all their in-neighbours
// show 1.  Rank of the p-th iterate is q^|walks| for a maximum family, and
// the interaction graph is exactly d.
Fds red_light_system(const Digraph& d, std::uint32_t q, const WalkFamily& walks);

// Boolean permutation of {0,1}^n with interaction graph exactly the complete
// loopless digraph: even n is the linear map x -> (J-I)x; n = 5 is an
// explicit two-part rule; odd n >= 7 lifts the (n-2)-vertex system by two
// extra coordinates.  No such system exists for n = 3, which is rejected.
Fds kn_permutation_system(int n);

// Transposition of the all-zero and all-one states over q = 2; interaction
// graph is the complete digraph with loops for n >= 3.  At n = 2 the rules
// collapse to negations of the opposite coordinate, so the loops vanish.
Fds clique_loops_transposition(int n);

struct CompleteScheduleSystem {
    Fds fds;
    Schedule schedule;
    std::uint32_t q = 0;
    // True when the alphabet carries the extra non-field value q-1 (needed
    // exactly when some vertex lies on no cycle).
    bool sentinel = false;
    // Cycles covering every on-cycle vertex (may share vertices) and the
    // remaining vertices; schedule = (rest, cycles...) with rest omitted
    // when empty.
    std::vector<std::vector<int>> cycles;
    std::vector<int> rest;
    int attempts = 0;
};

// Complete-schedule system whose scheduled map has at least (2^m)^(n - t)
// periodic points, t = number of trivial strong components; a permutation
// when t = 0.  Vertices on cycles apply a random invertible linear form over
// GF(2^m); weights are resampled until every cycle submatrix is nonsingular.
CompleteScheduleSystem complete_schedule_system(const Digraph& d, int m,
                                                std::uint64_t seed,
                                                int retry_budget = 64);

struct DegreeTwoReport {
    int n = 0;
    std::uint64_t systems = 0;           // 10^n
    std::uint64_t bound = 0;             // 2^n
    std::vector<std::uint64_t> max_rank; // max_rank[p-1] over all systems, p = 1..n
    bool all_below_bound = false;        // every rank(f^p) < 2^n
};

// Exhausts every system on d whose local rules are 2-input Boolean functions
// essential in both inputs.  Requires in-degree 2 everywhere and
// walk_packing_number(d, 1) = n, so the walk-packing bound 2^n is never
// attained even though it is tight for larger alphabets.
DegreeTwoReport degree_two_obstruction_report(const Digraph& d);

// The ten 2-input Boolean tables essential in both inputs, each of length 4
// indexed little-endian; ascending order.
const std::vector<std::vector<std::uint32_t>>& essential_two_input_tables();

} // namespace fdsrank
