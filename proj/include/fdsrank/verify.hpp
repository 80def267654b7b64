#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdsrank/digraph.hpp"
#include "fdsrank/fds.hpp"
#include "fdsrank/rng.hpp"

namespace fdsrank {

// One named verification suite: a self-contained end-to-end check of a
// library guarantee against an independent oracle or pinned constant.
struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

const std::vector<std::string>& verification_suite_names();
SuiteResult run_verification_suite(const std::string& name);
std::vector<SuiteResult> run_all_verification_suites();

// Oracle for periodic_points: repeatedly peels states of in-degree zero off
// the functional graph; what survives lies on a cycle.
std::vector<State> periodic_points_peeling(const TransitionMap& t);

// Digraph whose arc set is the bits of mask over the n^2 ordered pairs (u,v),
// u-major: bit (u-1)*n + (v-1).  Enumerating masks enumerates all digraphs.
Digraph digraph_from_mask(int n, std::uint32_t mask);

// Random digraph with the given arc probability (24-bit fixed point).
Digraph random_digraph(int n, double arc_prob, Rng& rng);

} // namespace fdsrank
