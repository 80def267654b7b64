#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "fdsrank/constructions.hpp"
#include "fdsrank/digraph.hpp"
#include "fdsrank/errors.hpp"
#include "fdsrank/fds.hpp"
#include "fdsrank/galois.hpp"
#include "fdsrank/rng.hpp"
#include "fdsrank/sampling.hpp"
#include "fdsrank/verify.hpp"
#include "fdsrank/walks.hpp"

using namespace fdsrank;

namespace {

Digraph from_arcs(int n, const std::vector<std::pair<int, int>>& arcs) {
    Digraph d(n);
    for (auto [u, v] : arcs)
        d.add_arc(u, v);
    return d;
}

Digraph four_cycle() { return from_arcs(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}}); }
Digraph two_cycle() { return from_arcs(2, {{1, 2}, {2, 1}}); }

} // namespace

TEST_SUITE("digraph") {

TEST_CASE("text format round trips") {
    Digraph d = four_cycle();
    CHECK(Digraph::parse_string(d.to_string()) == d);
    Digraph parsed = Digraph::parse_string("# comment\ndigraph 3\n\n1 2\n# mid\n3 3\n");
    CHECK(parsed.vertex_count() == 3);
    CHECK(parsed.arcs() == std::vector<std::pair<int, int>>{{1, 2}, {3, 3}});
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(Digraph::parse_string("graph 3\n"), input_error);
    CHECK_THROWS_AS(Digraph::parse_string("digraph 2\n1 3\n"), input_error);
    CHECK_THROWS_AS(Digraph::parse_string("digraph 2\n1 2\n1 2\n"), input_error);
    CHECK_THROWS_AS(Digraph::parse_string("digraph 2\n1\n"), input_error);
}

TEST_CASE("adjacency is sorted and arc queries work") {
    Digraph d = from_arcs(3, {{2, 1}, {2, 3}, {2, 2}});
    CHECK(d.out_neighbours(2) == std::vector<int>{1, 2, 3});
    CHECK(d.in_neighbours(2) == std::vector<int>{2});
    CHECK(d.has_arc(2, 3));
    CHECK(!d.has_arc(3, 2));
    CHECK(d.is_subgraph_of(complete_digraph_with_loops(3)));
    CHECK(!complete_digraph_with_loops(3).is_subgraph_of(d));
}

TEST_CASE("in-neighbourhood unions over the set") {
    Digraph d = from_arcs(4, {{1, 2}, {3, 2}, {4, 3}});
    CHECK(in_neighbourhood(d, {2, 3}) == std::vector<int>{1, 3, 4});
    CHECK(in_neighbourhood(d, {1}).empty());
}

TEST_CASE("scc summary counts trivial components") {
    SccSummary cycle = scc_summary(four_cycle());
    CHECK(cycle.components.size() == 1);
    CHECK(cycle.trivial_count == 0);

    SccSummary path = scc_summary(from_arcs(3, {{1, 2}, {2, 3}}));
    CHECK(path.components.size() == 3);
    CHECK(path.trivial_count == 3);

    SccSummary looped = scc_summary(from_arcs(2, {{1, 1}}));
    CHECK(looped.components.size() == 2);
    CHECK(looped.trivial_count == 1);
}

TEST_CASE("mask enumeration covers all digraphs once") {
    std::set<std::string> seen;
    for (std::uint32_t mask = 0; mask < 512; ++mask)
        seen.insert(digraph_from_mask(3, mask).to_string());
    CHECK(seen.size() == 512);
    CHECK(digraph_from_mask(2, 0b0010).arcs() ==
          std::vector<std::pair<int, int>>{{1, 2}});
    CHECK_THROWS_AS(digraph_from_mask(2, 1u << 4), input_error);
}

TEST_CASE("convenience builders") {
    CHECK(complete_digraph(3).arc_count() == 6);
    CHECK(complete_digraph_with_loops(3).arc_count() == 9);
    CHECK(loops_only_digraph(3).arcs() ==
          std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 3}});
}

} // digraph suite

TEST_SUITE("walks") {

TEST_CASE("packing numbers on small examples") {
    CHECK(walk_packing_number(four_cycle(), 1) == 4);
    CHECK(walk_packing_number(four_cycle(), 7) == 4);
    Digraph path = from_arcs(3, {{1, 2}, {2, 3}});
    CHECK(walk_packing_number(path, 1) == 2);
    CHECK(walk_packing_number(path, 2) == 1);
    CHECK(walk_packing_number(path, 3) == 0);
    Digraph star = from_arcs(3, {{1, 2}, {1, 3}});
    CHECK(walk_packing_number(star, 1) == 1);
    CHECK(walk_packing_number(Digraph(2), 1) == 0);
}

TEST_CASE("flow agrees with the cycle and path oracle on all three-vertex digraphs") {
    for (std::uint32_t mask = 0; mask < 512; ++mask) {
        Digraph d = digraph_from_mask(3, mask);
        for (int p = 1; p <= 3; ++p)
            REQUIRE(walk_packing_number(d, p) == walk_packing_bruteforce(d, p));
    }
}

TEST_CASE("closed form at p = 1 agrees on all three-vertex digraphs") {
    for (std::uint32_t mask = 0; mask < 512; ++mask) {
        Digraph d = digraph_from_mask(3, mask);
        REQUIRE(walk_packing_edmonds(d) == walk_packing_number(d, 1));
    }
}

TEST_CASE("bruteforce guards against large inputs") {
    CHECK_THROWS_AS(walk_packing_bruteforce(complete_digraph(8), 1), guard_error);
    CHECK(walk_packing_bruteforce(loops_only_digraph(8), 1, {.max_n = 8}) == 8);
}

TEST_CASE("certificate reproduces known families") {
    WalkFamily c4 = walk_certificate(four_cycle(), 2);
    CHECK(c4.walks == std::vector<std::vector<int>>{
                          {1, 2, 3}, {2, 3, 4}, {3, 4, 1}, {4, 1, 2}});

    CHECK(walk_certificate(from_arcs(3, {{1, 2}, {2, 3}}), 2).walks ==
          std::vector<std::vector<int>>{{1, 2, 3}});
    CHECK(walk_certificate(from_arcs(3, {{1, 2}, {1, 3}}), 1).walks ==
          std::vector<std::vector<int>>{{1, 2}});
    CHECK(walk_certificate(from_arcs(2, {{1, 2}, {2, 2}}), 2).walks ==
          std::vector<std::vector<int>>{{2, 2, 2}});

    Digraph mixed = from_arcs(5, {{1, 2}, {2, 1}, {3, 4}, {4, 5}});
    CHECK(walk_certificate(mixed, 1).walks ==
          std::vector<std::vector<int>>{{1, 2}, {2, 1}, {3, 4}, {4, 5}});
    CHECK(walk_certificate(mixed, 2).walks ==
          std::vector<std::vector<int>>{{1, 2, 1}, {2, 1, 2}, {3, 4, 5}});
}

TEST_CASE("certificate size matches the packing number on all three-vertex digraphs") {
    for (std::uint32_t mask = 0; mask < 512; ++mask) {
        Digraph d = digraph_from_mask(3, mask);
        for (int p = 1; p <= 4; ++p) {
            WalkFamily family = walk_certificate(d, p);
            REQUIRE(static_cast<int>(family.size()) == walk_packing_number(d, p));
        }
    }
}

TEST_CASE("family validation rejects broken families") {
    WalkFamily bad{1, {{1, 2}, {3, 2}}};
    CHECK_THROWS_AS(validate_walk_family(four_cycle(), bad), input_error);
    WalkFamily nonwalk{1, {{1, 3}}};
    CHECK_THROWS_AS(validate_walk_family(four_cycle(), nonwalk), input_error);
    WalkFamily short_walk{2, {{1, 2}}};
    CHECK_THROWS_AS(validate_walk_family(four_cycle(), short_walk), input_error);
}

TEST_CASE("disjoint cycle families") {
    CHECK(max_disjoint_cycle_family(four_cycle()) ==
          std::vector<std::vector<int>>{{1, 2, 3, 4}});
    CHECK(max_disjoint_cycle_family(loops_only_digraph(3)) ==
          std::vector<std::vector<int>>{{1}, {2}, {3}});
    CHECK(max_disjoint_cycle_family(from_arcs(3, {{1, 2}, {2, 3}})).empty());
    CHECK(has_cycle_cover(four_cycle()));
    CHECK(!has_cycle_cover(from_arcs(3, {{1, 2}, {2, 3}})));
}

} // walks suite

TEST_SUITE("galois") {

TEST_CASE("binary determinant of the off-diagonal ones matrix") {
    CHECK(gf2_determinant(BinaryMatrix::ones_off_diagonal(2)) == 1);
    CHECK(gf2_determinant(BinaryMatrix::ones_off_diagonal(3)) == 0);
    CHECK(gf2_determinant(BinaryMatrix::ones_off_diagonal(4)) == 1);

    BinaryMatrix id(3, 3);
    for (int i = 0; i < 3; ++i)
        id.set(i, i, true);
    CHECK(gf2_determinant(id) == 1);
}

TEST_CASE("derangement parity matches enumeration") {
    for (int n = 1; n <= 8; ++n) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        int count = 0;
        do {
            bool deranged = true;
            for (int i = 0; i < n; ++i)
                if (perm[i] == i)
                    deranged = false;
            count += deranged;
        } while (std::next_permutation(perm.begin(), perm.end()));
        REQUIRE(derangement_parity(n) == count % 2);
    }
}

TEST_CASE("field arithmetic in GF(8)") {
    Gf2m f(3);
    CHECK(f.mul(2, 4) == 3);
    CHECK(f.add(5, 5) == 0);
    CHECK(f.pow(2, 7) == 1);
    for (std::uint32_t a = 1; a < f.size(); ++a)
        CHECK(f.mul(a, f.inv(a)) == 1);
}

TEST_CASE("the element two generates every multiplicative group") {
    for (int m = 2; m <= 10; ++m) {
        Gf2m f(m);
        std::set<std::uint32_t> powers;
        std::uint32_t x = 1;
        for (std::uint32_t e = 0; e + 1 < f.size(); ++e) {
            powers.insert(x);
            x = f.mul(x, f.generator());
        }
        REQUIRE(x == 1);
        REQUIRE(powers.size() == f.size() - 1);
    }
    Gf2m big(16);
    CHECK(big.pow(big.generator(), big.size() - 1) == 1);
    CHECK(big.mul(40000, big.inv(40000)) == 1);
}

TEST_CASE("matrix determinant over GF(4)") {
    Gf2m f(2);
    CHECK(gf2m_matrix_determinant(f, {{2, 1}, {1, 2}}) == f.add(f.mul(2, 2), 1));
    CHECK(gf2m_matrix_determinant(f, {{1, 1}, {1, 1}}) == 0);
    CHECK(gf2m_matrix_determinant(f, {{3}}) == 3);
}

} // galois suite

TEST_SUITE("fds") {

TEST_CASE("mixed-radix packing round trips") {
    std::vector<std::uint32_t> digits{2, 0, 1};
    State x = pack_state(digits, 3);
    CHECK(x == 2 + 0 * 3 + 1 * 9);
    CHECK(unpack_state(x, 3, 3) == digits);
    CHECK(state_digit(x, 1, 3) == 2);
    CHECK(state_digit(x, 3, 3) == 1);
}

TEST_CASE("state space guard") {
    CHECK(state_space_size(3, 0, 10) == 1);
    CHECK(state_space_size(2, 10, 1024) == 1024);
    CHECK_THROWS_AS(state_space_size(2, 11, 1024), guard_error);
    CHECK_THROWS_AS(state_space_size(2, 64, std::uint64_t(-1)), guard_error);
}

TEST_CASE("fds text format round trips") {
    Fds f(2, 2);
    f.set_rule(1, {2}, {0, 1});
    f.set_rule(2, {1}, {1, 0});
    CHECK(Fds::parse_string(f.to_string()).to_string() == f.to_string());
    CHECK_THROWS_AS(Fds::parse_string("fds 2 1\nnbr 1: 1\ntab 1: 0\n"), input_error);
    CHECK_THROWS_AS(Fds::parse_string("fds 2 1\nnbr 1: 2\ntab 1: 0 1\n"), input_error);
    CHECK_THROWS_AS(Fds::parse_string("fds 1 1\nnbr 1:\ntab 1: 0\n"), input_error);
}

TEST_CASE("swap system materializes to the expected map") {
    Fds f(2, 2);
    f.set_rule(1, {2}, {0, 1});
    f.set_rule(2, {1}, {0, 1});
    TransitionMap t = materialize(f);
    CHECK(t.next == std::vector<State>{0, 2, 1, 3});
    CHECK(is_permutation(t));
    CHECK(rank(t) == 4);
    CHECK(evaluate(f, 1) == 2);
}

TEST_CASE("parallel kernels match the serial references") {
    Rng rng(7);
    for (int round = 0; round < 5; ++round) {
        TransitionMap t{3, 4, {}};
        TransitionMap u{3, 4, {}};
        for (int i = 0; i < 81; ++i) {
            t.next.push_back(rng.below(81));
            u.next.push_back(rng.below(81));
        }
        REQUIRE(compose(t, u) == compose_serial(t, u));
        REQUIRE(rank(t) == rank_serial(t));
        REQUIRE(periodic_points(t) == periodic_points_serial(t));
    }
}

TEST_CASE("iterate equals repeated composition") {
    Rng rng(11);
    TransitionMap t{2, 3, {}};
    for (int i = 0; i < 8; ++i)
        t.next.push_back(rng.below(8));
    TransitionMap power = t;
    for (int p = 1; p <= 6; ++p) {
        REQUIRE(iterate(t, p) == power);
        power = compose(t, power);
    }
}

TEST_CASE("scaled rank is exact on powers of q") {
    CHECK(scaled_rank(8, 2) == 3.0);
    CHECK(scaled_rank(1, 5) == 0.0);
    int e = -1;
    CHECK(exact_log(243, 3, e));
    CHECK(e == 5);
    CHECK(!exact_log(10, 3, e));
    CHECK(std::abs(scaled_rank(10, 3) - std::log(10.0) / std::log(3.0)) < 1e-12);
}

TEST_CASE("periodic points by image stabilization") {
    TransitionMap chain{2, 2, {1, 2, 3, 3}};
    CHECK(periodic_points(chain) == std::vector<State>{3});
    TransitionMap perm{2, 2, {2, 3, 1, 0}};
    CHECK(periodic_points(perm) == std::vector<State>{0, 1, 2, 3});
    CHECK(periodic_count(chain) == 1);
    CHECK(periodic_points(chain) == periodic_points_peeling(chain));
}

TEST_CASE("interaction graph and membership") {
    Fds f(2, 2);
    f.set_rule(1, {2}, {0, 1});
    f.set_rule(2, {1, 2}, {0, 0, 0, 1});
    Digraph ig = interaction_graph(f);
    CHECK(ig.arcs() == std::vector<std::pair<int, int>>{{1, 2}, {2, 1}, {2, 2}});
    CHECK(interaction_graph(materialize(f)) == ig);
    CHECK(membership(f, ig) == Membership::exact);
    CHECK(membership(f, complete_digraph_with_loops(2)) == Membership::contained);
    CHECK(membership(f, two_cycle()) == Membership::neither);

    Fds constant(2, 1);
    constant.set_rule(1, {1}, {0, 0});
    CHECK(interaction_graph(constant).arc_count() == 0);
}

TEST_CASE("schedules update blocks in order") {
    Fds f(2, 2);
    f.set_rule(1, {2}, {0, 1});
    f.set_rule(2, {1}, {0, 1});

    Schedule seq = Schedule::parse_string("1\n2\n");
    TransitionMap t = apply_schedule(f, seq);
    CHECK(t.next == std::vector<State>{0, 0, 3, 3});
    CHECK(rank(t) == 2);

    Schedule par = Schedule::parse_string("1 2\n");
    CHECK(apply_schedule(f, par) == materialize(f));

    CHECK(apply_block(f, {1}, 2) == 3);
}

TEST_CASE("schedule parsing and classification") {
    CHECK_THROWS_AS(Schedule::parse_string(""), input_error);
    CHECK_THROWS_AS(Schedule::parse_string("1 1\n"), input_error);
    Schedule s = Schedule::parse_string("2\n1 3\n2\n");
    CHECK_THROWS_AS(s.validate(2), input_error);
    ScheduleFlags flags = classify_schedule(s, 3);
    CHECK(flags.complete);
    CHECK(!flags.block_sequential);
    CHECK(!flags.parallel);
    ScheduleFlags par = classify_schedule(Schedule::parse_string("1 2 3\n"), 3);
    CHECK(par.parallel);
    CHECK(par.block_sequential);
    CHECK(Schedule::parse_string("2\n1 3\n").to_string() == "2\n1 3\n");
}

} // fds suite

TEST_SUITE("constructions") {

TEST_CASE("copy system attains the walk bound on the two-cycle") {
    Digraph d = two_cycle();
    Fds f = copy_walk_system(d, walk_certificate(d, 1));
    CHECK(rank(materialize(f)) == 4);
    CHECK(membership(f, d) == Membership::exact);
}

TEST_CASE("copy system accepts a loop walk family") {
    Digraph d = from_arcs(2, {{1, 2}, {2, 2}});
    Fds f = copy_walk_system(d, walk_certificate(d, 2));
    CHECK(rank(iterate(materialize(f), 2)) == 2);
}

TEST_CASE("copy system rejects inconsistent families") {
    WalkFamily bad{2, {{1, 2, 2}}};
    CHECK_THROWS_AS(copy_walk_system(from_arcs(2, {{1, 2}, {2, 2}}), bad),
                    input_error);
}

TEST_CASE("red-light system attains the bound with exact interaction graph") {
    Digraph d = two_cycle();
    Fds f = red_light_system(d, 3, walk_certificate(d, 1));
    CHECK(rank(materialize(f)) == 9);
    CHECK(membership(f, d) == Membership::exact);
    CHECK_THROWS_AS(red_light_system(d, 2, walk_certificate(d, 1)), input_error);
}

TEST_CASE("red-light iterates keep the bound on the four-cycle") {
    Digraph d = four_cycle();
    Fds f = red_light_system(d, 3, walk_certificate(d, 2));
    CHECK(rank(iterate(materialize(f), 2)) == 81);
}

TEST_CASE("complete-graph permutations exist except on three vertices") {
    for (int n : {2, 4, 5, 6, 7}) {
        Fds f = kn_permutation_system(n);
        CAPTURE(n);
        REQUIRE(is_permutation(materialize(f)));
        REQUIRE(membership(f, complete_digraph(n)) == Membership::exact);
    }
    CHECK_THROWS_AS(kn_permutation_system(3), input_error);
    CHECK_THROWS_AS(kn_permutation_system(1), input_error);
}

TEST_CASE("clique transposition swaps the two constant states") {
    Fds f = clique_loops_transposition(2);
    TransitionMap t = materialize(f);
    CHECK(t.next == std::vector<State>{3, 1, 2, 0});
    CHECK(is_permutation(t));
    // At n = 2 the rules degenerate to plain negations, so the loops drop
    // out of the interaction graph; from n = 3 on it is the full looped clique.
    CHECK(membership(f, complete_digraph_with_loops(2)) == Membership::contained);
    CHECK(interaction_graph(f) == complete_digraph(2));
    CHECK(membership(clique_loops_transposition(3), complete_digraph_with_loops(3)) ==
          Membership::exact);
    CHECK(membership(clique_loops_transposition(4), complete_digraph_with_loops(4)) ==
          Membership::exact);
}

TEST_CASE("complete-schedule system is a permutation on cycle-covered digraphs") {
    CompleteScheduleSystem sys = complete_schedule_system(four_cycle(), 2, 5);
    CHECK(sys.q == 4);
    CHECK(!sys.sentinel);
    CHECK(sys.rest.empty());
    CHECK(is_permutation(apply_schedule(sys.fds, sys.schedule)));
    ScheduleFlags flags = classify_schedule(sys.schedule, 4);
    CHECK(flags.complete);

    CompleteScheduleSystem again = complete_schedule_system(four_cycle(), 2, 5);
    CHECK(again.fds.to_string() == sys.fds.to_string());
}

TEST_CASE("complete-schedule system keeps periodic points with trivial components") {
    Digraph d = from_arcs(3, {{1, 2}, {2, 1}, {2, 3}});
    CompleteScheduleSystem sys = complete_schedule_system(d, 2, 9);
    CHECK(sys.sentinel);
    CHECK(sys.q == 5);
    CHECK(sys.rest == std::vector<int>{3});
    std::uint64_t periodic = periodic_count(apply_schedule(sys.fds, sys.schedule));
    CHECK(periodic >= 16);
}

TEST_CASE("degree-two reports stay below the Boolean bound") {
    Digraph k3 = complete_digraph(3);
    DegreeTwoReport report = degree_two_obstruction_report(k3);
    CHECK(report.systems == 1000);
    CHECK(report.bound == 8);
    CHECK(report.max_rank[0] == 6);
    CHECK(report.all_below_bound);
    CHECK_THROWS_AS(degree_two_obstruction_report(four_cycle()), input_error);
    CHECK_THROWS_AS(degree_two_obstruction_report(complete_digraph_with_loops(3)),
                    input_error);
}

TEST_CASE("exactly ten two-input tables are essential in both inputs") {
    const auto& tables = essential_two_input_tables();
    CHECK(tables.size() == 10);
    std::uint32_t previous = 0;
    for (const auto& t : tables) {
        CHECK((t[0] != t[1] || t[2] != t[3]));
        CHECK((t[0] != t[2] || t[1] != t[3]));
        std::uint32_t value = t[0] | t[1] << 1 | t[2] << 2 | t[3] << 3;
        CHECK(value > previous);
        previous = value;
    }
}

} // constructions suite

TEST_SUITE("sampling") {

TEST_CASE("contained samples are reproducible and contained") {
    Digraph d = from_arcs(3, {{1, 2}, {2, 3}, {3, 1}, {1, 1}});
    Fds a = sample_contained(d, 3, 42);
    Fds b = sample_contained(d, 3, 42);
    CHECK(a.to_string() == b.to_string());
    CHECK(sample_contained(d, 3, 43).to_string() != a.to_string());
    CHECK(membership(a, d) != Membership::neither);
}

TEST_CASE("exact samples hit the target graph") {
    Digraph d = two_cycle();
    Fds f = sample_exact(d, 2, 7);
    CHECK(membership(f, d) == Membership::exact);
    CHECK_THROWS_AS(sample_exact(d, 2, 7, {.rejection_cap = 0}), guard_error);
}

TEST_CASE("rank estimates are deterministic and respect the walk bound") {
    Digraph d = two_cycle();
    RankEstimate e1 = estimate_average_scaled_rank(d, 64, 2000, 1);
    RankEstimate e2 = estimate_average_scaled_rank(d, 64, 2000, 1);
    CHECK(e1.mean_scaled == e2.mean_scaled);
    CHECK(e1.stderr_scaled == e2.stderr_scaled);
    CHECK(e1.mean_scaled > 1.75);
    CHECK(e1.mean_scaled <= 2.0);
    CHECK(e1.stderr_scaled < 0.01);
}

TEST_CASE("periodic estimates are deterministic") {
    Digraph d = loops_only_digraph(2);
    PeriodicEstimate e1 = estimate_average_periodic_rank(d, 4, 200, 3);
    PeriodicEstimate e2 = estimate_average_periodic_rank(d, 4, 200, 3);
    CHECK(e1.mean_count == e2.mean_count);
    CHECK(e1.mean_count >= 1.0);
    CHECK(e1.mean_count <= 16.0);
}

TEST_CASE("random schedules have the advertised shape") {
    Rng rng(99);
    for (int round = 0; round < 50; ++round) {
        Schedule s = random_block_sequential_schedule(5, rng);
        ScheduleFlags flags = classify_schedule(s, 5);
        REQUIRE(flags.block_sequential);
        REQUIRE(flags.complete);
        Schedule c = random_complete_schedule(5, rng);
        REQUIRE(classify_schedule(c, 5).complete);
    }
}

} // sampling suite
