#include "fdsrank/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <utility>

#include "fdsrank/constructions.hpp"
#include "fdsrank/errors.hpp"
#include "fdsrank/sampling.hpp"
#include "fdsrank/walks.hpp"

namespace fdsrank {

namespace {

using Clock = std::chrono::steady_clock;

// First failure wins; safe to record from any OpenMP thread.
struct Failure {
    std::atomic<bool> hit{false};
    std::string message;

    void record(std::string m) {
#pragma omp critical(fdsrank_verify_failure)
        if (!hit.load()) {
            message = std::move(m);
            hit.store(true);
        }
    }
    bool any() const { return hit.load(); }
};

SuiteResult finish(const std::string& name, Clock::time_point start, Failure& fail,
                   std::string pass_detail) {
    SuiteResult result;
    result.name = name;
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.passed = !fail.any();
    result.detail = result.passed ? std::move(pass_detail) : std::move(fail.message);
    return result;
}

std::uint64_t pow_u64(std::uint64_t base, std::uint64_t exponent) {
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < exponent; ++i)
        result *= base;
    return result;
}

std::string fmt(double value) {
    std::ostringstream out;
    out.precision(5);
    out << value;
    return out.str();
}

// All digraphs on up to 4 vertices with at least one arc: 66062 of them.
std::vector<Digraph> arc_suite() {
    std::vector<Digraph> suite;
    for (int n = 1; n <= 4; ++n)
        for (std::uint32_t mask = 1; mask < std::uint32_t(1) << (n * n); ++mask)
            suite.push_back(digraph_from_mask(n, mask));
    return suite;
}

const double kArcProbs[] = {0.15, 0.3, 0.5, 0.7, 0.85};

// 1. Layered max-flow against the cycle/path family oracle.
SuiteResult suite_flow_oracle() {
    const auto start = Clock::now();
    Failure fail;

    for (int n = 1; n <= 3 && !fail.any(); ++n) {
        for (std::uint32_t mask = 0; mask < std::uint32_t(1) << (n * n); ++mask) {
            const Digraph d = digraph_from_mask(n, mask);
            for (int p = 1; p <= 3; ++p) {
                const int flow = walk_packing_number(d, p);
                const int brute = walk_packing_bruteforce(d, p);
                if (flow != brute) {
                    fail.record("n=" + std::to_string(n) + " mask=" + std::to_string(mask) +
                                " p=" + std::to_string(p) + ": flow " + std::to_string(flow) +
                                " != oracle " + std::to_string(brute));
                    break;
                }
            }
        }
    }

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < 500; ++i) {
        if (fail.any())
            continue;
        try {
            Rng rng(derive_stream_seed(11001, i));
            const int n = 4 + i % 3;
            const Digraph d = random_digraph(n, kArcProbs[i % 5], rng);
            for (int p = 1; p <= n; ++p) {
                const int flow = walk_packing_number(d, p);
                const int brute = walk_packing_bruteforce(d, p);
                if (flow != brute) {
                    fail.record("random digraph " + std::to_string(i) + " (n=" +
                                std::to_string(n) + ") p=" + std::to_string(p) + ": flow " +
                                std::to_string(flow) + " != oracle " + std::to_string(brute));
                    break;
                }
            }
        } catch (const std::exception& e) {
            fail.record("random digraph " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("flow-oracle", start, fail,
                  "530 exhaustive digraphs (p = 1..3) and 500 random digraphs with n = 4..6 "
                  "(p = 1..n) agree with the cycle/path family oracle");
}

// 2. Flow at p = 1 against the deficiency formula.
SuiteResult suite_edmonds() {
    const auto start = Clock::now();
    Failure fail;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < 1000; ++i) {
        if (fail.any())
            continue;
        try {
            Rng rng(derive_stream_seed(12001, i));
            const int n = 1 + i % 6;
            const Digraph d = random_digraph(n, kArcProbs[i % 5], rng);
            const int flow = walk_packing_number(d, 1);
            const int closed = walk_packing_edmonds(d);
            if (flow != closed)
                fail.record("random digraph " + std::to_string(i) + " (n=" + std::to_string(n) +
                            "): flow " + std::to_string(flow) + " != deficiency formula " +
                            std::to_string(closed));
        } catch (const std::exception& e) {
            fail.record("random digraph " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("edmonds", start, fail,
                  "1000 random digraphs with n = 1..6 agree with the deficiency formula at p = 1");
}

// 3. rank(f^p) <= q^{alpha_p} for sampled systems.
SuiteResult suite_rank_bound() {
    const auto start = Clock::now();
    Failure fail;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < 200; ++i) {
        if (fail.any())
            continue;
        try {
            Rng rng(derive_stream_seed(13001, i));
            const int n = 1 + i % 4;
            const std::uint32_t q = 2 + (i / 4) % 2;
            const Digraph d = random_digraph(n, kArcProbs[i % 5], rng);
            const Fds f = sample_contained(d, q, derive_stream_seed(13501, i));
            TransitionMap power = materialize(f);
            const TransitionMap base = power;
            for (int p = 1; p <= 5; ++p) {
                if (p > 1)
                    power = compose_serial(base, power);
                const std::uint64_t r = rank_serial(power);
                const std::uint64_t bound = pow_u64(q, walk_packing_number(d, p));
                if (r > bound) {
                    fail.record("sample " + std::to_string(i) + " (n=" + std::to_string(n) +
                                ", q=" + std::to_string(q) + ", p=" + std::to_string(p) +
                                "): rank " + std::to_string(r) + " exceeds q^alpha_p = " +
                                std::to_string(bound));
                    break;
                }
            }
        } catch (const std::exception& e) {
            fail.record("sample " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("rank-bound", start, fail,
                  "200 sampled systems stay within q^alpha_p for p = 1..5");
}

// 4. The copy system attains the bound with q = 2.
SuiteResult suite_copy_attainment() {
    const auto start = Clock::now();
    Failure fail;
    const std::vector<Digraph> suite = arc_suite();

#pragma omp parallel for schedule(dynamic, 64)
    for (std::size_t i = 0; i < suite.size(); ++i) {
        if (fail.any())
            continue;
        const Digraph& d = suite[i];
        try {
            for (int p = 1; p <= 4; ++p) {
                const int alpha = walk_packing_number(d, p);
                const WalkFamily cert = walk_certificate(d, p);
                if (static_cast<int>(cert.size()) != alpha) {
                    fail.record("suite digraph " + std::to_string(i) + " p=" + std::to_string(p) +
                                ": certificate has " + std::to_string(cert.size()) +
                                " walks, alpha_p = " + std::to_string(alpha));
                    break;
                }
                const Fds f = copy_walk_system(d, cert);
                const std::uint64_t r = rank_serial(iterate(materialize(f), p));
                if (r != pow_u64(2, alpha)) {
                    fail.record("suite digraph " + std::to_string(i) + " p=" + std::to_string(p) +
                                ": copy system rank " + std::to_string(r) + " != 2^" +
                                std::to_string(alpha));
                    break;
                }
            }
        } catch (const std::exception& e) {
            fail.record("suite digraph " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("copy-attainment", start, fail,
                  "copy systems attain rank(f^p) = 2^alpha_p on all " +
                      std::to_string(suite.size()) + " digraphs with n <= 4, p = 1..4");
}

// 5. The red-light system attains the bound with exact interaction graph.
SuiteResult suite_redlight_attainment() {
    const auto start = Clock::now();
    Failure fail;
    const std::vector<Digraph> suite = arc_suite();
    std::uint64_t flagged = 0, flagged_exact = 0;

#pragma omp parallel for schedule(dynamic, 64) reduction(+ : flagged, flagged_exact)
    for (std::size_t i = 0; i < suite.size(); ++i) {
        if (fail.any())
            continue;
        const Digraph& d = suite[i];
        try {
            bool isolated_source = false;
            for (int v = 1; v <= d.vertex_count(); ++v)
                if (d.in_neighbours(v).empty())
                    isolated_source = true;
            for (std::uint32_t q = 3; q <= 4; ++q) {
                for (int p = 1; p <= 4; ++p) {
                    const int alpha = walk_packing_number(d, p);
                    const Fds f = red_light_system(d, q, walk_certificate(d, p));
                    const std::uint64_t r = rank_serial(iterate(materialize(f), p));
                    if (r != pow_u64(q, alpha)) {
                        fail.record("suite digraph " + std::to_string(i) + " q=" +
                                    std::to_string(q) + " p=" + std::to_string(p) +
                                    ": red-light rank " + std::to_string(r) + " != " +
                                    std::to_string(q) + "^" + std::to_string(alpha));
                        break;
                    }
                    const bool exact = interaction_graph(f) == d;
                    if (isolated_source) {
                        ++flagged;
                        if (exact)
                            ++flagged_exact;
                    } else if (!exact) {
                        fail.record("suite digraph " + std::to_string(i) + " q=" +
                                    std::to_string(q) + " p=" + std::to_string(p) +
                                    ": interaction graph differs from the input digraph");
                        break;
                    }
                }
                if (fail.any())
                    break;
            }
        } catch (const std::exception& e) {
            fail.record("suite digraph " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("redlight-attainment", start, fail,
                  "red-light systems attain rank(f^p) = q^alpha_p with exact interaction graph "
                  "for q = 3,4 on all " +
                      std::to_string(suite.size()) + " digraphs; " + std::to_string(flagged) +
                      " isolated-source cases reported unasserted, interaction graph exact in " +
                      std::to_string(flagged_exact) + " of them");
}

// 6. Boolean permutations over complete digraphs; none exist on 3 vertices.
SuiteResult suite_kn_permutation() {
    const auto start = Clock::now();
    Failure fail;

    for (int n : {2, 4, 5, 6, 7}) {
        try {
            const Fds f = kn_permutation_system(n);
            if (!is_permutation(materialize(f))) {
                fail.record("n=" + std::to_string(n) + ": not a permutation");
                break;
            }
            if (!(interaction_graph(f) == complete_digraph(n))) {
                fail.record("n=" + std::to_string(n) +
                            ": interaction graph is not the complete loopless digraph");
                break;
            }
        } catch (const std::exception& e) {
            fail.record("n=" + std::to_string(n) + std::string(": ") + e.what());
            break;
        }
    }

    std::string k3_detail;
    if (!fail.any()) {
        try {
            const DegreeTwoReport report = degree_two_obstruction_report(complete_digraph(3));
            if (report.systems != 1000)
                fail.record("complete digraph on 3 vertices: expected 1000 systems, got " +
                            std::to_string(report.systems));
            else if (report.max_rank[0] >= 8)
                fail.record("complete digraph on 3 vertices: a system with both-essential rules "
                            "reaches rank 8, i.e. a permutation exists");
            else
                k3_detail = "; no permutation among the 1000 both-essential systems on 3 "
                            "vertices (max rank " +
                            std::to_string(report.max_rank[0]) + ")";
        } catch (const std::exception& e) {
            fail.record(std::string("complete digraph on 3 vertices: ") + e.what());
        }
    }

    return finish("kn-permutation", start, fail,
                  "permutations with complete loopless interaction graph exist for n = 2,4,5,6,7" +
                      k3_detail);
}

// 7. Scheduled rank bound for block-sequential schedules.
SuiteResult suite_block_sequential_bound() {
    const auto start = Clock::now();
    Failure fail;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < 500; ++i) {
        if (fail.any())
            continue;
        try {
            Rng rng(derive_stream_seed(17001, i));
            const int n = 1 + i % 4;
            const std::uint32_t q = 2 + (i / 4) % 2;
            const Digraph d = random_digraph(n, kArcProbs[i % 5], rng);
            const Fds f = sample_exact(d, q, derive_stream_seed(17501, i));
            const Schedule sigma = random_block_sequential_schedule(n, rng);
            const std::uint64_t r = rank_serial(apply_schedule(f, sigma));
            const std::uint64_t bound = pow_u64(q, walk_packing_number(d, 1));
            if (r > bound)
                fail.record("trial " + std::to_string(i) + " (n=" + std::to_string(n) + ", q=" +
                            std::to_string(q) + "): scheduled rank " + std::to_string(r) +
                            " exceeds q^alpha_1 = " + std::to_string(bound));
        } catch (const std::exception& e) {
            fail.record("trial " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("block-sequential-bound", start, fail,
                  "500 sampled systems under random block-sequential schedules stay within "
                  "q^alpha_1");
}

// 8. Complete-schedule linear systems: permutations without trivial
// components, many periodic points otherwise.
SuiteResult suite_complete_schedule() {
    const auto start = Clock::now();
    Failure fail;
    const std::vector<Digraph> suite = arc_suite();
    std::uint64_t permutations = 0;

#pragma omp parallel for schedule(dynamic, 64) reduction(+ : permutations)
    for (std::size_t i = 0; i < suite.size(); ++i) {
        if (fail.any())
            continue;
        const Digraph& d = suite[i];
        try {
            const int n = d.vertex_count();
            const int trivial = scc_summary(d).trivial_count;
            const CompleteScheduleSystem sys =
                complete_schedule_system(d, 2, derive_stream_seed(18001, i), 256);
            if (!classify_schedule(sys.schedule, n).complete) {
                fail.record("suite digraph " + std::to_string(i) + ": schedule not complete");
                continue;
            }
            const std::uint32_t expected_q = trivial > 0 ? 5 : 4;
            if (sys.q != expected_q || sys.sentinel != (trivial > 0)) {
                fail.record("suite digraph " + std::to_string(i) + ": expected q = " +
                            std::to_string(expected_q) + ", got " + std::to_string(sys.q));
                continue;
            }
            const TransitionMap t = apply_schedule(sys.fds, sys.schedule);
            if (trivial == 0) {
                if (!is_permutation(t)) {
                    fail.record("suite digraph " + std::to_string(i) +
                                ": no trivial components but the scheduled map is not a "
                                "permutation");
                    continue;
                }
                ++permutations;
            } else {
                const std::uint64_t floor = pow_u64(sys.q - 1, n - trivial);
                const std::uint64_t per = periodic_points_serial(t).size();
                if (per < floor) {
                    fail.record("suite digraph " + std::to_string(i) + ": " +
                                std::to_string(per) + " periodic points, need at least " +
                                std::to_string(floor));
                    continue;
                }
            }
        } catch (const std::exception& e) {
            fail.record("suite digraph " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("complete-schedule", start, fail,
                  "complete-schedule systems over GF(4) are permutations on all " +
                      std::to_string(permutations) +
                      " cycle-covered digraphs and keep at least (q-1)^(n-T) periodic points on "
                      "the rest of the " +
                      std::to_string(suite.size()) + "-digraph suite");
}

// 9. Two-input Boolean systems never reach rank 2^n on the two witness
// digraphs.
SuiteResult suite_degree2_obstruction() {
    const auto start = Clock::now();
    Failure fail;
    std::string detail;

    try {
        Digraph bidirected(4);
        for (int v = 1; v <= 4; ++v) {
            const int w = v % 4 + 1;
            bidirected.add_arc(v, w);
            bidirected.add_arc(w, v);
        }
        Digraph loops(4);
        for (int v = 1; v <= 4; ++v) {
            loops.add_arc(v, v % 4 + 1);
            loops.add_arc(v, v);
        }

        for (const auto& [label, d] :
             {std::pair<const char*, const Digraph*>{"bidirected 4-cycle", &bidirected},
              std::pair<const char*, const Digraph*>{"looped 4-cycle", &loops}}) {
            const DegreeTwoReport report = degree_two_obstruction_report(*d);
            if (report.systems != 10000) {
                fail.record(std::string(label) + ": expected 10000 systems, got " +
                            std::to_string(report.systems));
                break;
            }
            if (!report.all_below_bound) {
                fail.record(std::string(label) + ": some system reaches rank 16");
                break;
            }
            std::uint64_t overall = 0;
            for (std::uint64_t r : report.max_rank)
                overall = std::max(overall, r);
            detail += std::string(detail.empty() ? "" : "; ") + label + " max rank " +
                      std::to_string(overall) + " of bound 16";
        }
    } catch (const std::exception& e) {
        fail.record(e.what());
    }

    return finish("degree2-obstruction", start, fail,
                  "both-essential Boolean systems stay below rank 2^4 for p = 1..4: " + detail);
}

// 10. Monte-Carlo averages against the random-map constants.
SuiteResult suite_average_rank_constants() {
    const auto start = Clock::now();
    Failure fail;
    std::string detail;

    const double epsilon = 1.0 - std::exp(-1.0);
    try {
        const RankEstimate image1 =
            estimate_average_scaled_rank(complete_digraph_with_loops(1), 256, 2000, 31415);
        const double ratio1 = image1.mean_rank / 256.0;
        if (std::abs(ratio1 - epsilon) >= 0.01)
            fail.record("single looped vertex, q=256: mean image ratio " + fmt(ratio1) +
                        " not within 0.01 of " + fmt(epsilon));
        detail += "image ratio " + fmt(ratio1) + " vs " + fmt(epsilon);

        if (!fail.any()) {
            const RankEstimate image2 =
                estimate_average_scaled_rank(loops_only_digraph(2), 64, 2000, 27182);
            const double ratio2 = image2.mean_rank / 4096.0;
            const double target2 = epsilon * epsilon;
            if (std::abs(ratio2 - target2) >= 0.03 * target2)
                fail.record("two isolated loops, q=64: mean image ratio " + fmt(ratio2) +
                            " not within 3% of " + fmt(target2));
            detail += "; two-loop ratio " + fmt(ratio2) + " vs " + fmt(target2);
        }

        if (!fail.any()) {
            const PeriodicEstimate periodic =
                estimate_average_periodic_rank(complete_digraph_with_loops(2), 32, 500, 16180);
            const double target3 = std::sqrt(std::numbers::pi * 1024.0 / 2.0);
            if (std::abs(periodic.mean_count - target3) >= 0.15 * target3)
                fail.record("complete looped digraph on 2 vertices, q=32: mean periodic count " +
                            fmt(periodic.mean_count) + " not within 15% of " + fmt(target3));
            detail += "; periodic count " + fmt(periodic.mean_count) + " vs " + fmt(target3);
        }
    } catch (const std::exception& e) {
        fail.record(e.what());
    }

    return finish("average-rank-constants", start, fail,
                  "Monte-Carlo means match the random-map constants: " + detail);
}

// 11. Image stabilization against functional-graph peeling.
SuiteResult suite_periodic_oracle() {
    const auto start = Clock::now();
    Failure fail;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < 300; ++i) {
        if (fail.any())
            continue;
        try {
            Rng rng(derive_stream_seed(21001, i));
            const int n = 1 + i % 4;
            const std::uint64_t q_max = n == 1 ? 81 : n == 2 ? 9 : n == 3 ? 4 : 3;
            const std::uint32_t q = static_cast<std::uint32_t>(2 + rng.below(q_max - 1));
            TransitionMap t;
            t.q = q;
            t.n = n;
            t.next.resize(pow_u64(q, n));
            for (State& y : t.next)
                y = rng.below(t.next.size());
            if (periodic_points_serial(t) != periodic_points_peeling(t))
                fail.record("map " + std::to_string(i) + " (q=" + std::to_string(q) + ", n=" +
                            std::to_string(n) + "): stabilization and peeling disagree");
        } catch (const std::exception& e) {
            fail.record("map " + std::to_string(i) + ": " + e.what());
        }
    }

    return finish("periodic-oracle", start, fail,
                  "image stabilization matches functional-graph peeling on 300 random maps");
}

} // namespace

const std::vector<std::string>& verification_suite_names() {
    static const std::vector<std::string> names = {
        "flow-oracle",      "edmonds",
        "rank-bound",       "copy-attainment",
        "redlight-attainment", "kn-permutation",
        "block-sequential-bound", "complete-schedule",
        "degree2-obstruction", "average-rank-constants",
        "periodic-oracle",
    };
    return names;
}

SuiteResult run_verification_suite(const std::string& name) {
    if (name == "flow-oracle")
        return suite_flow_oracle();
    if (name == "edmonds")
        return suite_edmonds();
    if (name == "rank-bound")
        return suite_rank_bound();
    if (name == "copy-attainment")
        return suite_copy_attainment();
    if (name == "redlight-attainment")
        return suite_redlight_attainment();
    if (name == "kn-permutation")
        return suite_kn_permutation();
    if (name == "block-sequential-bound")
        return suite_block_sequential_bound();
    if (name == "complete-schedule")
        return suite_complete_schedule();
    if (name == "degree2-obstruction")
        return suite_degree2_obstruction();
    if (name == "average-rank-constants")
        return suite_average_rank_constants();
    if (name == "periodic-oracle")
        return suite_periodic_oracle();
    throw input_error("unknown verification suite: " + name);
}

std::vector<SuiteResult> run_all_verification_suites() {
    std::vector<SuiteResult> results;
    for (const std::string& name : verification_suite_names())
        results.push_back(run_verification_suite(name));
    return results;
}

std::vector<State> periodic_points_peeling(const TransitionMap& t) {
    const std::uint64_t size = t.size();
    std::vector<std::uint32_t> indegree(size, 0);
    for (std::uint64_t x = 0; x < size; ++x)
        ++indegree[t.next[x]];
    std::vector<std::uint64_t> stack;
    for (std::uint64_t x = 0; x < size; ++x)
        if (indegree[x] == 0)
            stack.push_back(x);
    while (!stack.empty()) {
        const std::uint64_t x = stack.back();
        stack.pop_back();
        const std::uint64_t y = t.next[x];
        if (--indegree[y] == 0)
            stack.push_back(y);
    }
    std::vector<State> periodic;
    for (std::uint64_t x = 0; x < size; ++x)
        if (indegree[x] > 0)
            periodic.push_back(x);
    return periodic;
}

Digraph digraph_from_mask(int n, std::uint32_t mask) {
    if (n < 1 || n > 5)
        throw input_error("digraph_from_mask: n must be in 1..5");
    if (n < 5 && mask >> (n * n) != 0)
        throw input_error("digraph_from_mask: mask has bits beyond n^2");
    Digraph d(n);
    for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v)
            if (mask >> ((u - 1) * n + (v - 1)) & 1)
                d.add_arc(u, v);
    return d;
}

Digraph random_digraph(int n, double arc_prob, Rng& rng) {
    if (arc_prob < 0.0 || arc_prob > 1.0)
        throw input_error("random_digraph: arc probability must be in [0, 1]");
    const std::uint64_t scale = std::uint64_t(1) << 24;
    const std::uint64_t threshold = static_cast<std::uint64_t>(arc_prob * scale);
    Digraph d(n);
    for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v)
            if (rng.below(scale) < threshold)
                d.add_arc(u, v);
    return d;
}

} // namespace fdsrank
