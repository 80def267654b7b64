#include "fdsrank/constructions.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <string>

#include "fdsrank/errors.hpp"
#include "fdsrank/galois.hpp"
#include "fdsrank/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fdsrank {

namespace {

// Predecessor of every vertex that occupies a position >= 1 on some walk.
// Walk structure makes repeated assignments agree; disagreement means the
// family was not produced by a maximum packing and is rejected.
std::vector<int> walk_predecessors(const Digraph& d, const WalkFamily& walks) {
    validate_walk_family(d, walks);
    std::vector<int> pred(d.vertex_count() + 1, 0);
    for (const auto& walk : walks.walks) {
        for (std::size_t s = 0; s + 1 < walk.size(); ++s) {
            const int from = walk[s];
            const int to = walk[s + 1];
            if (pred[to] != 0 && pred[to] != from)
                throw input_error("walk family: vertex " + std::to_string(to) +
                                  " has two distinct predecessors (" + std::to_string(pred[to]) +
                                  " and " + std::to_string(from) + ")");
            pred[to] = from;
        }
    }
    return pred;
}

// Guard for per-vertex table sizes (q^k entries).
void check_table_size(std::uint32_t q, std::size_t k) {
    state_space_size(q, static_cast<int>(k), kDefaultStateLimit);
}

// Fills the table of a rule over `neighbourhood` by calling value(digits)
// for every assignment; digits is 1-based over the neighbourhood vertices.
std::vector<std::uint32_t>
build_table(std::uint32_t q, int n, const std::vector<int>& neighbourhood,
            const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& value) {
    check_table_size(q, neighbourhood.size());
    std::uint64_t size = 1;
    for (std::size_t i = 0; i < neighbourhood.size(); ++i)
        size *= q;
    std::vector<std::uint32_t> table(size);
    std::vector<std::uint32_t> digits(n + 1, 0);
    for (std::uint64_t index = 0; index < size; ++index) {
        std::uint64_t rest = index;
        for (int u : neighbourhood) {
            digits[u] = static_cast<std::uint32_t>(rest % q);
            rest /= q;
        }
        table[index] = value(digits);
    }
    return table;
}

} // namespace

Fds copy_walk_system(const Digraph& d, const WalkFamily& walks) {
    const std::vector<int> pred = walk_predecessors(d, walks);
    Fds f(2, d.vertex_count());
    for (int v = 1; v <= d.vertex_count(); ++v) {
        if (pred[v] != 0)
            f.set_rule(v, {pred[v]}, {0, 1});
        else
            f.set_rule(v, {}, {0});
    }
    return f;
}

Fds red_light_system(const Digraph& d, std::uint32_t q, const WalkFamily& walks) {
    if (q < 3)
        throw input_error("red light system: q must be >= 3, got " + std::to_string(q));
    const std::vector<int> pred = walk_predecessors(d, walks);
    const int n = d.vertex_count();
    Fds f(q, n);
    for (int v = 1; v <= n; ++v) {
        const std::vector<int>& nbh = d.in_neighbours(v);
        if (pred[v] != 0) {
            // Copy the predecessor, flipped between 0 and 1 when every other
            // in-neighbour shows the go-ahead value 2.
            const int p = pred[v];
            f.set_rule(v, nbh,
                       build_table(q, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           bool go = true;
                           for (int u : nbh)
                               if (u != p && x[u] != 2)
                                   go = false;
                           if (go && x[p] <= 1)
                               return 1 - x[p];
                           return x[p];
                       }));
        } else {
            // Off-walk rule: 1 exactly when all in-neighbours show 1 (an
            // empty conjunction counts as true).
            f.set_rule(v, nbh,
                       build_table(q, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           for (int u : nbh)
                               if (x[u] != 1)
                                   return std::uint32_t(0);
                           return std::uint32_t(1);
                       }));
        }
    }
    return f;
}

Fds kn_permutation_system(int n) {
    if (n < 2)
        throw input_error("kn permutation: n must be >= 2, got " + std::to_string(n));
    if (n == 3)
        throw input_error("kn permutation: no Boolean permutation has complete interaction "
                          "graph on 3 vertices");

    const auto others = [n](int v) {
        std::vector<int> nbh;
        for (int u = 1; u <= n; ++u)
            if (u != v)
                nbh.push_back(u);
        return nbh;
    };

    Fds f(2, n);
    if (n % 2 == 0) {
        // x -> (J - I) x: every coordinate is the parity of all the others.
        for (int v = 1; v <= n; ++v) {
            const std::vector<int> nbh = others(v);
            f.set_rule(v, nbh, build_table(2, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           std::uint32_t parity = 0;
                           for (int u : nbh)
                               parity ^= x[u];
                           return parity;
                       }));
        }
        return f;
    }

    if (n == 5) {
        // (f1,f2,f3) rotate (x3,x1,x2) or (x2,x3,x1) depending on x4 = x5;
        // (f4,f5) swap x5,x4, complemented unless (x1,x2,x3) = 0.
        const int rotated[2][4] = {{0, 3, 1, 2}, {0, 2, 3, 1}};
        for (int v = 1; v <= 3; ++v) {
            const std::vector<int> nbh = others(v);
            f.set_rule(v, nbh, build_table(2, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           const int cas33 = x[4] == x[5] ? 0 : 1;
                           return x[rotated[cas33][v]];
                       }));
        }
        for (int v = 4; v <= 5; ++v) {
            const std::vector<int> nbh = others(v);
            const int other = v == 4 ? 5 : 4;
            f.set_rule(v, nbh, build_table(2, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           const std::uint32_t flip = (x[1] | x[2] | x[3]) ? 1 : 0;
                           return x[other] ^ flip;
                       }));
        }
        return f;
    }

    // Odd n >= 7: lift the permutation on n-2 vertices, complementing it when
    // the two extra coordinates differ; the extra pair swaps itself,
    // complemented unless the first n-2 coordinates are all zero.
    const Fds g = kn_permutation_system(n - 2);
    for (int v = 1; v <= n - 2; ++v) {
        const std::vector<int> nbh = others(v);
        const LocalRule& grule = g.rule(v);
        f.set_rule(v, nbh, build_table(2, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                       std::uint64_t index = 0;
                       std::uint64_t place = 1;
                       for (int u : grule.neighbourhood) {
                           index += x[u] * place;
                           place *= 2;
                       }
                       return grule.table[index] ^ x[n - 1] ^ x[n];
                   }));
    }
    for (int v = n - 1; v <= n; ++v) {
        const std::vector<int> nbh = others(v);
        const int other = v == n - 1 ? n : n - 1;
        f.set_rule(v, nbh, build_table(2, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                       std::uint32_t flip = 0;
                       for (int u = 1; u <= n - 2; ++u)
                           flip |= x[u];
                       return x[other] ^ flip;
                   }));
    }
    return f;
}

Fds clique_loops_transposition(int n) {
    if (n < 1)
        throw input_error("clique loops transposition: n must be >= 1");
    Fds f(2, n);
    std::vector<int> all;
    for (int v = 1; v <= n; ++v)
        all.push_back(v);
    for (int v = 1; v <= n; ++v) {
        f.set_rule(v, all, build_table(2, n, all, [&](const std::vector<std::uint32_t>& x) {
                       bool all_equal = true;
                       for (int u = 2; u <= n; ++u)
                           if (x[u] != x[1])
                               all_equal = false;
                       return all_equal ? 1 - x[v] : x[v];
                   }));
    }
    return f;
}

namespace {

// Shortest cycle through v inside its strong component, as a vertex list
// starting at v.  The component is non-trivial, so one exists.
std::vector<int> shortest_cycle_through(const Digraph& d, const SccSummary& scc, int v) {
    if (d.has_arc(v, v))
        return {v};
    const int comp = scc.component_of[v];
    const int n = d.vertex_count();
    std::vector<int> dist(n + 1, -1);
    std::vector<int> parent(n + 1, 0);
    std::vector<int> queue{v};
    dist[v] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int w : d.out_neighbours(u)) {
            if (dist[w] >= 0 || scc.component_of[w] != comp)
                continue;
            dist[w] = dist[u] + 1;
            parent[w] = u;
            queue.push_back(w);
        }
    }
    int best = 0;
    for (int u : d.in_neighbours(v))
        if (u != v && scc.component_of[u] == comp && dist[u] > 0 &&
            (best == 0 || dist[u] < dist[best]))
            best = u;
    std::vector<int> cycle;
    for (int u = best; u != v; u = parent[u])
        cycle.push_back(u);
    cycle.push_back(v);
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
}

} // namespace

CompleteScheduleSystem complete_schedule_system(const Digraph& d, int m, std::uint64_t seed,
                                                int retry_budget) {
    if (m < 2 || m > 16)
        throw input_error("complete schedule system: m must be in 2..16, got " +
                          std::to_string(m));
    if (retry_budget < 1)
        throw input_error("complete schedule system: retry budget must be positive");

    const int n = d.vertex_count();
    const SccSummary scc = scc_summary(d);
    std::vector<char> on_cycle(n + 1, 0);
    for (const auto& component : scc.components)
        if (component.size() > 1 || d.has_arc(component[0], component[0]))
            for (int v : component)
                on_cycle[v] = 1;

    // Start from the maximum vertex-disjoint cycle family, then cover the
    // on-cycle vertices it misses with shortest cycles inside their strong
    // components; the extra cycles may overlap the others.
    std::vector<std::vector<int>> cycles = max_disjoint_cycle_family(d);
    std::vector<char> covered(n + 1, 0);
    for (const auto& cycle : cycles)
        for (int u : cycle)
            covered[u] = 1;
    for (int v = 1; v <= n; ++v) {
        if (!on_cycle[v] || covered[v])
            continue;
        std::vector<int> cycle = shortest_cycle_through(d, scc, v);
        for (int u : cycle)
            covered[u] = 1;
        cycles.push_back(std::move(cycle));
    }

    std::vector<int> rest;
    for (int v = 1; v <= n; ++v)
        if (!on_cycle[v])
            rest.push_back(v);

    const Gf2m field(m);
    const std::uint32_t field_size = field.size();
    const bool sentinel = !rest.empty();
    const std::uint32_t q = sentinel ? field_size + 1 : field_size;

    // Random nonzero weights on all arcs, resampled until every cycle's
    // induced submatrix is nonsingular.
    Rng rng(seed);
    std::vector<std::vector<std::uint32_t>> weight(n + 1, std::vector<std::uint32_t>(n + 1, 0));
    int attempts = 0;
    std::string failures;
    for (;;) {
        if (attempts == retry_budget)
            throw guard_error("complete schedule system: weight retry budget of " +
                              std::to_string(retry_budget) + " exhausted for seed " +
                              std::to_string(seed) + "; singular cycle submatrices:" + failures);
        ++attempts;
        for (int u = 1; u <= n; ++u)
            for (int v : d.out_neighbours(u))
                weight[u][v] = 1 + static_cast<std::uint32_t>(rng.below(field_size - 1));
        bool ok = true;
        for (std::size_t j = 0; j < cycles.size(); ++j) {
            std::vector<int> support = cycles[j];
            std::sort(support.begin(), support.end());
            const int k = static_cast<int>(support.size());
            std::vector<std::vector<std::uint32_t>> sub(k, std::vector<std::uint32_t>(k, 0));
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c)
                    if (d.has_arc(support[r], support[c]))
                        sub[r][c] = weight[support[r]][support[c]];
            if (gf2m_matrix_determinant(field, sub) == 0) {
                ok = false;
                failures += " cycle#" + std::to_string(j + 1);
                break;
            }
        }
        if (ok)
            break;
    }

    Fds f(q, n);
    for (int v = 1; v <= n; ++v) {
        const std::vector<int>& nbh = d.in_neighbours(v);
        if (!on_cycle[v]) {
            f.set_rule(v, nbh, build_table(q, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           for (int u : nbh)
                               if (x[u] >= field_size)
                                   return q - 1;
                           return std::uint32_t(0);
                       }));
        } else {
            f.set_rule(v, nbh, build_table(q, n, nbh, [&](const std::vector<std::uint32_t>& x) {
                           std::uint32_t sum = 0;
                           for (int u : nbh) {
                               if (x[u] >= field_size)
                                   return q - 1;
                               sum ^= field.mul(weight[u][v], x[u]);
                           }
                           return sum;
                       }));
        }
    }

    Schedule schedule;
    if (!rest.empty())
        schedule.blocks.push_back(rest);
    for (const auto& cycle : cycles) {
        std::vector<int> block = cycle;
        std::sort(block.begin(), block.end());
        schedule.blocks.push_back(std::move(block));
    }

    return CompleteScheduleSystem{std::move(f), std::move(schedule), q,    sentinel,
                                  std::move(cycles), rest, attempts};
}

const std::vector<std::vector<std::uint32_t>>& essential_two_input_tables() {
    static const std::vector<std::vector<std::uint32_t>> tables = [] {
        std::vector<std::vector<std::uint32_t>> result;
        for (std::uint32_t t = 0; t < 16; ++t) {
            const std::uint32_t b0 = t & 1, b1 = t >> 1 & 1, b2 = t >> 2 & 1, b3 = t >> 3 & 1;
            const bool first = b0 != b1 || b2 != b3;
            const bool second = b0 != b2 || b1 != b3;
            if (first && second)
                result.push_back({b0, b1, b2, b3});
        }
        return result;
    }();
    return tables;
}

DegreeTwoReport degree_two_obstruction_report(const Digraph& d) {
    const int n = d.vertex_count();
    if (n > 5)
        throw guard_error("degree-2 obstruction: exhaustive search limited to n <= 5, got n = " +
                          std::to_string(n));
    for (int v = 1; v <= n; ++v)
        if (d.in_neighbours(v).size() != 2)
            throw input_error("degree-2 obstruction: vertex " + std::to_string(v) +
                              " has in-degree " + std::to_string(d.in_neighbours(v).size()) +
                              ", need exactly 2");
    if (walk_packing_number(d, 1) != n)
        throw input_error("degree-2 obstruction: walk packing number at p = 1 is below n");

    const auto& tables = essential_two_input_tables();
    const int table_count = static_cast<int>(tables.size());
    std::uint64_t systems = 1;
    for (int v = 0; v < n; ++v)
        systems *= table_count;
    const std::uint32_t size = std::uint32_t(1) << n;

    // Bit positions of the two inputs of every vertex.
    std::vector<int> in1(n), in2(n);
    for (int v = 1; v <= n; ++v) {
        in1[v - 1] = d.in_neighbours(v)[0] - 1;
        in2[v - 1] = d.in_neighbours(v)[1] - 1;
    }

    std::vector<std::uint64_t> max_rank(n, 0);

#pragma omp parallel
    {
        std::vector<std::uint64_t> local_max(n, 0);
        std::vector<std::uint32_t> base(size), cur(size), next(size);
        std::vector<const std::uint32_t*> rule(n);
#ifdef _OPENMP
        const int threads = omp_get_num_threads();
        const int self = omp_get_thread_num();
#else
        const int threads = 1;
        const int self = 0;
#endif
        for (std::uint64_t combo = self; combo < systems;
             combo += static_cast<std::uint64_t>(threads)) {
            std::uint64_t c = combo;
            for (int v = 0; v < n; ++v) {
                rule[v] = tables[c % table_count].data();
                c /= table_count;
            }
            for (std::uint32_t x = 0; x < size; ++x) {
                std::uint32_t y = 0;
                for (int v = 0; v < n; ++v)
                    y |= rule[v][(x >> in1[v] & 1) + 2 * (x >> in2[v] & 1)] << v;
                base[x] = y;
            }
            cur = base;
            for (int p = 1; p <= n; ++p) {
                if (p > 1) {
                    for (std::uint32_t x = 0; x < size; ++x)
                        next[x] = base[cur[x]];
                    cur.swap(next);
                }
                std::uint64_t seen = 0;
                for (std::uint32_t x = 0; x < size; ++x)
                    seen |= std::uint64_t(1) << cur[x];
                local_max[p - 1] =
                    std::max(local_max[p - 1], static_cast<std::uint64_t>(std::popcount(seen)));
            }
        }
#pragma omp critical
        for (int p = 0; p < n; ++p)
            max_rank[p] = std::max(max_rank[p], local_max[p]);
    }

    DegreeTwoReport report;
    report.n = n;
    report.systems = systems;
    report.bound = std::uint64_t(1) << n;
    report.max_rank = std::move(max_rank);
    report.all_below_bound = true;
    for (std::uint64_t r : report.max_rank)
        if (r >= report.bound)
            report.all_below_bound = false;
    return report;
}

} // namespace fdsrank
