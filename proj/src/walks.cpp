#include "fdsrank/walks.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <string>

#include "fdsrank/errors.hpp"

namespace fdsrank {

namespace {

// ---------------------------------------------------------------- max flow

struct FlowArc {
    int to;
    int rev;
    int cap;  // residual
    int orig; // capacity as added (0 identifies reverse arcs)
};

class FlowNetwork {
public:
    explicit FlowNetwork(int nodes) : adj_(nodes) {}

    void add_arc(int u, int v, int cap) {
        adj_[u].push_back({v, static_cast<int>(adj_[v].size()), cap, cap});
        adj_[v].push_back({u, static_cast<int>(adj_[u].size()) - 1, 0, 0});
    }

    int max_flow(int s, int t) {
        int total = 0;
        while (bfs(s, t)) {
            iter_.assign(adj_.size(), 0);
            while (int pushed = dfs(s, t, std::numeric_limits<int>::max()))
                total += pushed;
        }
        return total;
    }

    const std::vector<FlowArc>& arcs_from(int u) const { return adj_[u]; }

private:
    bool bfs(int s, int t) {
        level_.assign(adj_.size(), -1);
        std::vector<int> queue{s};
        level_[s] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int u = queue[head];
            for (const auto& a : adj_[u]) {
                if (a.cap > 0 && level_[a.to] < 0) {
                    level_[a.to] = level_[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    int dfs(int u, int t, int limit) {
        if (u == t)
            return limit;
        for (int& i = iter_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
            FlowArc& a = adj_[u][i];
            if (a.cap <= 0 || level_[a.to] != level_[u] + 1)
                continue;
            int pushed = dfs(a.to, t, std::min(limit, a.cap));
            if (pushed > 0) {
                a.cap -= pushed;
                adj_[a.to][a.rev].cap += pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::vector<std::vector<FlowArc>> adj_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

// Node ids of the layered graph: p+1 copies of V, each vertex split into an
// in-half and an out-half to enforce unit vertex capacity.
struct LayeredIds {
    int n = 0;
    int p = 0;
    int in(int v, int s) const { return 2 * (s * n + v - 1); }
    int out(int v, int s) const { return in(v, s) + 1; }
    int source() const { return 2 * n * (p + 1); }
    int sink() const { return source() + 1; }
    int nodes() const { return sink() + 1; }
};

FlowNetwork build_layered(const Digraph& d, int p, LayeredIds& ids) {
    const int n = d.vertex_count();
    ids = {n, p};
    FlowNetwork net(ids.nodes());
    for (int s = 0; s <= p; ++s)
        for (int v = 1; v <= n; ++v)
            net.add_arc(ids.in(v, s), ids.out(v, s), 1);
    for (int s = 1; s <= p; ++s)
        for (int u = 1; u <= n; ++u)
            for (int w : d.out_neighbours(u))
                net.add_arc(ids.out(u, s - 1), ids.in(w, s), 1);
    for (int v = 1; v <= n; ++v)
        net.add_arc(ids.source(), ids.in(v, 0), 1);
    for (int v = 1; v <= n; ++v)
        net.add_arc(ids.out(v, p), ids.sink(), 1);
    return net;
}

void require_positive_p(int p) {
    if (p < 1)
        throw input_error("walk packing: p must be >= 1, got " + std::to_string(p));
}

// ------------------------------------------------- brute-force enumeration

// Backtracking over families of vertex-disjoint cycles and paths.  At each
// step the smallest undecided vertex v either joins no structure, anchors a
// cycle, or anchors a path (v is then the smallest vertex of the structure,
// so every family is generated exactly once).  Paths grow backward from v
// along in-arcs, then forward along out-arcs; cycles grow forward until an
// arc closes back to v.
struct BruteSearcher {
    const Digraph& d;
    int p;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    int best = 0;
    std::vector<char> used;

    BruteSearcher(const Digraph& digraph, int period, std::uint64_t node_budget)
        : d(digraph), p(period), budget(node_budget), used(digraph.vertex_count() + 1, 0) {}

    void tick() {
        if (++nodes > budget)
            throw guard_error("walk packing brute force: node budget of " +
                              std::to_string(budget) + " exceeded");
    }

    void decide(int acc) {
        tick();
        int v = 0;
        for (int i = 1; i <= d.vertex_count(); ++i) {
            if (!used[i]) {
                v = i;
                break;
            }
        }
        if (v == 0) {
            best = std::max(best, acc);
            return;
        }
        used[v] = 1;
        decide(acc);
        extend_cycle(v, v, 1, acc);
        extend_backward(v, v, 1, acc);
        used[v] = 0;
    }

    void extend_cycle(int anchor, int cur, int len, int acc) {
        tick();
        if (d.has_arc(cur, anchor))
            decide(acc + len);
        for (int w : d.out_neighbours(cur)) {
            if (used[w])
                continue;
            used[w] = 1;
            extend_cycle(anchor, w, len + 1, acc);
            used[w] = 0;
        }
    }

    void extend_backward(int anchor, int tail, int len, int acc) {
        tick();
        extend_forward(anchor, len, acc);
        for (int w : d.in_neighbours(tail)) {
            if (used[w])
                continue;
            used[w] = 1;
            extend_backward(anchor, w, len + 1, acc);
            used[w] = 0;
        }
    }

    void extend_forward(int head, int len, int acc) {
        tick();
        if (len >= 2)
            decide(acc + std::max(len - p, 0));
        for (int w : d.out_neighbours(head)) {
            if (used[w])
                continue;
            used[w] = 1;
            extend_forward(w, len + 1, acc);
            used[w] = 0;
        }
    }
};

// --------------------------------------------- min-cost cycle assignment

struct CostArc {
    int to;
    int rev;
    int cap;
    int cost;
    int orig;
};

// Successive shortest augmenting paths; costs are 0/1 so plain label
// correcting is enough.
class MinCostFlow {
public:
    explicit MinCostFlow(int nodes) : adj_(nodes) {}

    void add_arc(int u, int v, int cap, int cost) {
        adj_[u].push_back({v, static_cast<int>(adj_[v].size()), cap, cost, cap});
        adj_[v].push_back({u, static_cast<int>(adj_[u].size()) - 1, 0, -cost, 0});
    }

    void run(int s, int t) {
        const int inf = std::numeric_limits<int>::max();
        for (;;) {
            std::vector<int> dist(adj_.size(), inf);
            std::vector<int> pre_node(adj_.size(), -1);
            std::vector<int> pre_arc(adj_.size(), -1);
            std::vector<char> queued(adj_.size(), 0);
            std::deque<int> queue{s};
            dist[s] = 0;
            queued[s] = 1;
            while (!queue.empty()) {
                int u = queue.front();
                queue.pop_front();
                queued[u] = 0;
                for (std::size_t i = 0; i < adj_[u].size(); ++i) {
                    const CostArc& a = adj_[u][i];
                    if (a.cap <= 0 || dist[u] + a.cost >= dist[a.to])
                        continue;
                    dist[a.to] = dist[u] + a.cost;
                    pre_node[a.to] = u;
                    pre_arc[a.to] = static_cast<int>(i);
                    if (!queued[a.to]) {
                        queued[a.to] = 1;
                        queue.push_back(a.to);
                    }
                }
            }
            if (dist[t] == inf)
                return;
            for (int v = t; v != s; v = pre_node[v]) {
                CostArc& a = adj_[pre_node[v]][pre_arc[v]];
                a.cap -= 1;
                adj_[v][a.rev].cap += 1;
            }
        }
    }

    const std::vector<CostArc>& arcs_from(int u) const { return adj_[u]; }

private:
    std::vector<std::vector<CostArc>> adj_;
};

} // namespace

void validate_walk_family(const Digraph& d, const WalkFamily& family) {
    if (family.p < 1)
        throw input_error("walk family: p must be >= 1");
    for (const auto& walk : family.walks) {
        if (static_cast<int>(walk.size()) != family.p + 1)
            throw input_error("walk family: walk has " + std::to_string(walk.size()) +
                              " vertices, expected " + std::to_string(family.p + 1));
        for (std::size_t s = 0; s + 1 < walk.size(); ++s)
            if (!d.has_arc(walk[s], walk[s + 1]))
                throw input_error("walk family: (" + std::to_string(walk[s]) + ", " +
                                  std::to_string(walk[s + 1]) + ") is not an arc");
    }
    std::vector<int> column(family.walks.size());
    for (int s = 0; s <= family.p; ++s) {
        for (std::size_t i = 0; i < family.walks.size(); ++i)
            column[i] = family.walks[i][s];
        std::sort(column.begin(), column.end());
        if (std::adjacent_find(column.begin(), column.end()) != column.end())
            throw input_error("walk family: two walks share a vertex at position " +
                              std::to_string(s));
    }
}

int walk_packing_number(const Digraph& d, int p) {
    require_positive_p(p);
    const int n = d.vertex_count();
    if (n == 0)
        return 0;
    LayeredIds ids;
    FlowNetwork net = build_layered(d, std::min(p, n), ids);
    return net.max_flow(ids.source(), ids.sink());
}

int walk_packing_bruteforce(const Digraph& d, int p, BruteForceOptions options) {
    require_positive_p(p);
    if (d.vertex_count() > options.max_n)
        throw guard_error("walk packing brute force: limited to n <= " +
                          std::to_string(options.max_n) + ", got n = " +
                          std::to_string(d.vertex_count()));
    BruteSearcher search(d, p, options.node_budget);
    search.decide(0);
    return search.best;
}

int walk_packing_edmonds(const Digraph& d) {
    const int n = d.vertex_count();
    if (n > 20)
        throw guard_error("walk packing: subset enumeration limited to n <= 20, got n = " +
                          std::to_string(n));
    if (n == 0)
        return 0;
    std::vector<std::uint32_t> in_mask(n + 1, 0);
    for (int v = 1; v <= n; ++v)
        for (int u : d.in_neighbours(v))
            in_mask[v] |= std::uint32_t(1) << (u - 1);
    const std::uint32_t size = std::uint32_t(1) << n;
    std::vector<std::uint32_t> nb(size, 0);
    int worst = 0;
    for (std::uint32_t s = 1; s < size; ++s) {
        int v = std::countr_zero(s) + 1;
        nb[s] = nb[s & (s - 1)] | in_mask[v];
        worst = std::max(worst, std::popcount(s) - std::popcount(nb[s]));
    }
    return n - worst;
}

std::vector<std::vector<int>> max_disjoint_cycle_family(const Digraph& d) {
    const int n = d.vertex_count();
    if (n == 0)
        return {};

    // Assignment formulation: every vertex picks one outgoing arc (cost 0) or
    // skips itself (cost 1).  A minimum-cost perfect assignment saturates the
    // in-side of every vertex too, so picked arcs have matching in/out degree
    // and decompose into vertex-disjoint cycles covering n - cost vertices,
    // the maximum possible.
    const int source = 2 * n;
    const int sink = 2 * n + 1;
    MinCostFlow mcf(2 * n + 2);
    for (int u = 1; u <= n; ++u)
        mcf.add_arc(source, u - 1, 1, 0);
    for (int v = 1; v <= n; ++v)
        mcf.add_arc(n + v - 1, sink, 1, 0);
    for (int u = 1; u <= n; ++u)
        for (int v : d.out_neighbours(u))
            mcf.add_arc(u - 1, n + v - 1, 1, 0);
    for (int u = 1; u <= n; ++u)
        mcf.add_arc(u - 1, n + u - 1, 1, 1);
    mcf.run(source, sink);

    std::vector<int> successor(n + 1, 0);
    for (int u = 1; u <= n; ++u)
        for (const CostArc& a : mcf.arcs_from(u - 1))
            if (a.orig == 1 && a.cap == 0 && a.cost == 0)
                successor[u] = a.to - n + 1;

    std::vector<std::vector<int>> cycles;
    std::vector<char> visited(n + 1, 0);
    for (int u = 1; u <= n; ++u) {
        if (successor[u] == 0 || visited[u])
            continue;
        std::vector<int> cycle;
        for (int v = u; !visited[v]; v = successor[v]) {
            visited[v] = 1;
            cycle.push_back(v);
        }
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

WalkFamily walk_certificate(const Digraph& d, int p) {
    require_positive_p(p);
    const int n = d.vertex_count();
    WalkFamily family;
    family.p = p;
    if (n == 0)
        return family;

    // An optimal family of vertex-disjoint cycles and paths maximizing
    // sum |C_i| + sum max(|P_j| - p, 0), found as a maximum-weight disjoint
    // cycle cover: real vertices weigh 1, and for every ordered pair (z, a) a
    // relay vertex of weight -p lets a path from a to z close into a cycle
    // whose weight is exactly the path's contribution.  Reading rotations off
    // the cycles and sliding windows off the paths yields the walks; every
    // vertex keeps a single predecessor across the whole family, which the
    // extremal constructions rely on.
    const int penalty = std::min(p, n);
    std::vector<std::pair<int, int>> relays;
    if (p < n)
        for (int z = 1; z <= n; ++z)
            for (int a = 1; a <= n; ++a)
                if (a != z)
                    relays.push_back({z, a});

    const int left = n + static_cast<int>(relays.size());
    const int source = 2 * left;
    const int sink = source + 1;
    MinCostFlow mcf(2 * left + 2);
    for (int x = 0; x < left; ++x) {
        mcf.add_arc(source, x, 1, 0);
        mcf.add_arc(left + x, sink, 1, 0);
    }
    for (int u = 1; u <= n; ++u)
        for (int v : d.out_neighbours(u))
            mcf.add_arc(u - 1, left + v - 1, 1, -1);
    for (std::size_t g = 0; g < relays.size(); ++g) {
        mcf.add_arc(relays[g].first - 1, left + n + static_cast<int>(g), 1, penalty);
        mcf.add_arc(n + static_cast<int>(g), left + relays[g].second - 1, 1, -1);
    }
    for (int x = 0; x < left; ++x)
        mcf.add_arc(x, left + x, 1, 0);
    mcf.run(source, sink);

    std::vector<int> successor(n + 1, 0);
    std::vector<char> path_end(n + 1, 0), path_start(n + 1, 0);
    for (int u = 1; u <= n; ++u)
        for (const CostArc& arc : mcf.arcs_from(u - 1))
            if (arc.orig == 1 && arc.cap == 0) {
                if (arc.cost == -1)
                    successor[u] = arc.to - left + 1;
                else if (arc.cost == penalty)
                    path_end[u] = 1;
            }
    for (std::size_t g = 0; g < relays.size(); ++g)
        for (const CostArc& arc : mcf.arcs_from(n + static_cast<int>(g)))
            if (arc.orig == 1 && arc.cap == 0 && arc.cost == -1)
                path_start[relays[g].second] = 1;

    std::vector<char> visited(n + 1, 0);
    std::vector<std::vector<int>> cycles, paths;
    for (int a = 1; a <= n; ++a) {
        if (!path_start[a])
            continue;
        std::vector<int> path;
        for (int v = a; v != 0; v = successor[v]) {
            visited[v] = 1;
            path.push_back(v);
        }
        paths.push_back(std::move(path));
    }
    for (int u = 1; u <= n; ++u) {
        if (successor[u] == 0 || visited[u])
            continue;
        std::vector<int> cycle;
        for (int v = u; !visited[v]; v = successor[v]) {
            visited[v] = 1;
            cycle.push_back(v);
        }
        cycles.push_back(std::move(cycle));
    }

    for (const auto& cycle : cycles) {
        const int l = static_cast<int>(cycle.size());
        for (int a = 0; a < l; ++a) {
            std::vector<int> walk(p + 1);
            for (int s = 0; s <= p; ++s)
                walk[s] = cycle[(a + s) % l];
            family.walks.push_back(std::move(walk));
        }
    }
    for (const auto& path : paths) {
        const int m = static_cast<int>(path.size());
        for (int b = 0; b + p < m; ++b)
            family.walks.emplace_back(path.begin() + b, path.begin() + b + p + 1);
    }
    validate_walk_family(d, family);
    return family;
}

bool has_cycle_cover(const Digraph& d) {
    const int n = d.vertex_count();
    if (n == 0)
        return true;
    return walk_packing_number(d, n) == n;
}

} // namespace fdsrank
