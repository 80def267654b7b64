#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fdsrank {

// Finite digraph on vertices 1..n.  Loops allowed, parallel arcs not.
// Adjacency lists are kept sorted ascending.
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int n);

    int vertex_count() const { return n_; }
    int arc_count() const { return arc_count_; }

    // Inserts arc (u, v).  Rejects labels outside 1..n and duplicate arcs.
    void add_arc(int u, int v);
    bool has_arc(int u, int v) const;

    const std::vector<int>& out_neighbours(int v) const;
    const std::vector<int>& in_neighbours(int v) const;

    // All arcs in lexicographic order.
    std::vector<std::pair<int, int>> arcs() const;

    bool operator==(const Digraph& other) const;

    // True when every arc of *this is an arc of other (vertex counts equal).
    bool is_subgraph_of(const Digraph& other) const;

    // Text format: header line "digraph <n>", one "u v" line per arc,
    // '#' starts a comment, blank lines ignored.
    static Digraph parse(std::istream& in);
    static Digraph parse_string(const std::string& text);
    void write(std::ostream& out) const;
    std::string to_string() const;

private:
    void check_vertex(int v) const;

    int n_ = 0;
    int arc_count_ = 0;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

// Union of in-neighbourhoods over S, sorted ascending.  S members need not be
// distinct; labels must lie in 1..n.
std::vector<int> in_neighbourhood(const Digraph& d, const std::vector<int>& s);

struct SccSummary {
    // Components sorted by smallest member, members ascending.
    std::vector<std::vector<int>> components;
    // component_of[v] indexes into components (entry 0 unused).
    std::vector<int> component_of;
    // Number of trivial components: single vertex without a loop.
    int trivial_count = 0;
};

SccSummary scc_summary(const Digraph& d);

// Convenience builders used by constructions and tests.
Digraph complete_digraph(int n);             // K_n, no loops
Digraph complete_digraph_with_loops(int n);  // K_n plus all loops
Digraph loops_only_digraph(int n);           // n disjoint loops

} // namespace fdsrank
