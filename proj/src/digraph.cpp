#include "fdsrank/digraph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "fdsrank/errors.hpp"

namespace fdsrank {

Digraph::Digraph(int n) : n_(n) {
    if (n < 1)
        throw input_error("digraph: vertex count must be positive, got " + std::to_string(n));
    out_.resize(n_ + 1);
    in_.resize(n_ + 1);
}

void Digraph::check_vertex(int v) const {
    if (v < 1 || v > n_)
        throw input_error("digraph: vertex " + std::to_string(v) + " out of range 1.." +
                          std::to_string(n_));
}

void Digraph::add_arc(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    auto& row = out_[u];
    auto it = std::lower_bound(row.begin(), row.end(), v);
    if (it != row.end() && *it == v)
        throw input_error("digraph: duplicate arc (" + std::to_string(u) + ", " +
                          std::to_string(v) + ")");
    row.insert(it, v);
    auto& col = in_[v];
    col.insert(std::lower_bound(col.begin(), col.end(), u), u);
    ++arc_count_;
}

bool Digraph::has_arc(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    const auto& row = out_[u];
    return std::binary_search(row.begin(), row.end(), v);
}

const std::vector<int>& Digraph::out_neighbours(int v) const {
    check_vertex(v);
    return out_[v];
}

const std::vector<int>& Digraph::in_neighbours(int v) const {
    check_vertex(v);
    return in_[v];
}

std::vector<std::pair<int, int>> Digraph::arcs() const {
    std::vector<std::pair<int, int>> result;
    result.reserve(arc_count_);
    for (int u = 1; u <= n_; ++u)
        for (int v : out_[u])
            result.emplace_back(u, v);
    return result;
}

bool Digraph::operator==(const Digraph& other) const {
    return n_ == other.n_ && out_ == other.out_;
}

bool Digraph::is_subgraph_of(const Digraph& other) const {
    if (n_ != other.n_)
        return false;
    for (int u = 1; u <= n_; ++u)
        for (int v : out_[u])
            if (!other.has_arc(u, v))
                return false;
    return true;
}

namespace {

// Strips comments and surrounding whitespace; returns false for blank lines.
bool significant_line(std::string& line) {
    auto hash = line.find('#');
    if (hash != std::string::npos)
        line.erase(hash);
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return false;
    line.erase(0, begin);
    line.erase(line.find_last_not_of(" \t\r") + 1);
    return true;
}

} // namespace

Digraph Digraph::parse(std::istream& in) {
    std::string line;
    bool have_header = false;
    Digraph d;
    while (std::getline(in, line)) {
        if (!significant_line(line))
            continue;
        std::istringstream fields(line);
        if (!have_header) {
            std::string keyword;
            int n = 0;
            if (!(fields >> keyword >> n) || keyword != "digraph")
                throw input_error("digraph: expected header 'digraph <n>', got '" + line + "'");
            std::string rest;
            if (fields >> rest)
                throw input_error("digraph: trailing tokens in header '" + line + "'");
            d = Digraph(n);
            have_header = true;
            continue;
        }
        int u = 0, v = 0;
        if (!(fields >> u >> v))
            throw input_error("digraph: expected arc line 'u v', got '" + line + "'");
        std::string rest;
        if (fields >> rest)
            throw input_error("digraph: trailing tokens in arc line '" + line + "'");
        d.add_arc(u, v);
    }
    if (!have_header)
        throw input_error("digraph: missing header line 'digraph <n>'");
    return d;
}

Digraph Digraph::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

void Digraph::write(std::ostream& out) const {
    out << "digraph " << n_ << "\n";
    for (int u = 1; u <= n_; ++u)
        for (int v : out_[u])
            out << u << " " << v << "\n";
}

std::string Digraph::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

std::vector<int> in_neighbourhood(const Digraph& d, const std::vector<int>& s) {
    std::vector<int> result;
    for (int v : s)
        for (int u : d.in_neighbours(v))
            result.push_back(u);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

SccSummary scc_summary(const Digraph& d) {
    const int n = d.vertex_count();

    // Kosaraju: first pass records finish order, second pass walks the
    // reverse graph in decreasing finish order.  Both passes iterative.
    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n + 1, 0);
    std::vector<std::pair<int, std::size_t>> stack;
    for (int start = 1; start <= n; ++start) {
        if (seen[start])
            continue;
        seen[start] = 1;
        stack.emplace_back(start, 0);
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            const auto& next = d.out_neighbours(v);
            if (idx < next.size()) {
                int w = next[idx++];
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.emplace_back(w, 0);
                }
            } else {
                order.push_back(v);
                stack.pop_back();
            }
        }
    }

    std::vector<int> component(n + 1, -1);
    std::vector<std::vector<int>> groups;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (component[*it] >= 0)
            continue;
        int id = static_cast<int>(groups.size());
        groups.emplace_back();
        std::vector<int> dfs{*it};
        component[*it] = id;
        while (!dfs.empty()) {
            int v = dfs.back();
            dfs.pop_back();
            groups[id].push_back(v);
            for (int u : d.in_neighbours(v)) {
                if (component[u] < 0) {
                    component[u] = id;
                    dfs.push_back(u);
                }
            }
        }
    }

    for (auto& g : groups)
        std::sort(g.begin(), g.end());
    std::vector<int> by_min(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
        by_min[i] = static_cast<int>(i);
    std::sort(by_min.begin(), by_min.end(),
              [&](int a, int b) { return groups[a].front() < groups[b].front(); });

    SccSummary summary;
    summary.component_of.assign(n + 1, 0);
    std::vector<int> new_id(groups.size());
    for (std::size_t i = 0; i < by_min.size(); ++i) {
        new_id[by_min[i]] = static_cast<int>(i);
        summary.components.push_back(std::move(groups[by_min[i]]));
    }
    for (int v = 1; v <= n; ++v)
        summary.component_of[v] = new_id[component[v]];
    for (const auto& g : summary.components)
        if (g.size() == 1 && !d.has_arc(g[0], g[0]))
            ++summary.trivial_count;
    return summary;
}

Digraph complete_digraph(int n) {
    Digraph d(n);
    for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v)
            if (u != v)
                d.add_arc(u, v);
    return d;
}

Digraph complete_digraph_with_loops(int n) {
    Digraph d(n);
    for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v)
            d.add_arc(u, v);
    return d;
}

Digraph loops_only_digraph(int n) {
    Digraph d(n);
    for (int v = 1; v <= n; ++v)
        d.add_arc(v, v);
    return d;
}

} // namespace fdsrank
