#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdsrank/digraph.hpp"

namespace fdsrank {

// A state of n q-ary cells packed little-endian in mixed radix: vertex 1 is
// the least significant digit.  All formats and tables use this encoding.
using State = std::uint64_t;

// Default ceiling on q^n for materialized maps; override per call (the CLI
// wires FDSRANK_STATE_LIMIT through to it).
constexpr std::uint64_t kDefaultStateLimit = std::uint64_t(1) << 22;

// q^n, or guard_error when it exceeds `limit`.
std::uint64_t state_space_size(std::uint32_t q, int n, std::uint64_t limit);

std::uint32_t state_digit(State x, int v, std::uint32_t q);
State pack_state(const std::vector<std::uint32_t>& digits, std::uint32_t q);
std::vector<std::uint32_t> unpack_state(State x, int n, std::uint32_t q);

// Local rule of one vertex: the ascending list of vertices it reads and a
// value table indexed by the mixed-radix encoding of the read values (first
// listed neighbour least significant).
struct LocalRule {
    std::vector<int> neighbourhood;
    std::vector<std::uint32_t> table;
};

// Finite dynamical system f : [q]^n -> [q]^n as n local rules.  Rules default
// to the constant 0 with empty neighbourhood until set.
class Fds {
public:
    Fds(std::uint32_t q, int n);

    std::uint32_t q() const { return q_; }
    int n() const { return n_; }

    void set_rule(int v, std::vector<int> neighbourhood, std::vector<std::uint32_t> table);
    const LocalRule& rule(int v) const;

    // Text format: line "fds <q> <n>", then per vertex v the two lines
    // "nbr v: u1 ... uk" and "tab v: t0 t1 ... t_{q^k-1}".
    static Fds parse(std::istream& in);
    static Fds parse_string(const std::string& text);
    void write(std::ostream& out) const;
    std::string to_string() const;

private:
    std::uint32_t q_;
    int n_;
    std::vector<LocalRule> rules_;
};

// Fully materialized transition map: next[x] = image of state x.
struct TransitionMap {
    std::uint32_t q = 2;
    int n = 0;
    std::vector<State> next;

    std::uint64_t size() const { return next.size(); }
    State operator()(State x) const { return next[x]; }
    bool operator==(const TransitionMap& other) const = default;
};

State evaluate(const Fds& f, State x);
TransitionMap materialize(const Fds& f, std::uint64_t state_limit = kDefaultStateLimit);

// outer after inner: result(x) = outer(inner(x)).  The unsuffixed kernels run
// OpenMP-parallel; the _serial twins are the reference implementations.
TransitionMap compose(const TransitionMap& outer, const TransitionMap& inner);
TransitionMap compose_serial(const TransitionMap& outer, const TransitionMap& inner);

// Map of the p-th iterate, p >= 1, by binary powering.
TransitionMap iterate(const TransitionMap& t, std::uint64_t p);

// Number of distinct images.
std::uint64_t rank(const TransitionMap& t);
std::uint64_t rank_serial(const TransitionMap& t);

// log_q of rank_value; exact integer double when rank_value is a power of q.
double scaled_rank(std::uint64_t rank_value, std::uint32_t q);
// True and sets exponent iff value == q^exponent.
bool exact_log(std::uint64_t value, std::uint32_t q, int& exponent);

// States on cycles of the functional graph, computed by image stabilization:
// S <- t(S) from S = all states until the size stops shrinking.  Sorted.
std::vector<State> periodic_points(const TransitionMap& t);
std::vector<State> periodic_points_serial(const TransitionMap& t);
std::uint64_t periodic_count(const TransitionMap& t);

bool is_permutation(const TransitionMap& t);

// Arc (u,v) iff f_v depends essentially on u.  The Fds overload only tests
// declared neighbours (sound: the table cannot read anything else); the map
// overload scans the whole state space.
Digraph interaction_graph(const Fds& f);
Digraph interaction_graph(const TransitionMap& t);

enum class Membership { exact, contained, neither };
const char* to_string(Membership m);

// exact: interaction graph equals d; contained: proper subgraph; else neither.
Membership membership(const Fds& f, const Digraph& d);

// Updates exactly the coordinates in block, all reading the same input state.
State apply_block(const Fds& f, const std::vector<int>& block, State x);

// Update schedule: ordered nonempty blocks, applied first to last.
struct Schedule {
    std::vector<std::vector<int>> blocks;

    // Text format: one line per block, vertex labels space-separated, '#'
    // comments and blank lines skipped.  Duplicate labels in a block and
    // files with no blocks are rejected, so no empty block can be written.
    static Schedule parse(std::istream& in);
    static Schedule parse_string(const std::string& text);
    void write(std::ostream& out) const;
    std::string to_string() const;

    void validate(int n) const;
};

TransitionMap apply_schedule(const Fds& f, const Schedule& schedule,
                             std::uint64_t state_limit = kDefaultStateLimit);

struct ScheduleFlags {
    bool complete = false;
    bool block_sequential = false;
    bool parallel = false;
};

// complete: every vertex updated at least once; block_sequential: exactly
// once; parallel: the single block (V).
ScheduleFlags classify_schedule(const Schedule& schedule, int n);

} // namespace fdsrank
