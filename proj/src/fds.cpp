#include "fdsrank/fds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fdsrank/errors.hpp"

namespace fdsrank {

std::uint64_t state_space_size(std::uint32_t q, int n, std::uint64_t limit) {
    if (q < 2)
        throw input_error("state space: alphabet size must be >= 2, got " + std::to_string(q));
    if (n < 0)
        throw input_error("state space: cell count must be non-negative, got " +
                          std::to_string(n));
    std::uint64_t size = 1;
    for (int i = 0; i < n; ++i) {
        if (size > limit / q)
            throw guard_error("state space: " + std::to_string(q) + "^" + std::to_string(n) +
                              " exceeds the limit of " + std::to_string(limit) + " states");
        size *= q;
    }
    return size;
}

std::uint32_t state_digit(State x, int v, std::uint32_t q) {
    for (int i = 1; i < v; ++i)
        x /= q;
    return static_cast<std::uint32_t>(x % q);
}

State pack_state(const std::vector<std::uint32_t>& digits, std::uint32_t q) {
    State x = 0;
    for (std::size_t i = digits.size(); i > 0; --i)
        x = x * q + digits[i - 1];
    return x;
}

std::vector<std::uint32_t> unpack_state(State x, int n, std::uint32_t q) {
    std::vector<std::uint32_t> digits(n);
    for (int v = 0; v < n; ++v) {
        digits[v] = static_cast<std::uint32_t>(x % q);
        x /= q;
    }
    return digits;
}

// ------------------------------------------------------------------- Fds

Fds::Fds(std::uint32_t q, int n) : q_(q), n_(n) {
    if (q < 2)
        throw input_error("fds: alphabet size must be >= 2, got " + std::to_string(q));
    if (n < 1)
        throw input_error("fds: vertex count must be positive, got " + std::to_string(n));
    rules_.assign(n_ + 1, LocalRule{{}, {0}});
}

void Fds::set_rule(int v, std::vector<int> neighbourhood, std::vector<std::uint32_t> table) {
    if (v < 1 || v > n_)
        throw input_error("fds: vertex " + std::to_string(v) + " out of range 1.." +
                          std::to_string(n_));
    for (std::size_t i = 0; i < neighbourhood.size(); ++i) {
        int u = neighbourhood[i];
        if (u < 1 || u > n_)
            throw input_error("fds: neighbour " + std::to_string(u) + " of vertex " +
                              std::to_string(v) + " out of range");
        if (i > 0 && neighbourhood[i - 1] >= u)
            throw input_error("fds: neighbourhood of vertex " + std::to_string(v) +
                              " must be strictly ascending");
    }
    std::uint64_t expected = 1;
    for (std::size_t i = 0; i < neighbourhood.size(); ++i) {
        if (expected > std::numeric_limits<std::uint64_t>::max() / q_)
            throw input_error("fds: table of vertex " + std::to_string(v) + " would overflow");
        expected *= q_;
    }
    if (table.size() != expected)
        throw input_error("fds: table of vertex " + std::to_string(v) + " has " +
                          std::to_string(table.size()) + " entries, expected " +
                          std::to_string(expected));
    for (std::uint32_t value : table)
        if (value >= q_)
            throw input_error("fds: table entry " + std::to_string(value) + " of vertex " +
                              std::to_string(v) + " not in [0, " + std::to_string(q_) + ")");
    rules_[v] = LocalRule{std::move(neighbourhood), std::move(table)};
}

const LocalRule& Fds::rule(int v) const {
    if (v < 1 || v > n_)
        throw input_error("fds: vertex " + std::to_string(v) + " out of range 1.." +
                          std::to_string(n_));
    return rules_[v];
}

namespace {

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

bool next_significant_line(std::istream& in, std::string& line) {
    while (std::getline(in, line))
        if (significant_line(line))
            return true;
    return false;
}

// Value of a state restricted to the listed vertices, little-endian in list
// order.  digits is 1-based.
inline std::uint64_t restricted_index(const std::vector<std::uint32_t>& digits,
                                      const std::vector<int>& vertices, std::uint32_t q) {
    std::uint64_t index = 0;
    std::uint64_t place = 1;
    for (int u : vertices) {
        index += digits[u] * place;
        place *= q;
    }
    return index;
}

inline State eval_digits(const Fds& f, const std::vector<std::uint32_t>& digits) {
    const std::uint32_t q = f.q();
    State y = 0;
    std::uint64_t place = 1;
    for (int v = 1; v <= f.n(); ++v, place *= q) {
        const LocalRule& rule = f.rule(v);
        y += rule.table[restricted_index(digits, rule.neighbourhood, q)] * place;
    }
    return y;
}

// Advances a 1-based little-endian digit vector to the next state.
inline void odometer_step(std::vector<std::uint32_t>& digits, std::uint32_t q) {
    for (std::size_t v = 1; v < digits.size(); ++v) {
        if (++digits[v] < q)
            return;
        digits[v] = 0;
    }
}

std::uint64_t checked_size(const Fds& f, std::uint64_t state_limit) {
    return state_space_size(f.q(), f.n(), state_limit);
}

} // namespace

Fds Fds::parse(std::istream& in) {
    auto tokens_of = [](std::string line) {
        std::replace(line.begin(), line.end(), ':', ' ');
        return std::istringstream(line);
    };

    std::string line;
    if (!next_significant_line(in, line))
        throw input_error("fds: missing header line 'fds <q> <n>'");
    auto header = tokens_of(line);
    std::string keyword;
    long long q = 0, n = 0;
    if (!(header >> keyword >> q >> n) || keyword != "fds")
        throw input_error("fds: expected header 'fds <q> <n>', got '" + line + "'");
    std::string rest;
    if (header >> rest)
        throw input_error("fds: trailing tokens in header '" + line + "'");
    if (q < 2 || n < 1)
        throw input_error("fds: invalid header values q=" + std::to_string(q) +
                          " n=" + std::to_string(n));

    Fds f(static_cast<std::uint32_t>(q), static_cast<int>(n));
    for (int v = 1; v <= f.n(); ++v) {
        if (!next_significant_line(in, line))
            throw input_error("fds: missing 'nbr " + std::to_string(v) + ":' line");
        auto nbr = tokens_of(line);
        int label = 0;
        if (!(nbr >> keyword >> label) || keyword != "nbr" || label != v)
            throw input_error("fds: expected 'nbr " + std::to_string(v) + ": ...', got '" +
                              line + "'");
        std::vector<int> neighbourhood;
        int u = 0;
        while (nbr >> u)
            neighbourhood.push_back(u);
        if (!nbr.eof())
            throw input_error("fds: bad neighbour list '" + line + "'");

        if (!next_significant_line(in, line))
            throw input_error("fds: missing 'tab " + std::to_string(v) + ":' line");
        auto tab = tokens_of(line);
        if (!(tab >> keyword >> label) || keyword != "tab" || label != v)
            throw input_error("fds: expected 'tab " + std::to_string(v) + ": ...', got '" +
                              line + "'");
        std::vector<std::uint32_t> table;
        long long value = 0;
        while (tab >> value) {
            if (value < 0)
                throw input_error("fds: negative table entry in '" + line + "'");
            table.push_back(static_cast<std::uint32_t>(value));
        }
        if (!tab.eof())
            throw input_error("fds: bad table line '" + line + "'");
        f.set_rule(v, std::move(neighbourhood), std::move(table));
    }
    if (next_significant_line(in, line))
        throw input_error("fds: trailing content '" + line + "'");
    return f;
}

Fds Fds::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

void Fds::write(std::ostream& out) const {
    out << "fds " << q_ << " " << n_ << "\n";
    for (int v = 1; v <= n_; ++v) {
        const LocalRule& rule = rules_[v];
        out << "nbr " << v << ":";
        for (int u : rule.neighbourhood)
            out << " " << u;
        out << "\n";
        out << "tab " << v << ":";
        for (std::uint32_t value : rule.table)
            out << " " << value;
        out << "\n";
    }
}

std::string Fds::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

// ------------------------------------------------------------ map kernels

State evaluate(const Fds& f, State x) {
    std::uint64_t size = 1;
    bool bounded = true;
    for (int i = 0; i < f.n() && bounded; ++i) {
        if (size > std::numeric_limits<std::uint64_t>::max() / f.q())
            bounded = false;
        else
            size *= f.q();
    }
    if (bounded && x >= size)
        throw input_error("evaluate: state " + std::to_string(x) + " out of range");
    std::vector<std::uint32_t> digits(f.n() + 1, 0);
    State rest = x;
    for (int v = 1; v <= f.n(); ++v) {
        digits[v] = static_cast<std::uint32_t>(rest % f.q());
        rest /= f.q();
    }
    return eval_digits(f, digits);
}

TransitionMap materialize(const Fds& f, std::uint64_t state_limit) {
    const std::uint64_t size = checked_size(f, state_limit);
    TransitionMap t{f.q(), f.n(), std::vector<State>(size)};
    std::vector<std::uint32_t> digits(f.n() + 1, 0);
    for (std::uint64_t x = 0; x < size; ++x) {
        t.next[x] = eval_digits(f, digits);
        odometer_step(digits, f.q());
    }
    return t;
}

namespace {

void check_composable(const TransitionMap& outer, const TransitionMap& inner) {
    if (outer.q != inner.q || outer.n != inner.n || outer.size() != inner.size())
        throw input_error("compose: transition maps live on different state spaces");
}

} // namespace

TransitionMap compose_serial(const TransitionMap& outer, const TransitionMap& inner) {
    check_composable(outer, inner);
    TransitionMap t{outer.q, outer.n, std::vector<State>(outer.size())};
    for (std::uint64_t x = 0; x < outer.size(); ++x)
        t.next[x] = outer.next[inner.next[x]];
    return t;
}

TransitionMap compose(const TransitionMap& outer, const TransitionMap& inner) {
    check_composable(outer, inner);
    const std::int64_t size = static_cast<std::int64_t>(outer.size());
    TransitionMap t{outer.q, outer.n, std::vector<State>(outer.size())};
#pragma omp parallel for schedule(static) if (size >= 4096)
    for (std::int64_t x = 0; x < size; ++x)
        t.next[x] = outer.next[inner.next[x]];
    return t;
}

TransitionMap iterate(const TransitionMap& t, std::uint64_t p) {
    if (p < 1)
        throw input_error("iterate: p must be >= 1, got " + std::to_string(p));
    TransitionMap base = t;
    TransitionMap result;
    bool have_result = false;
    for (;;) {
        if (p & 1) {
            result = have_result ? compose(result, base) : base;
            have_result = true;
        }
        p >>= 1;
        if (p == 0)
            break;
        base = compose(base, base);
    }
    return result;
}

namespace {

std::uint64_t bitmap_words(std::uint64_t size) { return (size + 63) / 64; }

// Bitmap of all values taken by t, built in parallel; the resulting bits do
// not depend on scheduling.
std::vector<std::uint64_t> image_bitmap(const TransitionMap& t) {
    std::vector<std::uint64_t> seen(bitmap_words(t.size()), 0);
    const std::int64_t size = static_cast<std::int64_t>(t.size());
#pragma omp parallel for schedule(static) if (size >= 4096)
    for (std::int64_t x = 0; x < size; ++x) {
        const State y = t.next[x];
        const std::uint64_t mask = std::uint64_t(1) << (y & 63);
#pragma omp atomic update
        seen[y >> 6] |= mask;
    }
    return seen;
}

std::uint64_t popcount_sum(const std::vector<std::uint64_t>& words) {
    std::uint64_t total = 0;
    for (std::uint64_t w : words)
        total += std::popcount(w);
    return total;
}

} // namespace

std::uint64_t rank(const TransitionMap& t) { return popcount_sum(image_bitmap(t)); }

std::uint64_t rank_serial(const TransitionMap& t) {
    std::vector<std::uint64_t> seen(bitmap_words(t.size()), 0);
    for (std::uint64_t x = 0; x < t.size(); ++x) {
        const State y = t.next[x];
        seen[y >> 6] |= std::uint64_t(1) << (y & 63);
    }
    return popcount_sum(seen);
}

bool exact_log(std::uint64_t value, std::uint32_t q, int& exponent) {
    if (q < 2 || value == 0)
        return false;
    std::uint64_t power = 1;
    int k = 0;
    while (power < value) {
        if (power > std::numeric_limits<std::uint64_t>::max() / q)
            return false;
        power *= q;
        ++k;
    }
    if (power != value)
        return false;
    exponent = k;
    return true;
}

double scaled_rank(std::uint64_t rank_value, std::uint32_t q) {
    if (q < 2)
        throw input_error("scaled rank: alphabet size must be >= 2");
    if (rank_value == 0)
        throw input_error("scaled rank: rank must be positive");
    int exponent = 0;
    if (exact_log(rank_value, q, exponent))
        return static_cast<double>(exponent);
    return std::log(static_cast<double>(rank_value)) / std::log(static_cast<double>(q));
}

namespace {

// S <- t(S) from S = everything until |S| stops shrinking; the fixpoint is
// exactly the set of periodic states.
std::pair<std::vector<std::uint64_t>, std::uint64_t>
stable_image_bitmap(const TransitionMap& t, bool parallel) {
    const std::uint64_t size = t.size();
    const std::uint64_t words = bitmap_words(size);
    std::vector<std::uint64_t> current(words, ~std::uint64_t(0));
    if (size % 64 != 0)
        current[words - 1] = (std::uint64_t(1) << (size % 64)) - 1;
    std::uint64_t count = size;
    const std::int64_t isize = static_cast<std::int64_t>(size);
    for (;;) {
        std::vector<std::uint64_t> image(words, 0);
        if (parallel) {
#pragma omp parallel for schedule(static) if (isize >= 4096)
            for (std::int64_t x = 0; x < isize; ++x) {
                if (!(current[x >> 6] >> (x & 63) & 1))
                    continue;
                const State y = t.next[x];
                const std::uint64_t mask = std::uint64_t(1) << (y & 63);
#pragma omp atomic update
                image[y >> 6] |= mask;
            }
        } else {
            for (std::uint64_t x = 0; x < size; ++x) {
                if (!(current[x >> 6] >> (x & 63) & 1))
                    continue;
                const State y = t.next[x];
                image[y >> 6] |= std::uint64_t(1) << (y & 63);
            }
        }
        const std::uint64_t next_count = popcount_sum(image);
        current.swap(image);
        if (next_count == count)
            return {std::move(current), count};
        count = next_count;
    }
}

std::vector<State> bitmap_to_states(const std::vector<std::uint64_t>& bitmap, std::uint64_t size) {
    std::vector<State> states;
    for (std::uint64_t x = 0; x < size; ++x)
        if (bitmap[x >> 6] >> (x & 63) & 1)
            states.push_back(x);
    return states;
}

} // namespace

std::vector<State> periodic_points(const TransitionMap& t) {
    auto [bitmap, count] = stable_image_bitmap(t, true);
    (void)count;
    return bitmap_to_states(bitmap, t.size());
}

std::vector<State> periodic_points_serial(const TransitionMap& t) {
    auto [bitmap, count] = stable_image_bitmap(t, false);
    (void)count;
    return bitmap_to_states(bitmap, t.size());
}

std::uint64_t periodic_count(const TransitionMap& t) {
    return stable_image_bitmap(t, true).second;
}

bool is_permutation(const TransitionMap& t) { return rank(t) == t.size(); }

// ------------------------------------------------------ interaction graphs

Digraph interaction_graph(const Fds& f) {
    Digraph ig(f.n());
    for (int v = 1; v <= f.n(); ++v) {
        const LocalRule& rule = f.rule(v);
        const std::uint64_t table_size = rule.table.size();
        std::uint64_t place = 1;
        for (std::size_t j = 0; j < rule.neighbourhood.size(); ++j, place *= f.q()) {
            bool essential = false;
            for (std::uint64_t index = 0; index < table_size && !essential; ++index) {
                if (index / place % f.q() != 0)
                    continue;
                const std::uint32_t base = rule.table[index];
                for (std::uint32_t c = 1; c < f.q(); ++c) {
                    if (rule.table[index + c * place] != base) {
                        essential = true;
                        break;
                    }
                }
            }
            if (essential)
                ig.add_arc(rule.neighbourhood[j], v);
        }
    }
    return ig;
}

Digraph interaction_graph(const TransitionMap& t) {
    Digraph ig(t.n);
    std::uint64_t place_u = 1;
    for (int u = 1; u <= t.n; ++u, place_u *= t.q) {
        std::uint64_t place_v = 1;
        for (int v = 1; v <= t.n; ++v, place_v *= t.q) {
            bool essential = false;
            for (std::uint64_t x = 0; x < t.size() && !essential; ++x) {
                if (x / place_u % t.q != 0)
                    continue;
                const std::uint32_t base =
                    static_cast<std::uint32_t>(t.next[x] / place_v % t.q);
                for (std::uint32_t c = 1; c < t.q; ++c) {
                    if (t.next[x + c * place_u] / place_v % t.q != base) {
                        essential = true;
                        break;
                    }
                }
            }
            if (essential)
                ig.add_arc(u, v);
        }
    }
    return ig;
}

const char* to_string(Membership m) {
    switch (m) {
    case Membership::exact:
        return "exact";
    case Membership::contained:
        return "contained";
    default:
        return "neither";
    }
}

Membership membership(const Fds& f, const Digraph& d) {
    if (d.vertex_count() != f.n())
        throw input_error("membership: digraph has " + std::to_string(d.vertex_count()) +
                          " vertices, system has " + std::to_string(f.n()));
    Digraph ig = interaction_graph(f);
    if (ig == d)
        return Membership::exact;
    if (ig.is_subgraph_of(d))
        return Membership::contained;
    return Membership::neither;
}

// --------------------------------------------------------------- schedules

State apply_block(const Fds& f, const std::vector<int>& block, State x) {
    std::vector<std::uint32_t> digits = unpack_state(x, f.n(), f.q());
    digits.insert(digits.begin(), 0); // 1-based
    std::vector<std::uint32_t> updated = digits;
    for (int v : block) {
        if (v < 1 || v > f.n())
            throw input_error("apply block: vertex " + std::to_string(v) + " out of range 1.." +
                              std::to_string(f.n()));
        const LocalRule& rule = f.rule(v);
        updated[v] = rule.table[restricted_index(digits, rule.neighbourhood, f.q())];
    }
    updated.erase(updated.begin());
    return pack_state(updated, f.q());
}

Schedule Schedule::parse(std::istream& in) {
    Schedule schedule;
    std::string line;
    while (std::getline(in, line)) {
        if (!significant_line(line))
            continue;
        std::istringstream fields(line);
        std::vector<int> block;
        int v = 0;
        while (fields >> v)
            block.push_back(v);
        if (!fields.eof())
            throw input_error("schedule: bad block line '" + line + "'");
        std::sort(block.begin(), block.end());
        if (std::adjacent_find(block.begin(), block.end()) != block.end())
            throw input_error("schedule: duplicate vertex in block '" + line + "'");
        schedule.blocks.push_back(std::move(block));
    }
    if (schedule.blocks.empty())
        throw input_error("schedule: no blocks");
    return schedule;
}

Schedule Schedule::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

void Schedule::write(std::ostream& out) const {
    for (const auto& block : blocks) {
        for (std::size_t i = 0; i < block.size(); ++i)
            out << (i ? " " : "") << block[i];
        out << "\n";
    }
}

std::string Schedule::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

void Schedule::validate(int n) const {
    if (blocks.empty())
        throw input_error("schedule: no blocks");
    for (const auto& block : blocks) {
        if (block.empty())
            throw input_error("schedule: empty block");
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (block[i] < 1 || block[i] > n)
                throw input_error("schedule: vertex " + std::to_string(block[i]) +
                                  " out of range 1.." + std::to_string(n));
            if (i > 0 && block[i - 1] == block[i])
                throw input_error("schedule: duplicate vertex " + std::to_string(block[i]) +
                                  " in block");
        }
    }
}

TransitionMap apply_schedule(const Fds& f, const Schedule& schedule, std::uint64_t state_limit) {
    schedule.validate(f.n());
    const std::uint64_t size = checked_size(f, state_limit);
    TransitionMap t{f.q(), f.n(), std::vector<State>(size)};
    std::vector<std::uint32_t> odometer(f.n() + 1, 0);
    std::vector<std::uint32_t> digits(f.n() + 1, 0);
    std::vector<std::uint32_t> updated(f.n() + 1, 0);
    for (std::uint64_t x = 0; x < size; ++x) {
        digits = odometer;
        for (const auto& block : schedule.blocks) {
            updated = digits;
            for (int v : block) {
                const LocalRule& rule = f.rule(v);
                updated[v] = rule.table[restricted_index(digits, rule.neighbourhood, f.q())];
            }
            digits.swap(updated);
        }
        State y = 0;
        for (int v = f.n(); v >= 1; --v)
            y = y * f.q() + digits[v];
        t.next[x] = y;
        odometer_step(odometer, f.q());
    }
    return t;
}

ScheduleFlags classify_schedule(const Schedule& schedule, int n) {
    schedule.validate(n);
    std::vector<int> times(n + 1, 0);
    std::size_t total = 0;
    for (const auto& block : schedule.blocks) {
        total += block.size();
        for (int v : block)
            ++times[v];
    }
    ScheduleFlags flags;
    flags.complete = true;
    for (int v = 1; v <= n; ++v)
        if (times[v] == 0)
            flags.complete = false;
    flags.block_sequential = flags.complete && total == static_cast<std::size_t>(n);
    flags.parallel = schedule.blocks.size() == 1 &&
                     schedule.blocks[0].size() == static_cast<std::size_t>(n);
    return flags;
}

} // namespace fdsrank
