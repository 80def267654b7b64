#pragma once

#include <cstdint>

#include "fdsrank/digraph.hpp"
#include "fdsrank/fds.hpp"
#include "fdsrank/rng.hpp"

namespace fdsrank {

struct SamplingLimits {
    std::uint64_t state_limit = kDefaultStateLimit;
    int rejection_cap = 10000;
};

// Uniform over all systems whose interaction graph is contained in d: every
// table entry drawn independently and uniformly from [q].
Fds sample_contained(const Digraph& d, std::uint32_t q, std::uint64_t seed,
                     const SamplingLimits& limits = {});

// Uniform over systems with interaction graph exactly d, by rejection from
// sample_contained.  Throws guard_error with the attempt count when the
// rejection cap is hit.
Fds sample_exact(const Digraph& d, std::uint32_t q, std::uint64_t seed,
                 const SamplingLimits& limits = {});

struct RankEstimate {
    std::uint64_t trials = 0;
    double mean_scaled = 0.0;   // mean of log_q |Im f|
    double stderr_scaled = 0.0;
    double mean_rank = 0.0;     // mean of |Im f|
    double stderr_rank = 0.0;
};

struct PeriodicEstimate {
    std::uint64_t trials = 0;
    double mean_scaled = 0.0;   // mean of log_q |Per f|
    double stderr_scaled = 0.0;
    double mean_count = 0.0;    // mean of |Per f|
    double stderr_count = 0.0;
};

// Monte Carlo means over `trials` draws from sample_exact.  Trial i uses the
// stream seed derive_stream_seed(seed, i), so results are bit-identical no
// matter how trials are scheduled; trials run on an OpenMP pool and are
// aggregated in trial-index order.  Each draw is checked against the walk
// packing bound scaled_rank <= alpha_1 as a hard internal assertion.
RankEstimate estimate_average_scaled_rank(const Digraph& d, std::uint32_t q,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const SamplingLimits& limits = {});

PeriodicEstimate estimate_average_periodic_rank(const Digraph& d, std::uint32_t q,
                                                std::uint64_t trials, std::uint64_t seed,
                                                const SamplingLimits& limits = {});

// Random ordered partition of 1..n: a shuffle cut into consecutive blocks.
Schedule random_block_sequential_schedule(int n, Rng& rng);

// Block-sequential base with up to two extra random blocks spliced in; the
// result updates every vertex at least once.
Schedule random_complete_schedule(int n, Rng& rng);

} // namespace fdsrank
