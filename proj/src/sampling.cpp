#include "fdsrank/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fdsrank/errors.hpp"
#include "fdsrank/walks.hpp"

namespace fdsrank {

Fds sample_contained(const Digraph& d, std::uint32_t q, std::uint64_t seed,
                     const SamplingLimits& limits) {
    if (q < 2)
        throw input_error("sample: q must be >= 2, got " + std::to_string(q));
    Rng rng(seed);
    const int n = d.vertex_count();
    Fds f(q, n);
    for (int v = 1; v <= n; ++v) {
        const std::vector<int>& nbh = d.in_neighbours(v);
        const std::uint64_t size =
            state_space_size(q, static_cast<int>(nbh.size()), limits.state_limit);
        std::vector<std::uint32_t> table(size);
        for (std::uint32_t& entry : table)
            entry = static_cast<std::uint32_t>(rng.below(q));
        f.set_rule(v, nbh, std::move(table));
    }
    return f;
}

Fds sample_exact(const Digraph& d, std::uint32_t q, std::uint64_t seed,
                 const SamplingLimits& limits) {
    for (int attempt = 0; attempt < limits.rejection_cap; ++attempt) {
        Fds f = sample_contained(d, q, derive_stream_seed(seed, attempt), limits);
        if (interaction_graph(f) == d)
            return f;
    }
    throw guard_error("sample: no draw matched the interaction graph exactly in " +
                      std::to_string(limits.rejection_cap) + " rejection attempts");
}

namespace {

struct Moments {
    double mean = 0.0;
    double sem = 0.0;
};

Moments moments(const std::vector<double>& values) {
    const double count = static_cast<double>(values.size());
    Moments m;
    for (double v : values)
        m.mean += v;
    m.mean /= count;
    if (values.size() < 2)
        return m;
    double ss = 0.0;
    for (double v : values)
        ss += (v - m.mean) * (v - m.mean);
    m.sem = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    return m;
}

// Runs one sampled trial per index on the OpenMP pool, storing per-trial
// values; the first exception wins and is rethrown on the calling thread.
template <typename Trial>
void run_trials(std::uint64_t trials, const Trial& trial) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (trials > 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials); ++i) {
        try {
            trial(static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace

RankEstimate estimate_average_scaled_rank(const Digraph& d, std::uint32_t q,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const SamplingLimits& limits) {
    if (trials == 0)
        throw input_error("estimate: trials must be positive");
    state_space_size(q, d.vertex_count(), limits.state_limit);
    const double bound = walk_packing_number(d, 1);

    std::vector<double> scaled(trials), raw(trials);
    run_trials(trials, [&](std::uint64_t i) {
        const Fds f = sample_exact(d, q, derive_stream_seed(seed, i), limits);
        const TransitionMap t = materialize(f, limits.state_limit);
        const std::uint64_t r = rank_serial(t);
        const double s = scaled_rank(r, q);
        if (s > bound + 1e-9)
            throw std::logic_error("internal: sampled scaled rank " + std::to_string(s) +
                                   " exceeds the walk packing bound " + std::to_string(bound));
        scaled[i] = s;
        raw[i] = static_cast<double>(r);
    });

    const Moments ms = moments(scaled);
    const Moments mr = moments(raw);
    return RankEstimate{trials, ms.mean, ms.sem, mr.mean, mr.sem};
}

PeriodicEstimate estimate_average_periodic_rank(const Digraph& d, std::uint32_t q,
                                                std::uint64_t trials, std::uint64_t seed,
                                                const SamplingLimits& limits) {
    if (trials == 0)
        throw input_error("estimate: trials must be positive");
    state_space_size(q, d.vertex_count(), limits.state_limit);
    const double bound = walk_packing_number(d, 1);

    std::vector<double> scaled(trials), raw(trials);
    run_trials(trials, [&](std::uint64_t i) {
        const Fds f = sample_exact(d, q, derive_stream_seed(seed, i), limits);
        const TransitionMap t = materialize(f, limits.state_limit);
        const std::uint64_t count = periodic_points_serial(t).size();
        const double s = scaled_rank(count, q);
        if (s > bound + 1e-9)
            throw std::logic_error("internal: sampled scaled periodic count " +
                                   std::to_string(s) + " exceeds the walk packing bound " +
                                   std::to_string(bound));
        scaled[i] = s;
        raw[i] = static_cast<double>(count);
    });

    const Moments ms = moments(scaled);
    const Moments mr = moments(raw);
    return PeriodicEstimate{trials, ms.mean, ms.sem, mr.mean, mr.sem};
}

Schedule random_block_sequential_schedule(int n, Rng& rng) {
    if (n < 1)
        throw input_error("random schedule: n must be >= 1");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);

    Schedule s;
    std::vector<int> block;
    for (int i = 0; i < n; ++i) {
        block.push_back(perm[i]);
        if (i + 1 == n || rng.below(2) == 0) {
            std::sort(block.begin(), block.end());
            s.blocks.push_back(block);
            block.clear();
        }
    }
    return s;
}

Schedule random_complete_schedule(int n, Rng& rng) {
    Schedule s = random_block_sequential_schedule(n, rng);
    const int extras = static_cast<int>(rng.below(3));
    for (int e = 0; e < extras; ++e) {
        std::vector<int> block;
        for (int v = 1; v <= n; ++v)
            if (rng.below(2) == 0)
                block.push_back(v);
        if (block.empty())
            block.push_back(1 + static_cast<int>(rng.below(n)));
        const std::size_t pos = rng.below(s.blocks.size() + 1);
        s.blocks.insert(s.blocks.begin() + static_cast<std::ptrdiff_t>(pos), std::move(block));
    }
    return s;
}

} // namespace fdsrank
