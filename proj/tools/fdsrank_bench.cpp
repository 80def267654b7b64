#include <chrono>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fdsrank/fds.hpp"
#include "fdsrank/rng.hpp"

using namespace fdsrank;

namespace {

template <typename Fn> double best_seconds(int reps, const Fn& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
        best = std::min(best, s);
    }
    return best;
}

void report(const std::string& kernel, double serial, double parallel) {
    std::cout << std::left << std::setw(10) << kernel << std::right << std::fixed
              << std::setprecision(4) << std::setw(10) << serial << "s" << std::setw(10)
              << parallel << "s" << std::setprecision(2) << std::setw(9) << serial / parallel
              << "x\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compare the OpenMP kernels against their serial references"};
    std::uint32_t q = 8;
    int n = 7;
    int reps = 3;
    std::uint64_t seed = 1;
    app.add_option("--q", q, "alphabet size")->check(CLI::Range(2u, 1u << 16));
    app.add_option("--n", n, "number of cells")->check(CLI::PositiveNumber);
    app.add_option("--reps", reps, "repetitions, best time wins")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "map sampling seed");
    CLI11_PARSE(app, argc, argv);

    const std::uint64_t size = state_space_size(q, n, std::uint64_t(1) << 28);
    Rng rng(seed);
    TransitionMap t;
    t.q = q;
    t.n = n;
    t.next.resize(size);
    for (State& y : t.next)
        y = rng.below(size);

    std::cout << "random map on " << size << " states (q = " << q << ", n = " << n << "), best of "
              << reps << "\n\n";
    std::cout << std::left << std::setw(10) << "kernel" << std::right << std::setw(11) << "serial"
              << std::setw(11) << "parallel" << std::setw(10) << "speedup\n";

    TransitionMap serial_out, parallel_out;
    const double compose_serial_s = best_seconds(reps, [&] { serial_out = compose_serial(t, t); });
    const double compose_parallel_s = best_seconds(reps, [&] { parallel_out = compose(t, t); });
    if (!(serial_out == parallel_out)) {
        std::cerr << "compose kernels disagree\n";
        return 1;
    }
    report("compose", compose_serial_s, compose_parallel_s);

    std::uint64_t rank_a = 0, rank_b = 0;
    const double rank_serial_s = best_seconds(reps, [&] { rank_a = rank_serial(t); });
    const double rank_parallel_s = best_seconds(reps, [&] { rank_b = rank(t); });
    if (rank_a != rank_b) {
        std::cerr << "rank kernels disagree\n";
        return 1;
    }
    report("rank", rank_serial_s, rank_parallel_s);

    std::vector<State> per_a, per_b;
    const double per_serial_s = best_seconds(reps, [&] { per_a = periodic_points_serial(t); });
    const double per_parallel_s = best_seconds(reps, [&] { per_b = periodic_points(t); });
    if (per_a != per_b) {
        std::cerr << "periodic point kernels disagree\n";
        return 1;
    }
    report("periodic", per_serial_s, per_parallel_s);

    return 0;
}
