#include <cerrno>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fdsrank/constructions.hpp"
#include "fdsrank/digraph.hpp"
#include "fdsrank/errors.hpp"
#include "fdsrank/fds.hpp"
#include "fdsrank/rng.hpp"
#include "fdsrank/sampling.hpp"
#include "fdsrank/verify.hpp"
#include "fdsrank/walks.hpp"

namespace {

using nlohmann::json;
using namespace fdsrank;

std::uint64_t state_limit_from_env() {
    const char* env = std::getenv("FDSRANK_STATE_LIMIT");
    if (env == nullptr)
        return kDefaultStateLimit;
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || value == 0)
        throw input_error("FDSRANK_STATE_LIMIT must be a positive integer");
    return value;
}

std::string read_all(const std::string& path) {
    std::ostringstream text;
    if (path == "-") {
        text << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in)
            throw input_error("cannot open " + path);
        text << in.rdbuf();
    }
    return text.str();
}

Digraph load_digraph(const std::string& path) { return Digraph::parse_string(read_all(path)); }
Fds load_fds(const std::string& path) { return Fds::parse_string(read_all(path)); }
Schedule load_schedule(const std::string& path) { return Schedule::parse_string(read_all(path)); }

void emit(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw input_error("cannot write " + path);
    out << text;
}

void print_json(const json& record) { std::cout << record.dump(2) << '\n'; }

std::string fmt(double value) {
    std::ostringstream out;
    out.precision(10);
    out << value;
    return out.str();
}

json digraph_json(const Digraph& d) {
    json arcs = json::array();
    for (const auto& [u, v] : d.arcs())
        arcs.push_back({u, v});
    return json{{"n", d.vertex_count()}, {"arcs", arcs}};
}

struct AlphaArgs {
    std::string path;
    int p = 1;
    std::string method = "flow";
    bool certificate = false;
};

struct RankArgs {
    std::string path;
    int p = 1;
    std::string schedule;
};

struct FileArg {
    std::string path;
};

struct WalkConstructArgs {
    std::string path;
    int p = 1;
    std::uint32_t q = 3;
    std::string out = "-";
};

struct SizeConstructArgs {
    int n = 0;
    std::string out = "-";
};

struct CompleteScheduleArgs {
    std::string path;
    int m = 2;
    std::uint64_t seed = 0;
    int retries = 64;
    std::string out = "-";
    std::string schedule_out;
};

struct SampleArgs {
    std::string path;
    std::uint32_t q = 2;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    bool periodic = false;
};

struct VerifyArgs {
    std::string suite = "all";
    bool list = false;
};

struct ExploreArgs {
    std::string path;
    std::uint32_t q = 2;
    std::uint64_t trials = 100;
    std::uint64_t seed = 0;
    std::string schedules = "block-sequential";
};

void run_alpha(const AlphaArgs& args, bool json_mode) {
    const Digraph d = load_digraph(args.path);
    int alpha = 0;
    if (args.method == "flow") {
        alpha = walk_packing_number(d, args.p);
    } else if (args.method == "brute") {
        alpha = walk_packing_bruteforce(d, args.p);
    } else {
        if (args.p != 1)
            throw input_error("method edmonds only computes p = 1, got p = " +
                              std::to_string(args.p));
        alpha = walk_packing_edmonds(d);
    }
    WalkFamily cert;
    if (args.certificate)
        cert = walk_certificate(d, args.p);

    if (json_mode) {
        json record{{"alpha", alpha}, {"p", args.p}, {"method", args.method}};
        if (args.certificate)
            record["walks"] = cert.walks;
        print_json(record);
        return;
    }
    std::cout << alpha << '\n';
    for (const auto& walk : cert.walks) {
        for (std::size_t i = 0; i < walk.size(); ++i)
            std::cout << (i ? " " : "") << walk[i];
        std::cout << '\n';
    }
}

void run_rank(const RankArgs& args, bool json_mode, std::uint64_t limit) {
    const Fds f = load_fds(args.path);
    TransitionMap t = args.schedule.empty() ? materialize(f, limit)
                                            : apply_schedule(f, load_schedule(args.schedule), limit);
    if (args.p > 1)
        t = iterate(t, static_cast<std::uint64_t>(args.p));
    const std::uint64_t r = rank(t);
    if (json_mode) {
        print_json(json{{"rank", r},
                        {"scaled", scaled_rank(r, f.q())},
                        {"q", f.q()},
                        {"n", f.n()},
                        {"p", args.p}});
        return;
    }
    std::cout << r << '\n';
}

void run_periodic(const RankArgs& args, bool json_mode, std::uint64_t limit) {
    const Fds f = load_fds(args.path);
    const TransitionMap t = args.schedule.empty()
                                ? materialize(f, limit)
                                : apply_schedule(f, load_schedule(args.schedule), limit);
    const std::uint64_t count = periodic_points(t).size();
    if (json_mode) {
        print_json(json{{"periodic", count},
                        {"scaled", scaled_rank(count, f.q())},
                        {"q", f.q()},
                        {"n", f.n()}});
        return;
    }
    std::cout << count << '\n';
}

void run_ig(const FileArg& args, bool json_mode) {
    const Digraph ig = interaction_graph(load_fds(args.path));
    if (json_mode) {
        print_json(digraph_json(ig));
        return;
    }
    std::cout << ig.to_string();
}

void emit_fds(const Fds& f, const std::string& out, bool json_mode) {
    if (json_mode) {
        print_json(json{{"fds", f.to_string()}, {"q", f.q()}, {"n", f.n()}});
        return;
    }
    emit(out, f.to_string());
}

void run_construct_copy(const WalkConstructArgs& args, bool json_mode) {
    const Digraph d = load_digraph(args.path);
    emit_fds(copy_walk_system(d, walk_certificate(d, args.p)), args.out, json_mode);
}

void run_construct_redlight(const WalkConstructArgs& args, bool json_mode) {
    const Digraph d = load_digraph(args.path);
    emit_fds(red_light_system(d, args.q, walk_certificate(d, args.p)), args.out, json_mode);
}

void run_construct_complete_schedule(const CompleteScheduleArgs& args, bool json_mode) {
    const Digraph d = load_digraph(args.path);
    const CompleteScheduleSystem sys = complete_schedule_system(d, args.m, args.seed, args.retries);
    if (json_mode) {
        print_json(json{{"fds", sys.fds.to_string()},
                        {"schedule", sys.schedule.to_string()},
                        {"q", sys.q},
                        {"sentinel", sys.sentinel},
                        {"cycles", sys.cycles},
                        {"rest", sys.rest},
                        {"attempts", sys.attempts}});
        return;
    }
    emit(args.out, sys.fds.to_string());
    if (!args.schedule_out.empty())
        emit(args.schedule_out, sys.schedule.to_string());
}

void run_construct_degree2(const FileArg& args, bool json_mode) {
    const DegreeTwoReport report = degree_two_obstruction_report(load_digraph(args.path));
    if (json_mode) {
        print_json(json{{"n", report.n},
                        {"systems", report.systems},
                        {"bound", report.bound},
                        {"max_rank", report.max_rank},
                        {"all_below_bound", report.all_below_bound}});
        return;
    }
    std::cout << "systems " << report.systems << '\n';
    std::cout << "bound " << report.bound << '\n';
    for (std::size_t p = 0; p < report.max_rank.size(); ++p)
        std::cout << "p " << p + 1 << " max-rank " << report.max_rank[p] << '\n';
    std::cout << "all-below-bound " << (report.all_below_bound ? "true" : "false") << '\n';
}

void run_sample(const SampleArgs& args, bool json_mode, std::uint64_t limit) {
    const Digraph d = load_digraph(args.path);
    SamplingLimits limits;
    limits.state_limit = limit;
    double mean = 0.0, sem = 0.0;
    if (args.periodic) {
        const PeriodicEstimate est =
            estimate_average_periodic_rank(d, args.q, args.trials, args.seed, limits);
        mean = est.mean_count;
        sem = est.stderr_count;
    } else {
        const RankEstimate est =
            estimate_average_scaled_rank(d, args.q, args.trials, args.seed, limits);
        mean = est.mean_scaled;
        sem = est.stderr_scaled;
    }
    if (json_mode) {
        print_json(json{{"digraph", d.to_string()},
                        {"q", args.q},
                        {"trials", args.trials},
                        {"seed", args.seed},
                        {"mean", mean},
                        {"stderr", sem}});
        return;
    }
    std::cout << "mean " << fmt(mean) << " stderr " << fmt(sem) << '\n';
}

int run_verify(const VerifyArgs& args, bool json_mode) {
    if (args.list) {
        for (const std::string& name : verification_suite_names())
            std::cout << name << '\n';
        return 0;
    }
    std::vector<SuiteResult> results;
    if (args.suite == "all")
        results = run_all_verification_suites();
    else
        results.push_back(run_verification_suite(args.suite));

    bool all_passed = true;
    json records = json::array();
    for (const SuiteResult& result : results) {
        all_passed = all_passed && result.passed;
        if (json_mode) {
            records.push_back(json{{"name", result.name},
                                   {"passed", result.passed},
                                   {"seconds", result.seconds},
                                   {"detail", result.detail}});
        } else {
            std::cout << (result.passed ? "PASS" : "FAIL") << ' ' << result.name << " ("
                      << fmt(result.seconds) << "s): " << result.detail << '\n';
        }
    }
    if (json_mode)
        print_json(records);
    return all_passed ? 0 : 1;
}

void run_explore(const ExploreArgs& args, bool json_mode, std::uint64_t limit) {
    const Digraph d = load_digraph(args.path);
    if (args.trials == 0)
        throw input_error("explore: trials must be positive");
    const int n = d.vertex_count();
    SamplingLimits limits;
    limits.state_limit = limit;
    const bool block = args.schedules == "block-sequential";

    std::vector<double> ranks(args.trials), periodics(args.trials);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(args.trials); ++i) {
        try {
            Rng rng(derive_stream_seed(args.seed, i));
            const Fds f = sample_exact(d, args.q, rng.next_u64(), limits);
            const Schedule sigma = block ? random_block_sequential_schedule(n, rng)
                                         : random_complete_schedule(n, rng);
            const TransitionMap t = apply_schedule(f, sigma, limit);
            ranks[i] = scaled_rank(rank_serial(t), args.q);
            periodics[i] = scaled_rank(periodic_points_serial(t).size(), args.q);
        } catch (...) {
#pragma omp critical
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);

    double rank_mean = 0.0, rank_max = 0.0, per_mean = 0.0, per_max = 0.0;
    for (std::uint64_t i = 0; i < args.trials; ++i) {
        rank_mean += ranks[i];
        per_mean += periodics[i];
        rank_max = std::max(rank_max, ranks[i]);
        per_max = std::max(per_max, periodics[i]);
    }
    rank_mean /= static_cast<double>(args.trials);
    per_mean /= static_cast<double>(args.trials);

    const int alpha1 = walk_packing_number(d, 1);
    const int on_cycle = n - scc_summary(d).trivial_count;

    if (json_mode) {
        print_json(json{{"digraph", d.to_string()},
                        {"q", args.q},
                        {"trials", args.trials},
                        {"seed", args.seed},
                        {"schedules", args.schedules},
                        {"alpha_1", alpha1},
                        {"on_cycle_vertices", on_cycle},
                        {"max_scaled_rank", rank_max},
                        {"mean_scaled_rank", rank_mean},
                        {"max_scaled_periodic", per_max},
                        {"mean_scaled_periodic", per_mean}});
        return;
    }
    std::cout << "trials " << args.trials << '\n'
              << "alpha_1 " << alpha1 << '\n'
              << "on_cycle_vertices " << on_cycle << '\n'
              << "max_scaled_rank " << fmt(rank_max) << '\n'
              << "mean_scaled_rank " << fmt(rank_mean) << '\n'
              << "max_scaled_periodic " << fmt(per_max) << '\n'
              << "mean_scaled_periodic " << fmt(per_mean) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum rank parameters of finite dynamical systems over digraphs"};
    app.require_subcommand(1);
    bool json_mode = false;
    int exit_code = 0;

    const auto add_json = [&json_mode](CLI::App* sub) {
        sub->add_flag("--json", json_mode, "emit a JSON record instead of plain text");
    };

    AlphaArgs alpha_args;
    auto* alpha = app.add_subcommand("alpha", "walk packing number of a digraph");
    alpha->add_option("digraph", alpha_args.path, "digraph file, - for stdin")->required();
    alpha->add_option("--p", alpha_args.p, "walk length")->check(CLI::PositiveNumber);
    alpha->add_option("--method", alpha_args.method, "flow, brute, or edmonds")
        ->check(CLI::IsMember({"flow", "brute", "edmonds"}));
    alpha->add_flag("--certificate", alpha_args.certificate, "also print a maximum walk family");
    add_json(alpha);
    alpha->callback([&] { run_alpha(alpha_args, json_mode); });

    RankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("rank", "number of images of a system");
    rank_cmd->add_option("fds", rank_args.path, "system file, - for stdin")->required();
    rank_cmd->add_option("--p", rank_args.p, "iterate to apply")->check(CLI::PositiveNumber);
    rank_cmd->add_option("--schedule", rank_args.schedule, "apply this update schedule");
    add_json(rank_cmd);
    rank_cmd->callback([&] { run_rank(rank_args, json_mode, state_limit_from_env()); });

    RankArgs periodic_args;
    auto* periodic = app.add_subcommand("periodic", "number of periodic points of a system");
    periodic->add_option("fds", periodic_args.path, "system file, - for stdin")->required();
    periodic->add_option("--schedule", periodic_args.schedule, "apply this update schedule");
    add_json(periodic);
    periodic->callback([&] { run_periodic(periodic_args, json_mode, state_limit_from_env()); });

    FileArg ig_args;
    auto* ig = app.add_subcommand("ig", "interaction graph of a system, in digraph format");
    ig->add_option("fds", ig_args.path, "system file, - for stdin")->required();
    add_json(ig);
    ig->callback([&] { run_ig(ig_args, json_mode); });

    auto* construct = app.add_subcommand("construct", "extremal systems from the library");
    construct->require_subcommand(1);

    WalkConstructArgs copy_args;
    auto* copy = construct->add_subcommand("copy", "Boolean copy system along a maximum family");
    copy->add_option("digraph", copy_args.path, "digraph file, - for stdin")->required();
    copy->add_option("--p", copy_args.p, "walk length")->check(CLI::PositiveNumber);
    copy->add_option("--out", copy_args.out, "output file, - for stdout");
    add_json(copy);
    copy->callback([&] { run_construct_copy(copy_args, json_mode); });

    WalkConstructArgs redlight_args;
    auto* redlight =
        construct->add_subcommand("redlight", "red-light system with exact interaction graph");
    redlight->add_option("digraph", redlight_args.path, "digraph file, - for stdin")->required();
    redlight->add_option("--q", redlight_args.q, "alphabet size, at least 3")
        ->check(CLI::Range(3u, 1u << 16));
    redlight->add_option("--p", redlight_args.p, "walk length")->check(CLI::PositiveNumber);
    redlight->add_option("--out", redlight_args.out, "output file, - for stdout");
    add_json(redlight);
    redlight->callback([&] { run_construct_redlight(redlight_args, json_mode); });

    SizeConstructArgs kn_args;
    auto* kn = construct->add_subcommand(
        "kn", "Boolean permutation with complete loopless interaction graph");
    kn->add_option("--n", kn_args.n, "number of vertices")->required()->check(CLI::PositiveNumber);
    kn->add_option("--out", kn_args.out, "output file, - for stdout");
    add_json(kn);
    kn->callback([&] { emit_fds(kn_permutation_system(kn_args.n), kn_args.out, json_mode); });

    SizeConstructArgs clique_args;
    auto* clique = construct->add_subcommand(
        "clique-loops", "transposition of the two constant states over the looped clique");
    clique->add_option("--n", clique_args.n, "number of vertices")
        ->required()
        ->check(CLI::PositiveNumber);
    clique->add_option("--out", clique_args.out, "output file, - for stdout");
    add_json(clique);
    clique->callback(
        [&] { emit_fds(clique_loops_transposition(clique_args.n), clique_args.out, json_mode); });

    CompleteScheduleArgs cs_args;
    auto* cs = construct->add_subcommand(
        "complete-schedule", "linear system and complete schedule with many periodic points");
    cs->add_option("digraph", cs_args.path, "digraph file, - for stdin")->required();
    cs->add_option("--m", cs_args.m, "field degree, GF(2^m)")->check(CLI::Range(2, 16));
    cs->add_option("--seed", cs_args.seed, "weight sampling seed")->required();
    cs->add_option("--retries", cs_args.retries, "weight resampling budget")
        ->check(CLI::PositiveNumber);
    cs->add_option("--out", cs_args.out, "system output file, - for stdout");
    cs->add_option("--schedule-out", cs_args.schedule_out, "also write the schedule here");
    add_json(cs);
    cs->callback([&] { run_construct_complete_schedule(cs_args, json_mode); });

    FileArg degree2_args;
    auto* degree2 = construct->add_subcommand(
        "degree2-check", "exhaust both-essential Boolean systems on an in-degree-2 digraph");
    degree2->add_option("digraph", degree2_args.path, "digraph file, - for stdin")->required();
    add_json(degree2);
    degree2->callback([&] { run_construct_degree2(degree2_args, json_mode); });

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "Monte-Carlo average rank over sampled systems");
    sample->add_option("digraph", sample_args.path, "digraph file, - for stdin")->required();
    sample->add_option("--q", sample_args.q, "alphabet size")->required()->check(CLI::Range(2u, 1u << 20));
    sample->add_option("--trials", sample_args.trials, "number of draws")
        ->required()
        ->check(CLI::PositiveNumber);
    sample->add_option("--seed", sample_args.seed, "master seed")->required();
    sample->add_flag("--periodic", sample_args.periodic,
                     "estimate the periodic count instead of the scaled rank");
    add_json(sample);
    sample->callback([&] { run_sample(sample_args, json_mode, state_limit_from_env()); });

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "run named verification suites");
    verify->add_option("suite", verify_args.suite, "suite name, or all");
    verify->add_flag("--list", verify_args.list, "list suite names and exit");
    add_json(verify);
    verify->callback([&] { exit_code = run_verify(verify_args, json_mode); });

    ExploreArgs explore_args;
    auto* explore = app.add_subcommand(
        "explore", "sample scheduled systems and report observed rank statistics; asserts nothing");
    explore->add_option("digraph", explore_args.path, "digraph file, - for stdin")->required();
    explore->add_option("--q", explore_args.q, "alphabet size")
        ->required()
        ->check(CLI::Range(2u, 1u << 20));
    explore->add_option("--trials", explore_args.trials, "number of draws")
        ->check(CLI::PositiveNumber);
    explore->add_option("--seed", explore_args.seed, "master seed")->required();
    explore->add_option("--schedules", explore_args.schedules, "schedule family to draw from")
        ->check(CLI::IsMember({"block-sequential", "complete"}));
    add_json(explore);
    explore->callback([&] { run_explore(explore_args, json_mode, state_limit_from_env()); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const guard_error& e) {
        std::cerr << "guard: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}
