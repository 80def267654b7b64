// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Each criterion is a named verification suite with a wall-clock budget.

#include <cstdio>
#include <exception>
#include <vector>

#include "fdsrank/verify.hpp"

int main() {
    struct Criterion {
        int number;
        const char* suite;
        double budget_seconds;
    };
    const std::vector<Criterion> criteria = {
        {1, "flow-oracle", 120},
        {2, "edmonds", 30},
        {3, "rank-bound", 120},
        {4, "copy-attainment", 120},
        {5, "redlight-attainment", 180},
        {6, "kn-permutation", 60},
        {7, "block-sequential-bound", 120},
        {8, "complete-schedule", 120},
        {9, "degree2-obstruction", 60},
        {10, "average-rank-constants", 180},
        {11, "periodic-oracle", 10},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        fdsrank::SuiteResult result;
        try {
            result = fdsrank::run_verification_suite(c.suite);
        } catch (const std::exception& e) {
            result.name = c.suite;
            result.detail = e.what();
        }
        const bool in_budget = result.seconds < c.budget_seconds;
        const bool ok = result.passed && in_budget;
        failures += !ok;
        std::printf("%s criterion %2d %-23s %6.2fs of %3.0fs: %s%s\n",
                    ok ? "PASS" : "FAIL", c.number, c.suite, result.seconds,
                    c.budget_seconds, result.detail.c_str(),
                    in_budget ? "" : " [over budget]");
        std::fflush(stdout);
    }

    if (failures)
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    else
        std::printf("all %zu criteria passed\n", criteria.size());
    return failures ? 1 : 0;
}
