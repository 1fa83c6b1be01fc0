// Release gate: runs the ten acceptance criteria and prints one verdict line
// per criterion. Exit status 0 iff all pass.
#include <cstdio>

#include "kinlab/report.hpp"

int main() {
    int failed = 0;
    for (int k = 1; k <= 10; ++k) {
        kinlab::CriterionResult r = kinlab::run_criterion(k);
        if (!r.pass) ++failed;
        std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", r.pass ? "PASS" : "FAIL",
                    r.index, r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
    }
    if (failed) std::printf("%d of 10 criteria failed\n", failed);
    else std::printf("all 10 criteria passed\n");
    return failed ? 1 : 0;
}
