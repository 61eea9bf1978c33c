#include <cstdio>

#include "msk/acceptance.hpp"
#include "msk/errors.hpp"

int main() {
    msk::AcceptanceOptions opt;
    int failed = 0;
    try {
        msk::run_acceptance(opt, [&](const msk::CriterionResult& r) {
            std::printf("%s %d %-32s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                        r.detail.c_str());
            std::fflush(stdout);
            if (!r.pass) ++failed;
        });
    } catch (const msk::EnumerationBudgetExceeded& e) {
        std::printf("FAIL budget exceeded: %s\n", e.what());
        return 2;
    }
    std::printf("%d of 9 criteria failed\n", failed);
    return failed ? 1 : 0;
}
