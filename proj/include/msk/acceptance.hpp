#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace msk {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // counts on success, first counterexample on failure
    double seconds = 0;
};

struct AcceptanceOptions {
    std::string golden_dir;   // empty: the tests/golden directory of the source tree
    std::size_t corpus_max = 2;
    std::size_t budget = 10'000'000;
    unsigned seed = 7;        // only the random objects of criterion 5
};

// The nine acceptance criteria. EnumerationBudgetExceeded propagates; any
// other exception fails its criterion.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});
const std::vector<std::string>& criterion_names();

// "> source" followed by one line per component; '#' lines are comments.
struct GoldenCase {
    std::string source;
    std::vector<std::string> expected;
};
std::vector<GoldenCase> load_golden_file(const std::string& path);

} // namespace msk
