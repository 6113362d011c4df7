#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mobdyn {

// One end-to-end check of the library against its oracles, with a runtime
// budget. Shared by the acceptance binary and `mobdyn verify-all`.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool checks_pass = false;
    double seconds = 0.0;
    double budget = 0.0;
    std::string detail;

    bool pass() const { return checks_pass && seconds < budget; }
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    int transitivity_pairs = 20;
};

inline constexpr int kCriterionCount = 10;

// id in 1..kCriterionCount; throws std::out_of_range otherwise. Exceptions
// from the constructions are caught and reported as failures.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

}  // namespace mobdyn
