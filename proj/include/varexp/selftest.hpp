#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace varexp {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Seeded property suite: exponent identities, thresholding oracle sweep,
/// adjoint tests, gradient checks and solver descent.
std::vector<CheckResult> run_selftest(std::uint64_t seed, int scale = 1);

}  // namespace varexp
