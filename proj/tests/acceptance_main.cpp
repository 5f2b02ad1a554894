// Acceptance suite runner: executes every criterion and prints one PASS/FAIL
// line each; exits nonzero if any criterion fails.

#include <iostream>

#include "ipstk/selftest.hpp"

int main() {
    auto results = ipstk::run_acceptance(std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    if (failed == 0) {
        std::cout << "acceptance: all " << results.size() << " criteria passed" << std::endl;
        return 0;
    }
    std::cout << "acceptance: " << failed << " criterion(s) failed" << std::endl;
    return 1;
}
