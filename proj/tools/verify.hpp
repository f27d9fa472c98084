#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rcm::verify {

// Exact tier: enumeration-backed identities and table arithmetic (criteria 1, 4, 8).
// Statistical tier: everything driven by Monte Carlo (criteria 2, 3, 5, 6, 7).
enum class Tier { Exact, Statistical, All };

Tier parse_tier(const std::string& name);
std::vector<int> criteria_of(Tier tier);

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;

    // "PASS C4 parafermionic identities: ... (1.2 s)"
    std::string line() const;
};

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    // Progress messages (one per sub-check); may be empty.
    std::function<void(const std::string&)> log;
};

CriterionResult run_criterion(int id, const VerifyOptions& options);

// Runs the criteria in order, calling on_result after each one.
std::vector<CriterionResult> run(const std::vector<int>& ids, const VerifyOptions& options,
                                 const std::function<void(const CriterionResult&)>& on_result = nullptr);

}  // namespace rcm::verify
