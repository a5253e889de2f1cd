#pragma once

// Self-checks of the core identities, reported one entry per property.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "scorelife/rollout.hpp"

namespace scorelife {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst observed error (or the statistic checked)
    double threshold = 0.0;  // pass iff measured <= threshold unless noted in detail
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    std::size_t strings = 100000;  // random digit strings for the codec bounds
    std::size_t pairs = 1000;      // random (l, x) pairs for the recursion residuals
    ShiftFn shift_fn = shift;      // replaceable to confirm that a faulty shift is caught
};

std::vector<CheckResult> run_verification(const VerifyOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& checks);
nlohmann::json report_json(const std::vector<CheckResult>& checks);

}  // namespace scorelife
