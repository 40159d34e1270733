#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fracshock {

struct SelfTestItem {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    /// "<=" or ">=" relation between value and limit.
    std::string relation;
    bool pass = false;
};

struct SelfTestReport {
    std::vector<SelfTestItem> items;
    bool pass() const;
};

/// Fast invariant suite: operator identities, closed-form symbol, flux
/// consistency, transport order, determinism, statistical noise checks and
/// config rejection. Completes in a few seconds.
SelfTestReport run_selftest(std::size_t threads = 2);

nlohmann::json to_json(const SelfTestReport& r);

} // namespace fracshock
