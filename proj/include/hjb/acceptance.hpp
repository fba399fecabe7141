#pragma once
// The quantitative exit checks: closed-form oracles, exact discrete
// identities, and the property-based bounds, each reported as a ledger entry.

#include "hjb/report.hpp"

#include <functional>
#include <string>

namespace hjb {

// Runs every acceptance check at its pinned parameters. `progress` (optional)
// receives one line per finished entry.
RunReport run_acceptance_suite(
    const std::function<void(const LedgerEntry&)>& progress = nullptr);

} // namespace hjb
