// SPDX-License-Identifier: Apache-2.0
//
// The ten acceptance checks, shared by the acceptance test binary and the
// `report` CLI subcommand.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace minmod {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    std::vector<std::string> info;  ///< supplementary lines, not part of the verdict
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20261018;
    unsigned threads = 0;
};

constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});
/// Empty `ids` runs all criteria in order.
std::vector<CriterionResult> run_acceptance(std::span<const int> ids = {}, const AcceptanceOptions& opts = {},
                                            std::ostream* live = nullptr);

/// One "[PASS]"/"[FAIL]" line plus indented info lines.
void print_result(std::ostream& os, const CriterionResult& r);

}  // namespace minmod
