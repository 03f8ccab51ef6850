// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace minmod {

/// Raised when an operation's precondition is not met. The CLI maps this to
/// exit code 2.
class Refusal : public std::invalid_argument {
public:
    explicit Refusal(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace minmod
