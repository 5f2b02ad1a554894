#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipstk {

using VarId = std::uint32_t;

/// Thrown when a desk-scale budget (expansion terms, enumeration size,
/// solver dimensions) is exceeded. Callers can retry with a larger budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ipstk
