#pragma once

#include <span>
#include <vector>

namespace smectic {

struct AitkenResult {
    double limit = 0.0;
    /// Second difference vanished; `limit` is the last entry.
    bool degenerate = false;
};

/// Aitken delta-squared extrapolation a_k - (a_k - a_{k-1})^2 / (a_k - 2 a_{k-1} + a_{k-2})
/// on the last three entries. Throws ConfigurationError for fewer than three.
AitkenResult aitken(std::span<const double> a);

} // namespace smectic
