#include "smectic/aitken.hpp"

#include "smectic/error.hpp"

#include <cmath>

namespace smectic {

AitkenResult aitken(std::span<const double> a)
{
    if (a.size() < 3) {
        throw ConfigurationError("aitken: at least three sequence values are required");
    }
    const std::size_t n = a.size();
    const double a0 = a[n - 3];
    const double a1 = a[n - 2];
    const double a2 = a[n - 1];
    const double d1 = a2 - a1;
    const double d2 = a2 - 2.0 * a1 + a0;
    if (std::abs(d2) < 1e-14 * std::abs(a2) || d2 == 0.0) {
        return {a2, true};
    }
    return {a2 - d1 * d1 / d2, false};
}

} // namespace smectic
