#pragma once

#include <cmath>

namespace smectic::numerics {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2 after normalization.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    double value() const { return hi + lo; }
};

/// s + e == a + b exactly.
inline DoubleDouble two_sum(double a, double b)
{
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

/// p + e == a * b exactly.
inline DoubleDouble two_prod(double a, double b)
{
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DoubleDouble& operator+=(DoubleDouble& x, double y)
{
    const DoubleDouble s = two_sum(x.hi, y);
    x = two_sum(s.hi, s.lo + x.lo);
    return x;
}

inline DoubleDouble& operator+=(DoubleDouble& x, const DoubleDouble& y)
{
    const DoubleDouble s = two_sum(x.hi, y.hi);
    x = two_sum(s.hi, s.lo + x.lo + y.lo);
    return x;
}

inline DoubleDouble operator*(double c, const DoubleDouble& x)
{
    DoubleDouble p = two_prod(c, x.hi);
    p.lo += c * x.lo;
    return two_sum(p.hi, p.lo);
}

} // namespace smectic::numerics
