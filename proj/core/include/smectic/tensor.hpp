#pragma once

#include <Eigen/Core>

#include <cmath>

namespace smectic {

using Vec2 = Eigen::Vector2d;

/// Symmetric 2x2 tensor stored by its three independent components.
struct SymTensor {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    static SymTensor identity() { return {1.0, 0.0, 1.0}; }

    /// nu nu^T
    static SymTensor dyad(const Vec2& nu) { return {nu.x() * nu.x(), nu.x() * nu.y(), nu.y() * nu.y()}; }

    Vec2 apply(const Vec2& v) const { return {xx * v.x() + xy * v.y(), xy * v.x() + yy * v.y()}; }

    /// a . (Q b)
    double bilinear(const Vec2& a, const Vec2& b) const { return a.dot(apply(b)); }

    double trace() const { return xx + yy; }

    SymTensor& operator+=(const SymTensor& o)
    {
        xx += o.xx;
        xy += o.xy;
        yy += o.yy;
        return *this;
    }
    SymTensor& operator-=(const SymTensor& o)
    {
        xx -= o.xx;
        xy -= o.xy;
        yy -= o.yy;
        return *this;
    }
    SymTensor& operator*=(double s)
    {
        xx *= s;
        xy *= s;
        yy *= s;
        return *this;
    }
};

inline SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
inline SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
inline SymTensor operator*(double s, SymTensor a) { return a *= s; }
inline SymTensor operator*(SymTensor a, double s) { return a *= s; }

/// Frobenius product A : B.
inline double contract(const SymTensor& a, const SymTensor& b) { return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy; }

inline double frobenius_norm(const SymTensor& a) { return std::sqrt(contract(a, a)); }

/// Rank-one projector T(phi) onto the director (cos phi, sin phi).
inline SymTensor director_tensor(double phi)
{
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {c * c, s * c, s * s};
}

/// Derivative of director_tensor with respect to the angle.
inline SymTensor director_tensor_derivative(double phi)
{
    const double s2 = std::sin(2.0 * phi);
    const double c2 = std::cos(2.0 * phi);
    return {-s2, c2, s2};
}

} // namespace smectic
