#pragma once

#include "smectic/tensor.hpp"

#include <array>
#include <functional>

namespace smectic::numerics {

/// Truncated bivariate Taylor polynomial
///
///     f(x0 + dx, y0 + dy) = sum_{i+j <= order} c_ij dx^i dy^j
///
/// Arithmetic on jets propagates all partial derivatives up to `order`
/// (at most 4) exactly, up to rounding. Binary operations truncate to the
/// smaller order of their operands; plain doubles act as exact constants.
class Jet {
public:
    static constexpr int kMaxOrder = 4;
    static constexpr int kSize = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

    Jet() = default;
    Jet(double constant) : order_(kMaxOrder) { c_[0] = constant; } // NOLINT(google-explicit-constructor)
    Jet(double constant, int order);

    /// The coordinate function x (axis 0) or y (axis 1) expanded at `value`.
    static Jet variable(double value, int axis, int order);

    static constexpr int index(int i, int j)
    {
        const int d = i + j;
        return d * (d + 1) / 2 + j;
    }

    int order() const { return order_; }
    double value() const { return c_[0]; }
    double coeff(int i, int j) const { return c_[static_cast<std::size_t>(index(i, j))]; }
    double& coeff(int i, int j) { return c_[static_cast<std::size_t>(index(i, j))]; }

    /// d^{i+j} f / dx^i dy^j at the expansion point.
    double derivative(int i, int j) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);

    Jet operator-() const;

    /// g(f) from the derivatives g(c0), g'(c0), ..., g^(order)(c0).
    Jet compose(const std::array<double, kMaxOrder + 1>& derivatives) const;

    Jet truncated(int order) const;

private:
    int order_ = kMaxOrder;
    std::array<double, kSize> c_{};
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, double b) { return a += Jet(b); }
inline Jet operator-(Jet a, double b) { return a -= Jet(b); }
inline Jet operator*(Jet a, double b) { return a *= Jet(b); }
inline Jet operator/(Jet a, double b) { return a /= Jet(b); }
inline Jet operator+(double a, const Jet& b) { return Jet(a) += b; }
inline Jet operator-(double a, const Jet& b) { return Jet(a) -= b; }
inline Jet operator*(double a, const Jet& b) { return Jet(a) *= b; }
inline Jet operator/(double a, const Jet& b) { return Jet(a) /= b; }

Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet exp(const Jet& x);
/// Throws DomainError at non-positive arguments.
Jet sqrt(const Jet& x);
/// Throws DomainError at zero.
Jet reciprocal(const Jet& x);
Jet pow(const Jet& x, int n);

/// Partial derivative along axis 0 (x) or 1 (y); the order drops by one.
/// Throws ConfigurationError on order-0 jets.
Jet differentiate(const Jet& f, int axis);

/// Closed-form scalar function of (x, y), evaluable on jets.
using ScalarFn = std::function<Jet(const Jet& x, const Jet& y)>;

struct VectorJet {
    Jet x;
    Jet y;
};
using VectorFn = std::function<VectorJet(const Jet& x, const Jet& y)>;

struct SymTensorJet {
    Jet xx;
    Jet xy;
    Jet yy;
};
using TensorFn = std::function<SymTensorJet(const Jet& x, const Jet& y)>;

/// All partial derivatives of a scalar function up to some order at a point.
class DerivativeStack {
public:
    explicit DerivativeStack(const Jet& j);

    int order() const { return order_; }
    /// d^{i+j} f / dx^i dy^j
    double operator()(int i, int j) const { return d_[static_cast<std::size_t>(Jet::index(i, j))]; }

private:
    int order_;
    std::array<double, Jet::kSize> d_{};
};

/// Partial derivatives of f at p up to `order` (<= 4) by Taylor arithmetic.
DerivativeStack jet(const ScalarFn& f, const Vec2& p, int order);

/// Expansion of f at p to the given order.
Jet expand(const ScalarFn& f, const Vec2& p, int order);
SymTensorJet expand(const TensorFn& f, const Vec2& p, int order);

/// Plain value evaluation (order-0 jets).
double evaluate(const ScalarFn& f, const Vec2& p);
Vec2 evaluate(const VectorFn& f, const Vec2& p);
SymTensor evaluate(const TensorFn& f, const Vec2& p);

/// Value, gradient and Hessian of a scalar function at a point.
struct ScalarHessian {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    SymTensor hessian;
};
ScalarHessian second_order(const ScalarFn& f, const Vec2& p);

/// div div of a symmetric tensor expansion (needs order >= 2).
double div_div(const SymTensorJet& m);

} // namespace smectic::numerics
