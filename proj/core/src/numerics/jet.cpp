#include "smectic/numerics/jet.hpp"

#include "smectic/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smectic::numerics {

namespace {

constexpr std::array<double, Jet::kMaxOrder + 1> kFactorial = {1.0, 1.0, 2.0, 6.0, 24.0};

} // namespace

Jet::Jet(double constant, int order) : order_(std::clamp(order, 0, kMaxOrder)) { c_[0] = constant; }

Jet Jet::variable(double value, int axis, int order)
{
    Jet j(value, order);
    if (j.order_ >= 1) {
        j.coeff(axis == 0 ? 1 : 0, axis == 0 ? 0 : 1) = 1.0;
    }
    return j;
}

double Jet::derivative(int i, int j) const
{
    if (i + j > order_) {
        return 0.0;
    }
    return kFactorial[static_cast<std::size_t>(i)] * kFactorial[static_cast<std::size_t>(j)] * coeff(i, j);
}

Jet& Jet::operator+=(const Jet& o)
{
    order_ = std::min(order_, o.order_);
    const int n = index(0, order_) + 1;
    for (int k = 0; k < n; ++k) {
        c_[static_cast<std::size_t>(k)] += o.c_[static_cast<std::size_t>(k)];
    }
    for (int k = n; k < kSize; ++k) {
        c_[static_cast<std::size_t>(k)] = 0.0;
    }
    return *this;
}

Jet& Jet::operator-=(const Jet& o)
{
    order_ = std::min(order_, o.order_);
    const int n = index(0, order_) + 1;
    for (int k = 0; k < n; ++k) {
        c_[static_cast<std::size_t>(k)] -= o.c_[static_cast<std::size_t>(k)];
    }
    for (int k = n; k < kSize; ++k) {
        c_[static_cast<std::size_t>(k)] = 0.0;
    }
    return *this;
}

Jet& Jet::operator*=(const Jet& o)
{
    const int n = std::min(order_, o.order_);
    Jet r(0.0, n);
    for (int d = 0; d <= n; ++d) {
        for (int j = 0; j <= d; ++j) {
            const int i = d - j;
            double s = 0.0;
            for (int a = 0; a <= i; ++a) {
                for (int b = 0; b <= j; ++b) {
                    s += coeff(a, b) * o.coeff(i - a, j - b);
                }
            }
            r.coeff(i, j) = s;
        }
    }
    *this = r;
    return *this;
}

Jet& Jet::operator/=(const Jet& o)
{
    *this *= reciprocal(o);
    return *this;
}

Jet Jet::operator-() const
{
    Jet r = *this;
    for (auto& c : r.c_) {
        c = -c;
    }
    return r;
}

Jet Jet::truncated(int order) const
{
    Jet r = *this;
    r.order_ = std::clamp(order, 0, order_);
    for (int k = index(0, r.order_) + 1; k < kSize; ++k) {
        r.c_[static_cast<std::size_t>(k)] = 0.0;
    }
    return r;
}

Jet Jet::compose(const std::array<double, kMaxOrder + 1>& derivatives) const
{
    Jet result(derivatives[0], order_);
    if (order_ == 0) {
        return result;
    }
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet power = h;
    for (int k = 1; k <= order_; ++k) {
        result += power * (derivatives[static_cast<std::size_t>(k)] / kFactorial[static_cast<std::size_t>(k)]);
        if (k < order_) {
            power *= h;
        }
    }
    return result;
}

Jet sin(const Jet& x)
{
    const double s = std::sin(x.value());
    const double c = std::cos(x.value());
    return x.compose({s, c, -s, -c, s});
}

Jet cos(const Jet& x)
{
    const double s = std::sin(x.value());
    const double c = std::cos(x.value());
    return x.compose({c, -s, -c, s, c});
}

Jet exp(const Jet& x)
{
    const double e = std::exp(x.value());
    return x.compose({e, e, e, e, e});
}

Jet sqrt(const Jet& x)
{
    const double v = x.value();
    if (v < 0.0 || (v == 0.0 && x.order() > 0)) {
        std::ostringstream msg;
        msg << "sqrt evaluated at singular argument " << v;
        throw DomainError(msg.str());
    }
    if (x.order() == 0) {
        return Jet(std::sqrt(v), 0);
    }
    const double r = std::sqrt(v);
    return x.compose({r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v), -0.9375 / (r * v * v * v)});
}

Jet reciprocal(const Jet& x)
{
    const double v = x.value();
    if (v == 0.0 || !std::isfinite(v)) {
        throw DomainError("division by a function that vanishes at the evaluation point");
    }
    const double r = 1.0 / v;
    return x.compose({r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r, 24.0 * r * r * r * r * r});
}

Jet pow(const Jet& x, int n)
{
    if (n < 0) {
        return reciprocal(pow(x, -n));
    }
    Jet result(1.0);
    Jet base = x;
    while (n > 0) {
        if (n & 1) {
            result *= base;
        }
        n >>= 1;
        if (n > 0) {
            base *= base;
        }
    }
    return result.truncated(x.order());
}

Jet differentiate(const Jet& f, int axis)
{
    if (f.order() < 1) {
        throw ConfigurationError("differentiate: jet has no derivative information");
    }
    Jet r(0.0, f.order() - 1);
    for (int d = 0; d < f.order(); ++d) {
        for (int j = 0; j <= d; ++j) {
            const int i = d - j;
            r.coeff(i, j) = axis == 0 ? (i + 1) * f.coeff(i + 1, j) : (j + 1) * f.coeff(i, j + 1);
        }
    }
    return r;
}

DerivativeStack::DerivativeStack(const Jet& j) : order_(j.order())
{
    for (int d = 0; d <= order_; ++d) {
        for (int k = 0; k <= d; ++k) {
            d_[static_cast<std::size_t>(Jet::index(d - k, k))] = j.derivative(d - k, k);
        }
    }
}

Jet expand(const ScalarFn& f, const Vec2& p, int order)
{
    return f(Jet::variable(p.x(), 0, order), Jet::variable(p.y(), 1, order)).truncated(order);
}

SymTensorJet expand(const TensorFn& f, const Vec2& p, int order)
{
    auto m = f(Jet::variable(p.x(), 0, order), Jet::variable(p.y(), 1, order));
    return {m.xx.truncated(order), m.xy.truncated(order), m.yy.truncated(order)};
}

DerivativeStack jet(const ScalarFn& f, const Vec2& p, int order)
{
    if (order < 0 || order > Jet::kMaxOrder) {
        throw ConfigurationError("jet: derivative order must lie in 0..4");
    }
    return DerivativeStack(expand(f, p, order));
}

double evaluate(const ScalarFn& f, const Vec2& p) { return f(Jet(p.x(), 0), Jet(p.y(), 0)).value(); }

Vec2 evaluate(const VectorFn& f, const Vec2& p)
{
    const auto v = f(Jet(p.x(), 0), Jet(p.y(), 0));
    return {v.x.value(), v.y.value()};
}

SymTensor evaluate(const TensorFn& f, const Vec2& p)
{
    const auto m = f(Jet(p.x(), 0), Jet(p.y(), 0));
    return {m.xx.value(), m.xy.value(), m.yy.value()};
}

ScalarHessian second_order(const ScalarFn& f, const Vec2& p)
{
    const Jet j = expand(f, p, 2);
    ScalarHessian out;
    out.value = j.value();
    out.gradient = {j.derivative(1, 0), j.derivative(0, 1)};
    out.hessian = {j.derivative(2, 0), j.derivative(1, 1), j.derivative(0, 2)};
    return out;
}

double div_div(const SymTensorJet& m)
{
    return m.xx.derivative(2, 0) + 2.0 * m.xy.derivative(1, 1) + m.yy.derivative(0, 2);
}

} // namespace smectic::numerics
