#pragma once

#include "smectic/tensor.hpp"

#include <array>
#include <utility>

namespace smectic::numerics::poly {

/// Number of monomials x^i y^j with i + j <= degree.
constexpr int size(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Graded ordering: 1, x, y, x^2, xy, y^2, x^3, ...
constexpr int index(int i, int j)
{
    const int d = i + j;
    return d * (d + 1) / 2 + j;
}

constexpr std::pair<int, int> exponents(int k)
{
    int d = 0;
    while (size(d) <= k) {
        ++d;
    }
    const int j = k - size(d - 1);
    return {d - j, j};
}

/// Monomials up to cubic degree and their derivatives up to second order,
/// tabulated at one point.
struct CubicMonomials {
    static constexpr int kDegree = 3;
    static constexpr int kSize = size(kDegree);

    std::array<double, kSize> value{};
    std::array<double, kSize> dx{};
    std::array<double, kSize> dy{};
    std::array<double, kSize> dxx{};
    std::array<double, kSize> dxy{};
    std::array<double, kSize> dyy{};

    explicit CubicMonomials(const Vec2& p)
    {
        std::array<double, kDegree + 1> px{1.0, 0.0, 0.0, 0.0};
        std::array<double, kDegree + 1> py{1.0, 0.0, 0.0, 0.0};
        for (int k = 1; k <= kDegree; ++k) {
            px[static_cast<std::size_t>(k)] = px[static_cast<std::size_t>(k - 1)] * p.x();
            py[static_cast<std::size_t>(k)] = py[static_cast<std::size_t>(k - 1)] * p.y();
        }
        auto pw = [](const std::array<double, kDegree + 1>& a, int e) {
            return e < 0 ? 0.0 : a[static_cast<std::size_t>(e)];
        };
        for (int k = 0; k < kSize; ++k) {
            const auto [i, j] = exponents(k);
            const auto s = static_cast<std::size_t>(k);
            value[s] = pw(px, i) * pw(py, j);
            dx[s] = i * pw(px, i - 1) * pw(py, j);
            dy[s] = j * pw(px, i) * pw(py, j - 1);
            dxx[s] = i * (i - 1) * pw(px, i - 2) * pw(py, j);
            dxy[s] = i * j * pw(px, i - 1) * pw(py, j - 1);
            dyy[s] = j * (j - 1) * pw(px, i) * pw(py, j - 2);
        }
    }
};

} // namespace smectic::numerics::poly
