#include "smectic/error.hpp"
#include "smectic/numerics/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using smectic::numerics::edge_rule;
using smectic::numerics::triangle_rule;

namespace {

// int_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
double monomial_integral(int a, int b)
{
    return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
}

} // namespace

TEST(Quadrature, TenthPowerOracle)
{
    const auto& rule = triangle_rule(10);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        sum += rule.weights[k] * std::pow(rule.points[k].x(), 10);
    }
    EXPECT_NEAR(sum, 1.0 / 132.0, 1e-14);
}

TEST(Quadrature, ExactForAllMonomialsUpToDegree)
{
    for (int degree = 1; degree <= smectic::numerics::kMaxTriangleDegree; ++degree) {
        const auto& rule = triangle_rule(degree);
        EXPECT_GE(rule.degree, degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                double sum = 0.0;
                for (std::size_t k = 0; k < rule.size(); ++k) {
                    sum += rule.weights[k] * std::pow(rule.points[k].x(), a) * std::pow(rule.points[k].y(), b);
                }
                EXPECT_NEAR(sum, monomial_integral(a, b), 1e-14) << "degree " << degree << " x^" << a << " y^" << b;
            }
        }
    }
}

TEST(Quadrature, PositiveWeightsInsideTriangle)
{
    for (int degree = 1; degree <= smectic::numerics::kMaxTriangleDegree; ++degree) {
        const auto& rule = triangle_rule(degree);
        double total = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            EXPECT_GT(rule.weights[k], 0.0);
            EXPECT_GE(rule.points[k].x(), 0.0);
            EXPECT_GE(rule.points[k].y(), 0.0);
            EXPECT_LE(rule.points[k].x() + rule.points[k].y(), 1.0 + 1e-15);
            total += rule.weights[k];
        }
        EXPECT_NEAR(total, 0.5, 1e-15);
    }
}

TEST(Quadrature, EdgeRuleExactness)
{
    for (int n = 1; n <= smectic::numerics::kMaxEdgePoints; ++n) {
        const auto& rule = edge_rule(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double sum = 0.0;
            for (std::size_t k = 0; k < rule.size(); ++k) {
                sum += rule.weights[k] * std::pow(rule.points[k].x(), p);
            }
            EXPECT_NEAR(sum, 1.0 / (p + 1), 1e-14) << n << " points, x^" << p;
        }
    }
}

TEST(Quadrature, UnsupportedDegreeThrows)
{
    EXPECT_THROW(triangle_rule(0), smectic::ConfigurationError);
    EXPECT_THROW(triangle_rule(smectic::numerics::kMaxTriangleDegree + 1), smectic::ConfigurationError);
    EXPECT_THROW(edge_rule(0), smectic::ConfigurationError);
    EXPECT_THROW(edge_rule(smectic::numerics::kMaxEdgePoints + 1), smectic::ConfigurationError);
}

TEST(Quadrature, GaussJacobiWeightsIntegrateWeightFunction)
{
    std::vector<double> x;
    std::vector<double> w;
    smectic::numerics::gauss_jacobi(5, 1.0, 0.0, x, w);
    double sum = 0.0;
    for (double wi : w) {
        sum += wi;
    }
    // int_{-1}^{1} (1 - x) dx = 2
    EXPECT_NEAR(sum, 2.0, 1e-14);
}
