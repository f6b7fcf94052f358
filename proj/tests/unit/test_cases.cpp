#include "smectic/cases.hpp"
#include "smectic/error.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace smectic;
namespace num = smectic::numerics;
using num::Jet;

namespace {

constexpr double kPi = std::numbers::pi;

num::TensorFn angle_tensor_fn(const num::ScalarFn& phi)
{
    return [phi](const Jet& x, const Jet& y) {
        const Jet a = phi(x, y);
        const Jet c = num::cos(a);
        const Jet s = num::sin(a);
        return num::SymTensorJet{c * c, s * c, s * s};
    };
}

// f - B (divDiv M + q^2 T:M) - m u relative to |f|, with divDiv M from a
// fourth-order expansion of u.
double balance_defect(const Case& c, const num::TensorFn& t, const Vec2& x)
{
    const auto mfn = smectic::testing::manufactured_tensor_fn(*c.exact_u, t, c.params.q);
    const num::SymTensorJet mj = num::expand(mfn, x, 2);
    const SymTensor m{mj.xx.value(), mj.xy.value(), mj.yy.value()};
    const double q2 = c.params.q * c.params.q;
    const double u = num::evaluate(*c.exact_u, x);
    const double f = c.load(x);
    const double r = f - c.params.B * (num::div_div(mj) + q2 * contract(num::evaluate(t, x), m)) - c.params.m * u;
    return std::abs(r) / std::max(1.0, std::abs(f));
}

Vec2 random_interior(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.01, 0.99);
    return {u(rng), u(rng)};
}

} // namespace

TEST(LinearManufactured, ClosedFormValues)
{
    const Case c = linear_manufactured(1.0);
    // nu(., 1/2) = (1, 0), so u(1/2, 1/2) = sin(q / 2)
    EXPECT_NEAR(num::evaluate(*c.exact_u, Vec2(0.5, 0.5)), std::sin(0.5), 1e-15);
    EXPECT_NEAR(num::evaluate(*c.exact_u, Vec2(0.3, 0.5)), std::sin(0.3), 1e-15);
    EXPECT_EQ(linear_manufactured(20.0).params.B, 1.0 / 160000.0);
    EXPECT_EQ(c.params.m, 1.0);
    EXPECT_EQ(c.boundary, BoundaryTag::HardClamped);
}

TEST(LinearManufactured, BalanceHoldsAtRandomPoints)
{
    std::mt19937 rng(4);
    for (const double q : {1.0, 20.0, 40.0, 60.0}) {
        const Case c = linear_manufactured(q);
        const auto t = smectic::testing::dyad_fn(*c.director);
        for (int i = 0; i < 200; ++i) {
            EXPECT_LE(balance_defect(c, t, random_interior(rng)), 1e-8) << "q = " << q;
        }
    }
}

TEST(NonlinearManufactured, ClosedFormValues)
{
    const Case c = nonlinear_manufactured(20.0);
    for (const double x : {0.0, 0.3, 1.0}) {
        EXPECT_NEAR(num::evaluate(*c.exact_phi, Vec2(x, 0.0)), -kPi / 4.0, 1e-15);
        EXPECT_NEAR(c.eta(Vec2(x, 0.0)), -kPi / 4.0, 1e-15);
    }
    EXPECT_NEAR(nonlinear_manufactured(60.0).params.B, 1.0 / 12960000.0, 1e-22);
    EXPECT_EQ(c.params.K, 1.0);
}

TEST(NonlinearManufactured, BalanceAndAngleEquationHold)
{
    std::mt19937 rng(8);
    for (const double q : {1.0, 20.0}) {
        const Case c = nonlinear_manufactured(q);
        const auto t = angle_tensor_fn(*c.exact_phi);
        const auto mfn = smectic::testing::manufactured_tensor_fn(*c.exact_u, t, q);
        for (int i = 0; i < 200; ++i) {
            const Vec2 x = random_interior(rng);
            EXPECT_LE(balance_defect(c, t, x), 1e-8);
            // f_phi = -K lap phi + B q^2 (M : T'(phi)) u
            const num::DerivativeStack phi = num::jet(*c.exact_phi, x, 2);
            const SymTensor m = num::evaluate(mfn, x);
            const double u = num::evaluate(*c.exact_u, x);
            const double expect = -c.params.K * (phi(2, 0) + phi(0, 2)) +
                                  c.params.B * q * q * contract(m, director_tensor_derivative(phi(0, 0))) * u;
            EXPECT_NEAR(c.angle_source(x), expect, 1e-8 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST(Directors, ClosedFormValues)
{
    const auto nu1 = director_field(1);
    for (const double x : {0.0, 0.37, 1.0}) {
        const Vec2 v = num::evaluate(nu1, Vec2(x, 0.5));
        EXPECT_NEAR(v.x(), 1.0, 1e-15);
        EXPECT_NEAR(v.y(), 0.0, 1e-15);
    }
    const Vec2 v2 = num::evaluate(director_field(2), Vec2(0.25, 0.25));
    EXPECT_NEAR(v2.x(), 0.0, 1e-15);
    EXPECT_NEAR(v2.y(), -1.0, 1e-15);
}

TEST(Directors, AllKindsAreUnitVectors)
{
    std::mt19937 rng(12);
    for (int kind = 1; kind <= 3; ++kind) {
        const auto nu = director_field(kind);
        for (int i = 0; i < 1000; ++i) {
            Vec2 x = random_interior(rng);
            if (std::abs(x.x() - 0.5) < 1e-9 || std::abs(x.y() - 0.5) < 1e-9) {
                continue;
            }
            EXPECT_NEAR(num::evaluate(nu, x).norm(), 1.0, 1e-12);
        }
    }
}

TEST(Directors, SingularPointsRaiseDomainError)
{
    EXPECT_THROW(num::evaluate(director_field(3), Vec2(0.25, 0.5)), DomainError);
    EXPECT_THROW(num::evaluate(director_field(3), Vec2(0.75, 0.5)), DomainError);
    EXPECT_THROW(num::evaluate(director_field(2), Vec2(0.5, 0.3)), DomainError);
    EXPECT_THROW(director_field(4), ConfigurationError);
}

TEST(Eta, ClosedFormValues)
{
    EXPECT_NEAR(eta_field(1)(Vec2(0.3, 1.0)), kPi / 4.0, 1e-15);
    EXPECT_NEAR(eta_field(2)(Vec2(0.7, 0.5)), 0.0, 1e-15);
    EXPECT_NEAR(eta_field(3)(Vec2(0.25, 0.75)), kPi / 2.0, 1e-15);
    EXPECT_NEAR(eta_field(3)(Vec2(0.0, 0.25)), -kPi / 2.0, 1e-15);
}

TEST(UnknownSolution, Parameters)
{
    for (int kind = 1; kind <= 3; ++kind) {
        const Case c = unknown_solution_linear(kind);
        EXPECT_EQ(c.params.m, 1.0);
        EXPECT_EQ(c.params.B, 1e-5);
        EXPECT_EQ(c.params.q, 40.0);
        EXPECT_EQ(c.boundary, BoundaryTag::Free);
        EXPECT_FALSE(c.exact_u.has_value());
        EXPECT_EQ(c.load(Vec2(0.3, 0.6)), 1.0);
    }
}

TEST(CaseByName, AllNamesResolve)
{
    for (const auto& n : case_names()) {
        const Case c = case_by_name(n);
        EXPECT_EQ(c.name, n);
    }
    EXPECT_THROW(case_by_name("lin-field-4"), ConfigurationError);
    EXPECT_THROW(case_by_name("nope"), ConfigurationError);
}

TEST(CaseByName, Overrides)
{
    CaseOverrides o;
    o.q = 20.0;
    EXPECT_EQ(case_by_name("lin-manufactured", o).params.B, 1.0 / 160000.0);
    EXPECT_EQ(case_by_name("lin-field-1", o).params.q, 20.0);
    o.B = 0.5;
    EXPECT_THROW(case_by_name("lin-manufactured", o), ConfigurationError);
    EXPECT_EQ(case_by_name("lin-field-2", o).params.B, 0.5);
    CaseOverrides bad;
    bad.m = -1.0;
    EXPECT_THROW(case_by_name("lin-field-1", bad), ConfigurationError);
    CaseOverrides zero;
    zero.zero_load = true;
    EXPECT_EQ(case_by_name("nonlin-eta-1", zero).load(Vec2(0.2, 0.2)), 0.0);
}

TEST(CaseKinds, ProblemAccessorsMatchKind)
{
    EXPECT_THROW(case_by_name("lin-field-1").nonlinear_problem(), ConfigurationError);
    EXPECT_NO_THROW(case_by_name("nonlin-eta-2").nonlinear_problem());
    EXPECT_FALSE(case_by_name("nonlin-eta-3").energy_error_reported);
    EXPECT_TRUE(case_by_name("nonlin-eta-1").energy_error_reported);
}
