#include "smectic/cases.hpp"
#include "smectic/error.hpp"
#include "smectic/uzawa.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace smectic;
using smectic::testing::classified;
using smectic::testing::mesh_family;
namespace num = smectic::numerics;

namespace {

NonlinearProblem trivial_problem(double angle)
{
    NonlinearProblem np;
    np.load = [](const Vec2&) { return 0.0; };
    np.clamp = [](const num::Jet&, const num::Jet&) { return num::Jet(0.0); };
    np.eta = [angle](const Vec2&) { return angle; };
    return np;
}

} // namespace

TEST(UzawaConfig, Validation)
{
    EXPECT_NO_THROW(UzawaConfig{}.validate());
    UzawaConfig c;
    c.alpha = 0.0;
    EXPECT_THROW(c.validate(), ConfigurationError);
    c = {};
    c.tol_M = -1.0;
    EXPECT_THROW(c.validate(), ConfigurationError);
    c = {};
    c.max_inner = 0;
    EXPECT_THROW(c.validate(), ConfigurationError);
    c = {};
    c.max_outer = 0;
    EXPECT_THROW(c.validate(), ConfigurationError);
}

TEST(Uzawa, ConstantAngleWithZeroDataIsAFixedPoint)
{
    ElementCache cache;
    const auto mesh = mesh_family(3)[2];
    const NonlinearSolution sol = uzawa_solve(classified(mesh, BoundaryTag::HardClamped), cache, trivial_problem(0.4));
    EXPECT_EQ(sol.log.status, UzawaStatus::Converged);
    EXPECT_EQ(sol.log.num_outer(), 1);
    EXPECT_EQ(sol.log.inner_total(), 1);
    EXPECT_EQ(sol.m.norm(), 0.0);
    for (double c : sol.u.coeffs) {
        EXPECT_EQ(c, 0.0);
    }
    EXPECT_LE((sol.phi.array() - 0.4).abs().maxCoeff(), 1e-14);
    EXPECT_NEAR(sol.energy, 0.0, 1e-28);
}

TEST(Uzawa, ManufacturedRunConvergesAndKeepsDirichletData)
{
    ElementCache cache;
    const Case c = nonlinear_manufactured(20.0);
    const auto mesh = mesh_family(3)[2];
    const NonlinearSolution sol =
        uzawa_solve(classify_boundary(mesh, c.boundary_spec(*mesh)), cache, c.nonlinear_problem());
    EXPECT_EQ(sol.log.status, UzawaStatus::Converged);
    EXPECT_LT(sol.log.final_res_M(), 1e-6);
    EXPECT_LE(sol.log.num_outer(), 25);
    for (const auto& o : sol.log.outer) {
        EXPECT_GE(o.res_M, 0.0);
        ASSERT_FALSE(o.res_phi.empty());
        for (double r : o.res_phi) {
            EXPECT_GE(r, 0.0);
        }
    }
    const Eigen::VectorXd trace = boundary_l2_projection(*sol.angle_space, c.eta);
    for (int d : sol.angle_space->boundary_dofs()) {
        EXPECT_EQ(sol.phi(d), trace(d));
    }
    // u_h is the P1 projection of u~ at the final pair
    const QuadTable& quad = *sol.quad;
    const P1Field again = project_p1(*mesh, quad.rule(), [&](int t, int k) { return sol.u_tilde[quad.index(t, k)]; });
    for (std::size_t i = 0; i < again.coeffs.size(); ++i) {
        EXPECT_NEAR(again.coeffs[i], sol.u.coeffs[i], 1e-12);
    }
    const NonlinearErrors e = compute_nonlinear_errors(sol, *c.exact_u, *c.exact_phi);
    EXPECT_TRUE(std::isfinite(e.err_L2) && std::isfinite(e.err_divdiv) && std::isfinite(e.err_u) &&
                std::isfinite(e.err_phi));
}

TEST(Uzawa, OuterCapIsAStatusNotAnError)
{
    ElementCache cache;
    const Case c = nonlinear_manufactured(20.0);
    const auto mesh = mesh_family(3)[2];
    UzawaConfig cfg;
    cfg.max_outer = 1;
    cfg.tol_M = 1e-30;
    const NonlinearSolution sol =
        uzawa_solve(classify_boundary(mesh, c.boundary_spec(*mesh)), cache, c.nonlinear_problem(), cfg);
    EXPECT_EQ(sol.log.status, UzawaStatus::OuterCapReached);
    EXPECT_EQ(sol.log.num_outer(), 1);
}

TEST(Uzawa, InitialAngleMustMatchBoundaryTrace)
{
    ElementCache cache;
    const auto mesh = mesh_family(2)[1];
    const P2Space space(mesh);
    Eigen::VectorXd bad = Eigen::VectorXd::Constant(space.num_dofs(), 1.0);
    EXPECT_THROW(uzawa_solve(classified(mesh, BoundaryTag::HardClamped), cache, trivial_problem(0.0), {}, {}, bad),
                 ConfigurationError);
    Eigen::VectorXd good = Eigen::VectorXd::Zero(space.num_dofs());
    good(space.interior_dofs()[0]) = 0.5;
    EXPECT_NO_THROW(uzawa_solve(classified(mesh, BoundaryTag::HardClamped), cache, trivial_problem(0.0), {}, {}, good));
}

TEST(Uzawa, MissingClampDataThrows)
{
    ElementCache cache;
    const auto mesh = mesh_family(2)[1];
    NonlinearProblem np = trivial_problem(0.0);
    np.clamp.reset();
    EXPECT_THROW(uzawa_solve(classified(mesh, BoundaryTag::HardClamped), cache, np), ConfigurationError);
    EXPECT_NO_THROW(uzawa_solve(classified(mesh, BoundaryTag::Free), cache, np));
}

TEST(HarmonicExtension, ReproducesLinearFunctions)
{
    const P2Space space(mesh_family(4)[3]);
    const auto f = [](const Vec2& x) { return 0.5 - x.x() + 2.0 * x.y(); };
    const Eigen::VectorXd exact = interpolate_p2(space, f);
    Eigen::VectorXd boundary = exact;
    for (int d : space.interior_dofs()) {
        boundary(d) = 99.0;
    }
    EXPECT_LE((harmonic_extension(space, boundary) - exact).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(DiscreteEnergy, ZeroAndLinearAngle)
{
    ElementCache cache;
    const auto mesh = mesh_family(3)[2];
    const HddSpace space(classified(mesh, BoundaryTag::HardClamped), cache);
    const P2Space aspace(mesh);
    const QuadTable quad(*mesh, 10);
    const Eigen::VectorXd m = Eigen::VectorXd::Zero(space.num_dofs());
    P1Field u;
    u.coeffs.assign(static_cast<std::size_t>(3 * mesh->num_triangles()), 0.0);
    const PointValues f(quad.size(), 0.0);
    const ModelParams p;
    EXPECT_EQ(discrete_energy(space, aspace, quad, m, u, Eigen::VectorXd::Zero(aspace.num_dofs()), f, p), 0.0);
    const Eigen::VectorXd phi = interpolate_p2(aspace, [](const Vec2& x) { return x.x(); });
    EXPECT_NEAR(discrete_energy(space, aspace, quad, m, u, phi, f, p), 0.5, 1e-14);
}

TEST(DiscreteEnergy, LoadAndDensityTerms)
{
    ElementCache cache;
    const auto mesh = mesh_family(2)[1];
    const HddSpace space(classified(mesh, BoundaryTag::HardClamped), cache);
    const P2Space aspace(mesh);
    const QuadTable quad(*mesh, 10);
    P1Field u;
    u.coeffs.assign(static_cast<std::size_t>(3 * mesh->num_triangles()), 2.0);
    const PointValues f(quad.size(), 3.0);
    const ModelParams p{0.5, 1.0, 1.0, 1.0};
    // (m/2) 4 - 3 * 2
    EXPECT_NEAR(discrete_energy(space, aspace, quad, Eigen::VectorXd::Zero(space.num_dofs()), u,
                                Eigen::VectorXd::Zero(aspace.num_dofs()), f, p),
                1.0 - 6.0, 1e-13);
}

TEST(EnergySequence, GeometricLimitAndShortInput)
{
    const std::vector<double> j{2.0 + 1.0, 2.0 + 0.25, 2.0 + 0.0625};
    const EnergySequence e = energy_error_nonlinear(j);
    EXPECT_NEAR(e.limit, 2.0, 1e-15);
    EXPECT_NEAR(e.error[0], 1.0, 1e-14);
    EXPECT_NEAR(e.error[2], 0.25, 1e-14);
    EXPECT_THROW(energy_error_nonlinear({1.0, 2.0}), ConfigurationError);
}

TEST(IterationLog, Statistics)
{
    IterationLog log;
    log.outer.push_back({1e-3, {1.0, 0.5}});
    log.outer.push_back({1e-7, {0.1, 0.01, 0.001, 1e-7}});
    EXPECT_EQ(log.num_outer(), 2);
    EXPECT_EQ(log.inner_total(), 6);
    EXPECT_DOUBLE_EQ(log.inner_mean(), 3.0);
    EXPECT_EQ(log.final_res_M(), 1e-7);
    EXPECT_EQ(to_string(UzawaStatus::Converged), "converged");
    EXPECT_EQ(to_string(UzawaStatus::OuterCapReached), "outer-cap-reached");
}
