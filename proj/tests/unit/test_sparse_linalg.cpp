#include "smectic/error.hpp"
#include "smectic/numerics/compensated.hpp"
#include "smectic/sparse_linalg.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace smectic;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& d)
{
    return d.sparseView();
}

// 1D Laplacian with a tiny shift; condition number grows like n^2.
SparseMatrix laplacian(int n, double shift)
{
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0 + shift);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

} // namespace

TEST(SpdSolve, IdentityReturnsRightHandSide)
{
    const SparseMatrix a = from_dense(Eigen::MatrixXd::Identity(5, 5));
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, -2.0, 3.0);
    EXPECT_EQ((spd_solve(a, b) - b).norm(), 0.0);
}

TEST(SpdSolve, TwoByTwoHandSolve)
{
    Eigen::MatrixXd d(2, 2);
    d << 2, 1, 1, 2;
    const Eigen::VectorXd x = spd_solve(from_dense(d), Eigen::Vector2d(3, 3));
    EXPECT_NEAR(x(0), 1.0, 1e-15);
    EXPECT_NEAR(x(1), 1.0, 1e-15);
}

TEST(SpdSolve, MeetsResidualBoundOnIllConditionedMatrix)
{
    const SparseMatrix a = laplacian(2000, 1e-9);
    std::mt19937 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd b(a.rows());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        b(i) = n(rng);
    }
    SolveStats stats;
    const Eigen::VectorXd x = spd_solve(a, b, 1e-12, &stats);
    EXPECT_LE(stats.relative_residual, 1e-12);
    EXPECT_LE(relative_residual(a, nullptr, x, b), 1e-11);
}

TEST(SpdSolve, UsesLowPartOfMatrix)
{
    // A = hi + lo with lo below the resolution of hi entries
    const SparseMatrix hi = laplacian(50, 0.5);
    SparseMatrix lo = hi;
    lo *= 1e-17;
    const Eigen::VectorXd x_true = Eigen::VectorXd::LinSpaced(50, 1.0, 2.0);
    // b = (hi + lo) x computed in double-double
    Eigen::VectorXd b(50);
    const Eigen::VectorXd bh = hi * x_true;
    const Eigen::VectorXd bl = lo * x_true;
    b = bh + bl;
    SpdFactorization f(hi, lo);
    SolveStats stats;
    const CompensatedVector x = f.solve_compensated(b, 1e-14, &stats);
    EXPECT_LE(stats.relative_residual, 1e-14);
    EXPECT_LE(relative_residual(hi, &lo, x, b), 1e-14);
}

TEST(SpdSolve, CompensatedResidualIsExactForRepresentableData)
{
    Eigen::MatrixXd d(2, 2);
    d << 4, 1, 1, 3;
    const SparseMatrix a = from_dense(d);
    CompensatedVector x{Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1e-20, -1e-20)};
    const CompensatedVector r = compensated_residual(a, nullptr, x, Eigen::Vector2d(6.0, 7.0));
    // b - A x = -(A lo)
    EXPECT_DOUBLE_EQ(r.value()(0), -3e-20);
    EXPECT_DOUBLE_EQ(r.value()(1), 2e-20);
}

TEST(SpdSolve, IndefiniteMatrixThrows)
{
    Eigen::MatrixXd d(2, 2);
    d << 1, 2, 2, 1;
    EXPECT_THROW(SpdFactorization{from_dense(d)}, SolverError);
}

TEST(SpdSolve, NonPositiveDiagonalThrows)
{
    Eigen::MatrixXd d(2, 2);
    d << 0, 0, 0, 1;
    EXPECT_THROW(SpdFactorization{from_dense(d)}, SolverError);
}

TEST(SpdSolve, ShapeMismatchOfLowPartThrows)
{
    EXPECT_THROW(SpdFactorization(laplacian(4, 0.0), laplacian(3, 0.0)), Error);
}

TEST(SpdSolve, SymmetryError)
{
    Eigen::MatrixXd d(2, 2);
    d << 2, 1, 1.5, 2;
    EXPECT_NEAR(symmetry_error(from_dense(d)), 0.25, 1e-15);
    EXPECT_EQ(symmetry_error(laplacian(10, 0.0)), 0.0);
}

TEST(Compensated, TwoSumAndTwoProdAreExact)
{
    const auto s = numerics::two_sum(1.0, 1e-17);
    EXPECT_EQ(s.hi, 1.0);
    EXPECT_EQ(s.lo, 1e-17);
    const double a = 1.0 + std::ldexp(1.0, -30);
    const auto p = numerics::two_prod(a, a);
    EXPECT_EQ(p.hi, 1.0 + std::ldexp(1.0, -29));
    EXPECT_EQ(p.lo, std::ldexp(1.0, -60));
}

TEST(Compensated, AccumulationKeepsSmallTerms)
{
    numerics::DoubleDouble acc;
    acc += 1.0;
    for (int i = 0; i < 1000; ++i) {
        acc += 1e-17;
    }
    acc += -1.0;
    EXPECT_NEAR(acc.value(), 1e-14, 1e-28);
}
