#include "smectic/sparse_linalg.hpp"

#include "smectic/error.hpp"
#include "smectic/numerics/compensated.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace smectic {

namespace {

constexpr int kMaxRefinement = 10;

void add_compensated(CompensatedVector& x, const Eigen::VectorXd& d)
{
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        numerics::DoubleDouble v{x.hi(i), x.lo(i)};
        v += d(i);
        x.hi(i) = v.hi;
        x.lo(i) = v.lo;
    }
}

} // namespace

SpdFactorization::SpdFactorization(const SparseMatrix& a, const SparseMatrix& a_lo) : a_(a), a_lo_(a_lo)
{
    if (a_lo.size() > 0 && (a_lo.rows() != a.rows() || a_lo.cols() != a.cols())) {
        throw SolverError("spd_solve: correction matrix has the wrong shape");
    }
    if (a.rows() != a.cols()) {
        throw SolverError("spd_solve: matrix is not square");
    }
    const Eigen::Index n = a.rows();
    scale_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = a.coeff(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) {
            std::ostringstream msg;
            msg << "spd_solve: non-positive diagonal entry " << d << " at row " << i;
            throw SolverError(msg.str());
        }
        scale_(i) = 1.0 / std::sqrt(d);
    }
    const SparseMatrix scaled = scale_.asDiagonal() * a * scale_.asDiagonal();
    llt_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(scaled);
    if (llt_->info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "spd_solve: Cholesky factorization failed (matrix of size " << n << " is not positive definite)";
        throw SolverError(msg.str());
    }
}

Eigen::VectorXd SpdFactorization::raw_solve(const Eigen::VectorXd& b) const
{
    const Eigen::VectorXd y = llt_->solve(scale_.cwiseProduct(b));
    return scale_.cwiseProduct(y);
}

CompensatedVector SpdFactorization::solve_compensated(const Eigen::VectorXd& b, double rel_tol,
                                                     SolveStats* stats) const
{
    if (b.size() != size()) {
        throw SolverError("spd_solve: right-hand side has the wrong size");
    }
    const double bnorm = b.norm();
    CompensatedVector x{Eigen::VectorXd::Zero(size()), Eigen::VectorXd::Zero(size())};
    if (bnorm == 0.0) {
        if (stats != nullptr) {
            *stats = {};
        }
        return x;
    }
    x.hi = raw_solve(b);
    CompensatedVector r = compensated_residual(a_, &a_lo_, x, b);
    double rel = r.value().norm() / bnorm;
    int steps = 0;
    double best = rel;
    CompensatedVector best_x = x;
    while (rel > rel_tol && steps < kMaxRefinement) {
        add_compensated(x, raw_solve(r.value()));
        r = compensated_residual(a_, &a_lo_, x, b);
        rel = r.value().norm() / bnorm;
        ++steps;
        if (rel < best) {
            best = rel;
            best_x = x;
        } else if (steps > 3) {
            break; // stagnation
        }
    }
    if (stats != nullptr) {
        *stats = {best, relative_residual(a_, &a_lo_, best_x.value(), b), steps};
    }
    if (!(best <= rel_tol)) {
        std::ostringstream msg;
        msg << "spd_solve: relative residual " << best << " exceeds " << rel_tol << " after " << steps
            << " refinement steps (size " << size() << ")";
        throw SolverError(msg.str());
    }
    return best_x;
}

Eigen::VectorXd SpdFactorization::solve(const Eigen::VectorXd& b, double rel_tol, SolveStats* stats) const
{
    return solve_compensated(b, rel_tol, stats).value();
}

CompensatedVector compensated_residual(const SparseMatrix& a, const SparseMatrix* a_lo, const CompensatedVector& x,
                                       const Eigen::VectorXd& b)
{
    std::vector<numerics::DoubleDouble> acc(static_cast<std::size_t>(b.size()));
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        acc[static_cast<std::size_t>(i)].hi = b(i);
    }
    auto subtract = [&](const SparseMatrix& m, bool with_lo) {
        for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
            const double xh = x.hi(k);
            const double xl = x.lo(k);
            for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
                numerics::DoubleDouble p = numerics::two_prod(-it.value(), xh);
                if (with_lo) {
                    p.lo -= it.value() * xl;
                }
                acc[static_cast<std::size_t>(it.row())] += p;
            }
        }
    };
    subtract(a, true);
    if (a_lo != nullptr && a_lo->size() > 0) {
        subtract(*a_lo, false);
    }
    CompensatedVector r{Eigen::VectorXd(b.size()), Eigen::VectorXd(b.size())};
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        r.hi(i) = acc[static_cast<std::size_t>(i)].hi;
        r.lo(i) = acc[static_cast<std::size_t>(i)].lo;
    }
    return r;
}

double relative_residual(const SparseMatrix& a, const SparseMatrix* a_lo, const CompensatedVector& x,
                         const Eigen::VectorXd& b)
{
    const double bnorm = b.norm();
    const double rnorm = compensated_residual(a, a_lo, x, b).value().norm();
    return bnorm == 0.0 ? rnorm : rnorm / bnorm;
}

double relative_residual(const SparseMatrix& a, const SparseMatrix* a_lo, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b)
{
    return relative_residual(a, a_lo, CompensatedVector{x, Eigen::VectorXd::Zero(x.size())}, b);
}

Eigen::VectorXd spd_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double rel_tol, SolveStats* stats,
                          const SparseMatrix& a_lo)
{
    return SpdFactorization(a, a_lo).solve(b, rel_tol, stats);
}

double symmetry_error(const SparseMatrix& a)
{
    const SparseMatrix at = a.transpose();
    const SparseMatrix d = a - at;
    double dmax = 0.0;
    for (Eigen::Index k = 0; k < d.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(d, k); it; ++it) {
            dmax = std::max(dmax, std::abs(it.value()));
        }
    }
    double amax = 0.0;
    for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            amax = std::max(amax, std::abs(it.value()));
        }
    }
    return amax == 0.0 ? 0.0 : dmax / amax;
}

} // namespace smectic
