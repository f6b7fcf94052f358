#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>

namespace smectic {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Unevaluated sum hi + lo carrying roughly twice the double precision.
struct CompensatedVector {
    Eigen::VectorXd hi;
    Eigen::VectorXd lo;

    Eigen::VectorXd value() const { return hi + lo; }
};

struct SolveStats {
    double relative_residual = 0.0; ///< of the compensated iterate
    double rounded_residual = 0.0;  ///< of the iterate rounded to double
    int refinement_steps = 0;
};

/// b - (A + A_lo) x with error-free products and compensated sums. `a_lo` is
/// an optional rounding correction of A (may be null or empty).
CompensatedVector compensated_residual(const SparseMatrix& a, const SparseMatrix* a_lo, const CompensatedVector& x,
                                       const Eigen::VectorXd& b);

/// ||b - (A + A_lo) x|| / ||b|| evaluated with compensated_residual.
double relative_residual(const SparseMatrix& a, const SparseMatrix* a_lo, const CompensatedVector& x,
                         const Eigen::VectorXd& b);
double relative_residual(const SparseMatrix& a, const SparseMatrix* a_lo, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b);

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
///
/// The system matrix is A, or A + A_lo when a double-double correction is
/// supplied; only A is factored. The factored matrix is scaled symmetrically by its diagonal before factoring. Solves
/// use mixed-precision iterative refinement: the iterate is a double-double
/// vector, residuals are evaluated with compensated arithmetic and corrections
/// come from the double factor. Refinement stops once ||Ax - b|| / ||b|| of
/// the compensated iterate meets the requested bound.
class SpdFactorization {
public:
    /// Throws SolverError on non-positive pivots or a non-positive diagonal.
    explicit SpdFactorization(const SparseMatrix& a, const SparseMatrix& a_lo = {});

    Eigen::Index size() const { return a_.rows(); }
    const SparseMatrix& matrix() const { return a_; }

    /// Throws SolverError if the residual bound is not met after refinement.
    CompensatedVector solve_compensated(const Eigen::VectorXd& b, double rel_tol = 1e-12,
                                        SolveStats* stats = nullptr) const;
    /// solve_compensated rounded to double.
    Eigen::VectorXd solve(const Eigen::VectorXd& b, double rel_tol = 1e-12, SolveStats* stats = nullptr) const;

private:
    Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) const;

    SparseMatrix a_;
    SparseMatrix a_lo_;
    Eigen::VectorXd scale_;
    std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt_;
};

Eigen::VectorXd spd_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double rel_tol = 1e-12,
                          SolveStats* stats = nullptr, const SparseMatrix& a_lo = {});

/// max |A - A^T| / max |A|.
double symmetry_error(const SparseMatrix& a);

} // namespace smectic
