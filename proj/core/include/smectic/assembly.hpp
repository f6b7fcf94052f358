#pragma once

#include "smectic/numerics/jet.hpp"
#include "smectic/numerics/quadrature.hpp"
#include "smectic/sparse_linalg.hpp"
#include "smectic/spaces.hpp"

#include <functional>
#include <vector>

namespace smectic {

/// Model constants: bulk weight m, smectic weight B, wave number q, Frank constant K.
struct ModelParams {
    double m = 1.0;
    double B = 1.0;
    double q = 1.0;
    double K = 1.0;

    /// Throws ConfigurationError unless m, q, K > 0 and 0 < B <= 1.
    void validate() const;
};

/// Physical quadrature points and weights for every triangle of a mesh. Point
/// k of triangle t is P0 + r (P1 - P0) + s (P2 - P0) for reference point (r, s).
class QuadTable {
public:
    QuadTable(const Mesh& mesh, int degree);

    const numerics::QuadratureRule& rule() const { return *rule_; }
    int degree() const { return rule_->degree; }
    int num_triangles() const { return num_triangles_; }
    int points_per_triangle() const { return nq_; }
    std::size_t index(int t, int k) const { return static_cast<std::size_t>(t * nq_ + k); }
    const Vec2& point(int t, int k) const { return points_[index(t, k)]; }
    double weight(int t, int k) const { return weights_[index(t, k)]; }
    const Vec2& reference_point(int k) const { return rule_->points[static_cast<std::size_t>(k)]; }
    std::size_t size() const { return points_.size(); }

private:
    const numerics::QuadratureRule* rule_;
    int num_triangles_;
    int nq_;
    std::vector<Vec2> points_;
    std::vector<double> weights_;
};

/// Values at all quadrature points of a QuadTable, indexed by QuadTable::index.
using PointValues = std::vector<double>;
using TensorValues = std::vector<SymTensor>;

/// Closed-form coefficient at quadrature points. A DomainError raised at a
/// point is rethrown as AssemblyError naming the element.
TensorValues tabulate_tensor(const QuadTable& quad, const std::function<SymTensor(const Vec2&)>& f);
PointValues tabulate_scalar(const QuadTable& quad, const std::function<double(const Vec2&)>& f);

/// Value and Hessian of the clamping data g at quadrature points.
struct HessianValues {
    PointValues value;
    TensorValues hessian;
};
HessianValues tabulate_hessian(const QuadTable& quad, const numerics::ScalarFn& g);

/// P2 angle field, T(phi_h) and T'(phi_h) at quadrature points.
PointValues tabulate_p2(const QuadTable& quad, const P2Space& space, const Eigen::VectorXd& phi);
TensorValues director_tensor_values(const PointValues& phi);
TensorValues director_tensor_derivative_values(const PointValues& phi);

/// Tensor field of the Hdd space and its divDiv at quadrature points.
struct HddValues {
    TensorValues value;
    PointValues div_div;
};
HddValues evaluate_hdd(const HddSpace& space, const QuadTable& quad, const Eigen::VectorXd& y);

/// Gram matrix of <M,N> = B (M,N) + (B^2/m) (divDiv M + q^2 T:M, divDiv N + q^2 T:N),
/// split into free-free and free-fixed blocks.
/// Gram matrix split into free/free and free/fixed blocks. Each block is the
/// unevaluated sum of a double matrix and a rounding correction on the same
/// pattern (double-double entries).
struct GramSystem {
    SparseMatrix free_free;
    SparseMatrix free_free_lo;
    SparseMatrix free_fixed;
    SparseMatrix free_fixed_lo;

    /// Right-hand side on free coefficients after moving the essential values.
    Eigen::VectorXd lifted(const HddSpace& space, const Eigen::VectorXd& load, const Eigen::VectorXd& y) const;
};

GramSystem assemble_gram(const HddSpace& space, const QuadTable& quad, const TensorValues& t, const ModelParams& p);

/// Load functional on every global coefficient:
///   (B/m)(f, divDiv dM + q^2 T:dM) - B sum_T [(divDiv dM, g)_T - (dM, grad grad g)_T].
/// `g` may be null (no clamping data).
Eigen::VectorXd assemble_load(const HddSpace& space, const QuadTable& quad, const TensorValues& t,
                              const ModelParams& p, const PointValues& f, const HessianValues* g);

/// Free-coefficient right-hand side including the essential lifting. Throws
/// ConfigurationError if a clamped, simply supported or soft clamped edge is
/// present and `g` is null.
Eigen::VectorXd assemble_rhs_linear(const HddSpace& space, const GramSystem& gram, const QuadTable& quad,
                                    const TensorValues& t, const ModelParams& p, const PointValues& f,
                                    const HessianValues* g, const Eigen::VectorXd& essential);

/// Energy inner product y1^T A y2 of two full coefficient vectors, evaluated
/// by quadrature.
double gram_inner(const HddSpace& space, const QuadTable& quad, const TensorValues& t, const ModelParams& p,
                  const Eigen::VectorXd& y1, const Eigen::VectorXd& y2);

/// Poisson stiffness K (grad, grad) on P2, interior rows.
struct PoissonSystem {
    SparseMatrix interior_interior;
    SparseMatrix interior_boundary;
};
PoissonSystem assemble_poisson(const P2Space& space, double k, int degree = 4);

/// Residual K (grad phi, grad d) + B q^2 (M : T'(phi) u, d) - (f_phi, d) on the
/// interior P2 functions. `f_phi` may be null.
Eigen::VectorXd assemble_phi_residual(const P2Space& space, const QuadTable& quad, const Eigen::VectorXd& phi,
                                      const TensorValues& m_values, const PointValues& u_values,
                                      const ModelParams& p, const PointValues* f_phi);

} // namespace smectic
