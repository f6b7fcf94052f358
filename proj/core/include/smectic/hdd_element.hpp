#pragma once

#include "smectic/numerics/jet.hpp"
#include "smectic/numerics/quadrature.hpp"
#include "smectic/tensor.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace smectic {

/// Dimension of sym(RT0 (x) RT1) on a triangle.
inline constexpr int kLocalDofs = 15;

/// Local DOF layout. Edge i joins local vertices i and i+1 and owns slots
/// 4i..4i+3:
///
///     4i+0  <n.Mn, 1>_F        4i+2  <nDiv(M), 1>_F
///     4i+1  <n.Mn, 2s-1>_F     4i+3  <nDiv(M), 2s-1>_F
///
/// where s in [0,1] runs from vertex i to vertex i+1 and n is the outward
/// normal. Slot 12+i is the corner jump t2.Mn2 - t1.Mn1 at vertex i, with
/// F1 the edge ending at the vertex and F2 the edge starting there.
enum class DofKind { NormalMoment, ShearMoment, CornerJump };

constexpr DofKind dof_kind(int j)
{
    if (j >= 12) {
        return DofKind::CornerJump;
    }
    return (j % 4) < 2 ? DofKind::NormalMoment : DofKind::ShearMoment;
}

constexpr int edge_slot(int edge, int k) { return 4 * edge + k; }
constexpr int jump_slot(int vertex) { return 12 + vertex; }

using DofValues = Eigen::Matrix<double, kLocalDofs, 1>;
using Triangle = std::array<Vec2, 3>;

/// Symmetric tensor with its first partial derivatives at a point.
struct TensorSample {
    SymTensor value;
    SymTensor dx;
    SymTensor dy;
};

/// Evaluates the 15 DOF functionals of a tensor field on a triangle. The
/// sampler maps a point to the field value and first derivatives.
template <class Sampler>
DofValues evaluate_dofs(const Triangle& tri, Sampler&& sample, const numerics::QuadratureRule& rule)
{
    DofValues dofs = DofValues::Zero();
    std::array<Vec2, 3> tangent;
    std::array<Vec2, 3> normal;
    for (int i = 0; i < 3; ++i) {
        const Vec2& a = tri[static_cast<std::size_t>(i)];
        const Vec2& b = tri[static_cast<std::size_t>((i + 1) % 3)];
        const double length = (b - a).norm();
        const Vec2 t = (b - a) / length;
        const Vec2 n(t.y(), -t.x());
        tangent[static_cast<std::size_t>(i)] = t;
        normal[static_cast<std::size_t>(i)] = n;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const double s = rule.points[k].x();
            const double w = rule.weights[k] * length;
            const TensorSample q = sample(Vec2(a + s * (b - a)));
            const double nmn = q.value.bilinear(n, n);
            const Vec2 div(q.dx.xx + q.dy.xy, q.dx.xy + q.dy.yy);
            const SymTensor dt = t.x() * q.dx + t.y() * q.dy;
            const double ndiv = n.dot(div) + dt.bilinear(t, n);
            const double odd = 2.0 * s - 1.0;
            dofs(edge_slot(i, 0)) += w * nmn;
            dofs(edge_slot(i, 1)) += w * nmn * odd;
            dofs(edge_slot(i, 2)) += w * ndiv;
            dofs(edge_slot(i, 3)) += w * ndiv * odd;
        }
    }
    for (int i = 0; i < 3; ++i) {
        const auto in = static_cast<std::size_t>((i + 2) % 3);
        const auto out = static_cast<std::size_t>(i);
        const SymTensor q = sample(tri[static_cast<std::size_t>(i)]).value;
        dofs(jump_slot(i)) = q.bilinear(tangent[out], normal[out]) - q.bilinear(tangent[in], normal[in]);
    }
    return dofs;
}

/// Values and divDiv of the normalized basis at the points of a triangle rule.
struct ShapeTable {
    int num_points = 0;
    std::vector<SymTensor> value;  ///< [q * 15 + j]
    std::vector<double> div_div;   ///< [q * 15 + j]
};

/// Dual basis of sym(RT0 (x) RT1) for one triangle shape, expressed in the
/// normalized coordinates xi = (x - centroid) / diam. Shared between all
/// triangles that agree up to translation and scaling.
class ReferenceShape {
public:
    static constexpr int kCoeffs = 30; ///< 3 components x 10 cubic monomials

    explicit ReferenceShape(const Triangle& normalized);

    /// Coefficients of basis function j: [component * 10 + monomial].
    const Eigen::Matrix<double, kCoeffs, kLocalDofs>& coefficients() const { return coeffs_; }
    const Eigen::VectorXd& singular_values() const { return singular_values_; }
    const Triangle& normalized_vertices() const { return vertices_; }

    const ShapeTable& table(const numerics::QuadratureRule& rule) const;

private:
    Triangle vertices_;
    Eigen::Matrix<double, kCoeffs, kLocalDofs> coeffs_;
    Eigen::VectorXd singular_values_;
    mutable std::mutex mutex_;
    mutable std::map<int, ShapeTable> tables_;
};

/// The element X(T) on one physical triangle.
class LocalElement {
public:
    LocalElement(const Triangle& tri, std::shared_ptr<const ReferenceShape> shape);

    const Triangle& vertices() const { return vertices_; }
    const Vec2& centroid() const { return centroid_; }
    double diameter() const { return diameter_; }
    double area() const { return area_; }
    const ReferenceShape& shape() const { return *shape_; }

    /// Basis j at x = (normalized basis at xi) * value_scale(j).
    double value_scale(int j) const { return scale_[static_cast<std::size_t>(j)]; }
    double div_div_scale(int j) const { return scale_[static_cast<std::size_t>(j)] / (diameter_ * diameter_); }

    Vec2 normalized(const Vec2& x) const { return (x - centroid_) / diameter_; }

    SymTensor basis_value(int j, const Vec2& x) const;
    TensorSample basis_sample(int j, const Vec2& x) const;
    double basis_div_div(int j, const Vec2& x) const;

    /// Field sum_j dofs_j * basis_j.
    SymTensor value(const DofValues& dofs, const Vec2& x) const;
    TensorSample sample(const DofValues& dofs, const Vec2& x) const;
    double div_div(const DofValues& dofs, const Vec2& x) const;

    /// Field coefficients in the cubic monomial basis of normalized coordinates.
    Eigen::Matrix<double, ReferenceShape::kCoeffs, 1> polynomial(const DofValues& dofs) const;

private:
    Triangle vertices_;
    Vec2 centroid_;
    double diameter_;
    double area_;
    std::array<double, kLocalDofs> scale_;
    std::shared_ptr<const ReferenceShape> shape_;
};

/// Builds the dual basis of X(T). Throws ElementConstructionError when the
/// DOF matrix on the spanning set does not have rank 15.
LocalElement build_local_element(const Triangle& tri);

/// Reuses reference shapes between triangles equal up to translation and
/// scaling (uniform refinement produces few such classes).
class ElementCache {
public:
    LocalElement get(const Triangle& tri);
    std::size_t num_shapes() const;

private:
    mutable std::mutex mutex_;
    std::map<std::array<long long, 6>, std::shared_ptr<const ReferenceShape>> shapes_;
};

/// DOF functionals of a smooth symmetric tensor field.
DofValues eval_dofs(const Triangle& tri, const numerics::TensorFn& q, int edge_points = 6);

/// Local interpolant Pi^divdiv_T Q as coefficients in the dual basis.
DofValues interpolate_local(const LocalElement& element, const numerics::TensorFn& q, int edge_points = 6);

/// Sampler for closed-form tensor fields (order-1 jets).
TensorSample sample_tensor(const numerics::TensorFn& q, const Vec2& x);

} // namespace smectic
