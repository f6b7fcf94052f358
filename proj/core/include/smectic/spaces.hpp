#pragma once

#include "smectic/hdd_element.hpp"
#include "smectic/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace smectic {

/// One term of the map from global coefficients to a local DOF value.
struct DofEntry {
    int global;
    double coeff;
};

/// Global DOF map of the conforming subspace of H(div div) built from X(T).
///
/// Global coefficients come in two groups:
///   * four per edge, oriented along the stored edge direction (lower vertex
///     index first): <n.Mn,1>, <n.Mn,2s-1>, <nDiv,1>, <nDiv,2s-1>, with n the
///     left-rotated direction;
///   * vertex parameters. A vertex with k incident triangles owns k-1 jump
///     parameters if interior (the last jump is minus their sum), k-1 plus one
///     jump-sum parameter if its jump sum is essential, and k otherwise.
///
/// Local DOF j of triangle t equals sum_entries coeff * y[global]. Edge slots
/// carry the sign pattern (1, s, s, 1) with s = -1 when the local edge runs
/// against the global direction.
///
/// Essential coefficients (fixed by boundary conditions) are marked; all
/// others are free and numbered consecutively.
class HddSpace {
public:
    HddSpace(ClassifiedMesh mesh, ElementCache& cache);

    const ClassifiedMesh& classified() const { return mesh_; }
    const Mesh& mesh() const { return mesh_.mesh(); }
    const LocalElement& element(int t) const { return elements_[static_cast<std::size_t>(t)]; }

    int num_dofs() const { return static_cast<int>(free_index_.size()); }
    int num_free() const { return num_free_; }
    int num_fixed() const { return num_dofs() - num_free_; }
    bool is_fixed(int g) const { return free_index_[static_cast<std::size_t>(g)] < 0; }
    /// Position among free (or fixed) coefficients.
    int free_index(int g) const { return free_index_[static_cast<std::size_t>(g)]; }
    int fixed_index(int g) const { return fixed_index_[static_cast<std::size_t>(g)]; }
    const std::vector<int>& free_dofs() const { return free_dofs_; }
    const std::vector<int>& fixed_dofs() const { return fixed_dofs_; }

    int edge_dof(int e, int k) const { return 4 * e + k; }
    /// Jump-sum parameter of a vertex, or -1.
    int jump_sum_dof(int v) const { return jump_sum_dof_[static_cast<std::size_t>(v)]; }

    std::span<const DofEntry> local_map(int t, int j) const
    {
        const auto k = static_cast<std::size_t>(t * kLocalDofs + j);
        return {entries_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
    }

    /// Sign of local edge i of triangle t relative to the global direction.
    double edge_sign(int t, int i) const;

    /// Local DOF values of triangle t for the full coefficient vector y.
    DofValues local_dofs(const Eigen::VectorXd& y, int t) const;

    /// Scatter free values into a full vector that holds the fixed values.
    Eigen::VectorXd combine(const Eigen::VectorXd& free_values, const Eigen::VectorXd& fixed_values) const;
    Eigen::VectorXd restrict_free(const Eigen::VectorXd& y) const;
    Eigen::VectorXd restrict_fixed(const Eigen::VectorXd& y) const;

private:
    ClassifiedMesh mesh_;
    std::vector<LocalElement> elements_;
    std::vector<DofEntry> entries_;
    std::vector<std::size_t> offsets_;
    std::vector<int> free_index_;
    std::vector<int> fixed_index_;
    std::vector<int> free_dofs_;
    std::vector<int> fixed_dofs_;
    std::vector<int> jump_sum_dof_;
    int num_free_ = 0;
};

std::shared_ptr<const HddSpace> build_hdd_space(const ClassifiedMesh& mesh, ElementCache& cache);

/// Global interpolant of a conforming tensor field as a full coefficient
/// vector. Throws NonConformingInputError when local DOF values of
/// neighbouring elements disagree by more than 1e-8 (relative to the DOF
/// magnitude).
Eigen::VectorXd interpolate_global(const HddSpace& space, const numerics::TensorFn& q, int edge_points = 6);

/// Full coefficient vector carrying the essential values of G on the fixed
/// coefficients and zero elsewhere; zero when G is absent.
Eigen::VectorXd essential_values(const HddSpace& space, const numerics::TensorFn* g, int edge_points = 6);

/// Largest interface mismatch recomputed from element polynomials.
struct ConformityReport {
    double max_edge_mismatch = 0.0;
    double max_vertex_sum = 0.0; ///< interior vertices
    double max_local_dof = 0.0;  ///< scale reference
};

ConformityReport certify_conformity(const HddSpace& space, const Eigen::VectorXd& y);

/// Discontinuous piecewise linears, three vertex values per triangle.
struct P1Field {
    std::vector<double> coeffs; ///< [3 t + i], value at local vertex i

    /// Value at barycentric coordinates (1 - r - s, r, s) of triangle t.
    double value(int t, const Vec2& ref) const
    {
        const auto k = static_cast<std::size_t>(3 * t);
        return (1.0 - ref.x() - ref.y()) * coeffs[k] + ref.x() * coeffs[k + 1] + ref.y() * coeffs[k + 2];
    }
};

/// Element-wise L2 projection onto P1. `sample(t, k)` returns the function at
/// point k of `rule` mapped into triangle t.
P1Field project_p1(const Mesh& mesh, const numerics::QuadratureRule& rule,
                   const std::function<double(int t, int k)>& sample);

/// Continuous piecewise quadratics: vertex values first, then edge midpoints.
class P2Space {
public:
    explicit P2Space(std::shared_ptr<const Mesh> mesh);

    const Mesh& mesh() const { return *mesh_; }
    int num_dofs() const { return mesh_->num_vertices() + mesh_->num_edges(); }
    /// Local dofs of t: vertices 0..2 then edges 0..2 (edge i joins vertex i and i+1).
    std::array<int, 6> local_dofs(int t) const;
    bool is_boundary_dof(int d) const { return boundary_[static_cast<std::size_t>(d)]; }
    const std::vector<int>& interior_dofs() const { return interior_; }
    const std::vector<int>& boundary_dofs() const { return boundary_list_; }
    /// Position of d among interior dofs, or -1.
    int interior_index(int d) const { return interior_index_[static_cast<std::size_t>(d)]; }
    /// Node coordinates.
    Vec2 node(int d) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<bool> boundary_;
    std::vector<int> interior_;
    std::vector<int> boundary_list_;
    std::vector<int> interior_index_;
};

/// P2 shape functions on the reference triangle at (r, s) with gradients in
/// reference coordinates.
struct P2Shape {
    std::array<double, 6> value;
    std::array<Vec2, 6> grad_ref;
    explicit P2Shape(const Vec2& ref);
};

/// Value and physical gradient of a P2 field inside triangle t.
struct P2Sample {
    double value;
    Vec2 gradient;
};
P2Sample evaluate_p2(const P2Space& space, const Eigen::VectorXd& coeffs, int t, const Vec2& ref);

/// Interpolation of a smooth function at the P2 nodes.
Eigen::VectorXd interpolate_p2(const P2Space& space, const std::function<double(const Vec2&)>& f);

/// L2(boundary) projection of eta onto the trace of P2; interior entries are zero.
Eigen::VectorXd boundary_l2_projection(const P2Space& space, const std::function<double(const Vec2&)>& eta,
                                       int edge_points = 8);

} // namespace smectic
