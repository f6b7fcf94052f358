#include "smectic/spaces.hpp"

#include "smectic/error.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smectic {

namespace {

bool edge_component_fixed(BoundaryTag tag, int k)
{
    switch (tag) {
    case BoundaryTag::HardClamped:
        return false;
    case BoundaryTag::SimplySupported:
        return k < 2;
    case BoundaryTag::SoftClamped:
        return k >= 2;
    case BoundaryTag::Free:
        return true;
    }
    return false;
}

// Global value = pattern * local value for edge slot k.
double slot_sign(int k, double sigma) { return (k == 1 || k == 2) ? sigma : 1.0; }

enum class VertexKind { Interior, ConstrainedBoundary, FreeBoundary };

VertexKind vertex_kind(const ClassifiedMesh& cm, int v)
{
    const auto& info = cm.vertex_info(v);
    if (!info.on_boundary) {
        return VertexKind::Interior;
    }
    return info.jump_constrained ? VertexKind::ConstrainedBoundary : VertexKind::FreeBoundary;
}

std::vector<DofValues> all_local_dofs(const HddSpace& space, const numerics::TensorFn& q, int edge_points,
                                      const std::vector<bool>* needed = nullptr)
{
    const Mesh& mesh = space.mesh();
    std::vector<DofValues> d(static_cast<std::size_t>(mesh.num_triangles()), DofValues::Zero());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (needed == nullptr || (*needed)[static_cast<std::size_t>(t)]) {
            d[static_cast<std::size_t>(t)] = eval_dofs(mesh.triangle_points(t), q, edge_points);
        }
    }
    return d;
}

void check_match(double a, double b, double scale, const char* what, int entity)
{
    if (std::abs(a - b) > 1e-8 * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << "interpolate_global: " << what << " mismatch " << std::abs(a - b) << " at entity " << entity
            << "; the field is not conforming";
        throw NonConformingInputError(msg.str());
    }
}

} // namespace

HddSpace::HddSpace(ClassifiedMesh cm, ElementCache& cache) : mesh_(std::move(cm))
{
    const Mesh& mesh = mesh_.mesh();
    const int nt = mesh.num_triangles();
    elements_.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        elements_.push_back(cache.get(mesh.triangle_points(t)));
    }

    int next = 4 * mesh.num_edges();
    std::vector<bool> fixed(static_cast<std::size_t>(next), false);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (const auto& tag = mesh_.tag(e)) {
            for (int k = 0; k < 4; ++k) {
                fixed[static_cast<std::size_t>(4 * e + k)] = edge_component_fixed(*tag, k);
            }
        }
    }

    // Vertex parameters and the local jump maps they induce.
    std::vector<std::vector<DofEntry>> jump_map(static_cast<std::size_t>(nt) * 3);
    jump_sum_dof_.assign(static_cast<std::size_t>(mesh.num_vertices()), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto& inc = mesh.vertex_triangles(v);
        const int k = static_cast<int>(inc.size());
        const VertexKind kind = vertex_kind(mesh_, v);
        const int n_params = kind == VertexKind::FreeBoundary ? k : k - 1;
        const int base = next;
        next += n_params;
        fixed.resize(static_cast<std::size_t>(next), false);
        if (kind == VertexKind::ConstrainedBoundary) {
            jump_sum_dof_[static_cast<std::size_t>(v)] = next;
            fixed.push_back(true);
            ++next;
        }
        for (int p = 0; p < k; ++p) {
            const auto [t, lv] = inc[static_cast<std::size_t>(p)];
            auto& m = jump_map[static_cast<std::size_t>(3 * t + lv)];
            if (p < n_params) {
                m.push_back({base + p, 1.0});
                continue;
            }
            for (int o = 0; o < n_params; ++o) {
                m.push_back({base + o, -1.0});
            }
            if (kind == VertexKind::ConstrainedBoundary) {
                m.push_back({jump_sum_dof_[static_cast<std::size_t>(v)], 1.0});
            }
        }
    }

    offsets_.reserve(static_cast<std::size_t>(nt) * kLocalDofs + 1);
    offsets_.push_back(0);
    for (int t = 0; t < nt; ++t) {
        const auto& te = mesh.triangle_edges(t);
        for (int i = 0; i < 3; ++i) {
            const double sigma = edge_sign(t, i);
            for (int k = 0; k < 4; ++k) {
                entries_.push_back({4 * te[static_cast<std::size_t>(i)] + k, slot_sign(k, sigma)});
                offsets_.push_back(entries_.size());
            }
        }
        for (int i = 0; i < 3; ++i) {
            const auto& m = jump_map[static_cast<std::size_t>(3 * t + i)];
            entries_.insert(entries_.end(), m.begin(), m.end());
            offsets_.push_back(entries_.size());
        }
    }

    free_index_.assign(static_cast<std::size_t>(next), -1);
    fixed_index_.assign(static_cast<std::size_t>(next), -1);
    for (int g = 0; g < next; ++g) {
        if (fixed[static_cast<std::size_t>(g)]) {
            fixed_index_[static_cast<std::size_t>(g)] = static_cast<int>(fixed_dofs_.size());
            fixed_dofs_.push_back(g);
        } else {
            free_index_[static_cast<std::size_t>(g)] = static_cast<int>(free_dofs_.size());
            free_dofs_.push_back(g);
        }
    }
    num_free_ = static_cast<int>(free_dofs_.size());
}

double HddSpace::edge_sign(int t, int i) const
{
    const auto& tri = mesh().triangle(t);
    return tri[static_cast<std::size_t>(i)] < tri[static_cast<std::size_t>((i + 1) % 3)] ? 1.0 : -1.0;
}

DofValues HddSpace::local_dofs(const Eigen::VectorXd& y, int t) const
{
    DofValues d;
    for (int j = 0; j < kLocalDofs; ++j) {
        double s = 0.0;
        for (const auto& e : local_map(t, j)) {
            s += e.coeff * y(e.global);
        }
        d(j) = s;
    }
    return d;
}

Eigen::VectorXd HddSpace::combine(const Eigen::VectorXd& free_values, const Eigen::VectorXd& fixed_values) const
{
    Eigen::VectorXd y(num_dofs());
    for (std::size_t i = 0; i < free_dofs_.size(); ++i) {
        y(free_dofs_[i]) = free_values(static_cast<Eigen::Index>(i));
    }
    for (std::size_t i = 0; i < fixed_dofs_.size(); ++i) {
        y(fixed_dofs_[i]) = fixed_values(static_cast<Eigen::Index>(i));
    }
    return y;
}

Eigen::VectorXd HddSpace::restrict_free(const Eigen::VectorXd& y) const
{
    Eigen::VectorXd r(num_free());
    for (std::size_t i = 0; i < free_dofs_.size(); ++i) {
        r(static_cast<Eigen::Index>(i)) = y(free_dofs_[i]);
    }
    return r;
}

Eigen::VectorXd HddSpace::restrict_fixed(const Eigen::VectorXd& y) const
{
    Eigen::VectorXd r(num_fixed());
    for (std::size_t i = 0; i < fixed_dofs_.size(); ++i) {
        r(static_cast<Eigen::Index>(i)) = y(fixed_dofs_[i]);
    }
    return r;
}

std::shared_ptr<const HddSpace> build_hdd_space(const ClassifiedMesh& mesh, ElementCache& cache)
{
    return std::make_shared<const HddSpace>(mesh, cache);
}

Eigen::VectorXd interpolate_global(const HddSpace& space, const numerics::TensorFn& q, int edge_points)
{
    const Mesh& mesh = space.mesh();
    const auto d = all_local_dofs(space, q, edge_points);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(space.num_dofs());
    double scale = 0.0;
    for (const auto& dt : d) {
        scale = std::max(scale, dt.cwiseAbs().maxCoeff());
    }

    auto local_index = [&](int t, int e) {
        const auto& te = mesh.triangle_edges(t);
        return static_cast<int>(std::find(te.begin(), te.end(), e) - te.begin());
    };
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& adj = mesh.edge_triangles(e);
        const int i0 = local_index(adj[0], e);
        const double s0 = space.edge_sign(adj[0], i0);
        for (int k = 0; k < 4; ++k) {
            y(space.edge_dof(e, k)) = slot_sign(k, s0) * d[static_cast<std::size_t>(adj[0])](edge_slot(i0, k));
        }
        if (adj[1] >= 0) {
            const int i1 = local_index(adj[1], e);
            const double s1 = space.edge_sign(adj[1], i1);
            for (int k = 0; k < 4; ++k) {
                check_match(y(space.edge_dof(e, k)),
                            slot_sign(k, s1) * d[static_cast<std::size_t>(adj[1])](edge_slot(i1, k)), scale,
                            "edge moment", e);
            }
        }
    }

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto& inc = mesh.vertex_triangles(v);
        const VertexKind kind = vertex_kind(space.classified(), v);
        double sum = 0.0;
        for (const auto& [t, lv] : inc) {
            const double jump = d[static_cast<std::size_t>(t)](jump_slot(lv));
            sum += jump;
            // The first incidence determines the parameter slot of every
            // free jump; read it back through the local map.
            const auto m = space.local_map(t, jump_slot(lv));
            if (m.size() == 1 && m[0].coeff == 1.0 && m[0].global != space.jump_sum_dof(v)) {
                y(m[0].global) = jump;
            }
        }
        if (kind == VertexKind::Interior) {
            check_match(sum, 0.0, scale, "vertex jump sum", v);
        } else if (kind == VertexKind::ConstrainedBoundary) {
            y(space.jump_sum_dof(v)) = sum;
        }
    }
    return y;
}

Eigen::VectorXd essential_values(const HddSpace& space, const numerics::TensorFn* g, int edge_points)
{
    Eigen::VectorXd y = Eigen::VectorXd::Zero(space.num_dofs());
    if (g == nullptr || space.num_fixed() == 0) {
        return y;
    }
    const Mesh& mesh = space.mesh();
    std::vector<bool> needed(static_cast<std::size_t>(mesh.num_triangles()), false);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int v : mesh.triangle(t)) {
            needed[static_cast<std::size_t>(t)] = needed[static_cast<std::size_t>(t)] || mesh.is_boundary_vertex(v);
        }
    }
    const auto d = all_local_dofs(space, *g, edge_points, &needed);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (!needed[static_cast<std::size_t>(t)]) {
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            const int e = mesh.triangle_edges(t)[static_cast<std::size_t>(i)];
            if (!mesh.is_boundary_edge(e)) {
                continue;
            }
            for (int k = 0; k < 4; ++k) {
                y(space.edge_dof(e, k)) = slot_sign(k, space.edge_sign(t, i)) * d[static_cast<std::size_t>(t)](edge_slot(i, k));
            }
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (space.jump_sum_dof(v) < 0) {
            continue;
        }
        double sum = 0.0;
        for (const auto& [t, lv] : mesh.vertex_triangles(v)) {
            sum += d[static_cast<std::size_t>(t)](jump_slot(lv));
        }
        y(space.jump_sum_dof(v)) = sum;
    }
    for (int g_idx = 0; g_idx < space.num_dofs(); ++g_idx) {
        if (!space.is_fixed(g_idx)) {
            y(g_idx) = 0.0;
        }
    }
    return y;
}

ConformityReport certify_conformity(const HddSpace& space, const Eigen::VectorXd& y)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = numerics::edge_rule(6);
    std::vector<DofValues> d(static_cast<std::size_t>(mesh.num_triangles()));
    ConformityReport report;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const LocalElement& el = space.element(t);
        const DofValues coeffs = space.local_dofs(y, t);
        d[static_cast<std::size_t>(t)] =
            evaluate_dofs(el.vertices(), [&](const Vec2& x) { return el.sample(coeffs, x); }, rule);
        report.max_local_dof = std::max(report.max_local_dof, d[static_cast<std::size_t>(t)].cwiseAbs().maxCoeff());
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& adj = mesh.edge_triangles(e);
        if (adj[1] < 0) {
            continue;
        }
        std::array<std::array<double, 4>, 2> global{};
        for (int side = 0; side < 2; ++side) {
            const int t = adj[static_cast<std::size_t>(side)];
            const auto& te = mesh.triangle_edges(t);
            const int i = static_cast<int>(std::find(te.begin(), te.end(), e) - te.begin());
            // Orientation recomputed from coordinates, independent of the DOF map.
            const Vec2 a = mesh.vertex(mesh.edge(e)[0]);
            const Vec2 b = mesh.vertex(mesh.edge(e)[1]);
            const auto p = mesh.triangle_points(t);
            const Vec2 local_dir = p[static_cast<std::size_t>((i + 1) % 3)] - p[static_cast<std::size_t>(i)];
            const double sigma = local_dir.dot(b - a) > 0.0 ? 1.0 : -1.0;
            for (int k = 0; k < 4; ++k) {
                global[static_cast<std::size_t>(side)][static_cast<std::size_t>(k)] =
                    slot_sign(k, sigma) * d[static_cast<std::size_t>(t)](edge_slot(i, k));
            }
        }
        for (std::size_t k = 0; k < 4; ++k) {
            report.max_edge_mismatch = std::max(report.max_edge_mismatch, std::abs(global[0][k] - global[1][k]));
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (mesh.is_boundary_vertex(v)) {
            continue;
        }
        double sum = 0.0;
        for (const auto& [t, lv] : mesh.vertex_triangles(v)) {
            sum += d[static_cast<std::size_t>(t)](jump_slot(lv));
        }
        report.max_vertex_sum = std::max(report.max_vertex_sum, std::abs(sum));
    }
    return report;
}

P1Field project_p1(const Mesh& mesh, const numerics::QuadratureRule& rule,
                   const std::function<double(int t, int k)>& sample)
{
    P1Field field;
    field.coeffs.resize(3 * static_cast<std::size_t>(mesh.num_triangles()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = mesh.area(t);
        Eigen::Vector3d b = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const Vec2& r = rule.points[k];
            const double w = rule.weights[k] * 2.0 * area * sample(t, static_cast<int>(k));
            b += w * Eigen::Vector3d(1.0 - r.x() - r.y(), r.x(), r.y());
        }
        // Inverse of the P1 mass matrix (area / 12) [[2,1,1],[1,2,1],[1,1,2]].
        const double s = b.sum();
        for (int i = 0; i < 3; ++i) {
            field.coeffs[static_cast<std::size_t>(3 * t + i)] = (3.0 / area) * (4.0 * b(i) - s);
        }
    }
    return field;
}

P2Space::P2Space(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh))
{
    const int nv = mesh_->num_vertices();
    boundary_.assign(static_cast<std::size_t>(num_dofs()), false);
    for (int v = 0; v < nv; ++v) {
        boundary_[static_cast<std::size_t>(v)] = mesh_->is_boundary_vertex(v);
    }
    for (int e = 0; e < mesh_->num_edges(); ++e) {
        boundary_[static_cast<std::size_t>(nv + e)] = mesh_->is_boundary_edge(e);
    }
    interior_index_.assign(static_cast<std::size_t>(num_dofs()), -1);
    for (int d = 0; d < num_dofs(); ++d) {
        if (boundary_[static_cast<std::size_t>(d)]) {
            boundary_list_.push_back(d);
        } else {
            interior_index_[static_cast<std::size_t>(d)] = static_cast<int>(interior_.size());
            interior_.push_back(d);
        }
    }
}

std::array<int, 6> P2Space::local_dofs(int t) const
{
    const auto& tri = mesh_->triangle(t);
    const auto& te = mesh_->triangle_edges(t);
    const int nv = mesh_->num_vertices();
    return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

Vec2 P2Space::node(int d) const
{
    const int nv = mesh_->num_vertices();
    return d < nv ? mesh_->vertex(d) : mesh_->edge_midpoint(d - nv);
}

P2Shape::P2Shape(const Vec2& ref)
{
    const std::array<double, 3> l{1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
    const std::array<Vec2, 3> gl{Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t j = (i + 1) % 3;
        value[i] = l[i] * (2.0 * l[i] - 1.0);
        grad_ref[i] = (4.0 * l[i] - 1.0) * gl[i];
        value[3 + i] = 4.0 * l[i] * l[j];
        grad_ref[3 + i] = 4.0 * (l[j] * gl[i] + l[i] * gl[j]);
    }
}

P2Sample evaluate_p2(const P2Space& space, const Eigen::VectorXd& coeffs, int t, const Vec2& ref)
{
    const auto p = space.mesh().triangle_points(t);
    Eigen::Matrix2d jac;
    jac.col(0) = p[1] - p[0];
    jac.col(1) = p[2] - p[0];
    const Eigen::Matrix2d inv_t = jac.inverse().transpose();
    const P2Shape shape(ref);
    const auto dofs = space.local_dofs(t);
    P2Sample s{0.0, Vec2::Zero()};
    Vec2 g_ref = Vec2::Zero();
    for (std::size_t i = 0; i < 6; ++i) {
        const double c = coeffs(dofs[i]);
        s.value += c * shape.value[i];
        g_ref += c * shape.grad_ref[i];
    }
    s.gradient = inv_t * g_ref;
    return s;
}

Eigen::VectorXd interpolate_p2(const P2Space& space, const std::function<double(const Vec2&)>& f)
{
    Eigen::VectorXd c(space.num_dofs());
    for (int d = 0; d < space.num_dofs(); ++d) {
        c(d) = f(space.node(d));
    }
    return c;
}

Eigen::VectorXd boundary_l2_projection(const P2Space& space, const std::function<double(const Vec2&)>& eta,
                                       int edge_points)
{
    const Mesh& mesh = space.mesh();
    const auto& bd = space.boundary_dofs();
    std::vector<int> pos(static_cast<std::size_t>(space.num_dofs()), -1);
    for (std::size_t i = 0; i < bd.size(); ++i) {
        pos[static_cast<std::size_t>(bd[i])] = static_cast<int>(i);
    }
    const auto& rule = numerics::edge_rule(edge_points);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bd.size()));
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) {
            continue;
        }
        const Vec2 a = mesh.vertex(mesh.edge(e)[0]);
        const Vec2 b = mesh.vertex(mesh.edge(e)[1]);
        const double len = (b - a).norm();
        const std::array<int, 3> idx{pos[static_cast<std::size_t>(mesh.edge(e)[0])],
                                     pos[static_cast<std::size_t>(mesh.edge(e)[1])],
                                     pos[static_cast<std::size_t>(mesh.num_vertices() + e)]};
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const double s = rule.points[k].x();
            const double w = rule.weights[k] * len;
            const Eigen::Vector3d phi((1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s));
            m += w * phi * phi.transpose();
            const double value = eta(a + s * (b - a));
            for (int i = 0; i < 3; ++i) {
                rhs(idx[static_cast<std::size_t>(i)]) += w * value * phi(i);
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                trips.emplace_back(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)], m(i, j));
            }
        }
    }
    Eigen::SparseMatrix<double> mass(static_cast<Eigen::Index>(bd.size()), static_cast<Eigen::Index>(bd.size()));
    mass.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mass);
    if (solver.info() != Eigen::Success) {
        throw SolverError("boundary_l2_projection: boundary mass matrix factorization failed");
    }
    const Eigen::VectorXd x = solver.solve(rhs);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(space.num_dofs());
    for (std::size_t i = 0; i < bd.size(); ++i) {
        c(bd[i]) = x(static_cast<Eigen::Index>(i));
    }
    return c;
}

} // namespace smectic
