#include "smectic/error.hpp"
#include "smectic/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace smectic;

namespace {

// Brute force conformity: every vertex lying on an edge of a triangle is an
// endpoint of that edge, and interior edges have exactly two neighbours.
bool pairwise_conforming(const Mesh& mesh)
{
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto p = mesh.triangle_points(t);
        for (int i = 0; i < 3; ++i) {
            const Vec2 a = p[static_cast<std::size_t>(i)];
            const Vec2 b = p[static_cast<std::size_t>((i + 1) % 3)];
            for (int v = 0; v < mesh.num_vertices(); ++v) {
                const Vec2 x = mesh.vertex(v);
                const double cross = (b - a).x() * (x - a).y() - (b - a).y() * (x - a).x();
                const double s = (x - a).dot(b - a) / (b - a).squaredNorm();
                if (std::abs(cross) < 1e-14 && s > 1e-12 && s < 1.0 - 1e-12) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace

TEST(Mesh, InitialMesh)
{
    const Mesh m = unit_square_crisscross();
    EXPECT_EQ(m.num_triangles(), 4);
    EXPECT_EQ(m.num_vertices(), 5);
    EXPECT_EQ(m.num_edges(), 8);
}

TEST(Mesh, RefinementCountsAndSizes)
{
    Mesh m = unit_square_crisscross();
    for (int level = 1; level <= 4; ++level) {
        m = refine_uniform(m);
        EXPECT_EQ(m.num_triangles(), 1 << (2 * level + 2));
        EXPECT_NEAR(m.mesh_size(), std::pow(2.0, -level), 1e-14);
        double total = 0.0;
        for (int t = 0; t < m.num_triangles(); ++t) {
            EXPECT_NEAR(m.area(t), 1.0 / m.num_triangles(), 1e-15);
            total += m.area(t);
        }
        EXPECT_NEAR(total, 1.0, 1e-13);
        // Euler: V - E + F = 1
        EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_triangles(), 1);
    }
}

TEST(Mesh, OneAndTwoRefinementsGiveSixteenAndSixtyFour)
{
    EXPECT_EQ(unit_square_mesh(1).num_triangles(), 16);
    EXPECT_EQ(unit_square_mesh(2).num_triangles(), 64);
}

TEST(Mesh, ConformingUpTo256Elements)
{
    Mesh m = unit_square_crisscross();
    while (m.num_triangles() <= 256) {
        EXPECT_TRUE(pairwise_conforming(m)) << m.num_triangles();
        m = bisect_all(m);
    }
}

TEST(Mesh, BoundaryEdgesCoverSquareBoundary)
{
    const Mesh m = unit_square_mesh(2);
    double length = 0.0;
    for (int e = 0; e < m.num_edges(); ++e) {
        if (m.is_boundary_edge(e)) {
            const Vec2 mid = m.edge_midpoint(e);
            const bool on_side = std::abs(mid.x()) < 1e-14 || std::abs(mid.y()) < 1e-14 ||
                                 std::abs(mid.x() - 1) < 1e-14 || std::abs(mid.y() - 1) < 1e-14;
            EXPECT_TRUE(on_side);
            length += m.edge_length(e);
        }
    }
    EXPECT_NEAR(length, 4.0, 1e-13);
}

TEST(Mesh, ShapeRegularityBounded)
{
    // Bisection of the crisscross mesh produces finitely many similarity classes.
    Mesh m = unit_square_crisscross();
    for (int level = 0; level < 4; ++level) {
        double worst = 0.0;
        for (int t = 0; t < m.num_triangles(); ++t) {
            worst = std::max(worst, m.diameter(t) * m.diameter(t) / m.area(t));
        }
        EXPECT_LE(worst, 4.0 + 1e-12);
        m = refine_uniform(m);
    }
}

TEST(Mesh, RejectsClockwiseTriangle)
{
    EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, {0}), ConfigurationError);
}

TEST(Mesh, RejectsOverSharedEdge)
{
    EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}}, {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}, {0, 0, 0}),
                 ConfigurationError);
}

TEST(Boundary, MissingEdgeTagThrows)
{
    auto m = std::make_shared<const Mesh>(unit_square_mesh(1));
    auto spec = BoundarySpec::uniform(*m, BoundaryTag::Free);
    spec.edge_tags.erase(spec.edge_tags.begin());
    EXPECT_THROW(classify_boundary(m, spec), ConfigurationError);
}

TEST(Boundary, ExtraEdgeTagThrows)
{
    auto m = std::make_shared<const Mesh>(unit_square_mesh(1));
    auto spec = BoundarySpec::uniform(*m, BoundaryTag::Free);
    spec.edge_tags.emplace(std::make_pair(0, 4), BoundaryTag::Free);
    EXPECT_THROW(classify_boundary(m, spec), ConfigurationError);
}

TEST(Boundary, OverlappingPointSetsThrow)
{
    auto m = std::make_shared<const Mesh>(unit_square_mesh(1));
    auto spec = BoundarySpec::uniform(*m, BoundaryTag::Free);
    spec.dirichlet_points.insert(0);
    spec.jump_points.insert(0);
    EXPECT_THROW(classify_boundary(m, spec), ConfigurationError);
}

TEST(Boundary, PointOnClampedEdgeThrows)
{
    auto m = std::make_shared<const Mesh>(unit_square_mesh(1));
    auto spec = BoundarySpec::uniform(*m, BoundaryTag::HardClamped);
    spec.jump_points.insert(0);
    EXPECT_THROW(classify_boundary(m, spec), ConfigurationError);
}

TEST(Boundary, InteriorPointThrows)
{
    auto m = std::make_shared<const Mesh>(unit_square_mesh(1));
    auto spec = BoundarySpec::uniform(*m, BoundaryTag::Free);
    spec.jump_points.insert(4);
    EXPECT_THROW(classify_boundary(m, spec), ConfigurationError);
}

TEST(Boundary, JumpConstraintRule)
{
    auto m = std::make_shared<const Mesh>(unit_square_mesh(1));
    // Free on x = 0, hard clamped elsewhere.
    auto spec = BoundarySpec::from_midpoints(*m, [](const Vec2& x) {
        return x.x() < 1e-12 ? BoundaryTag::Free : BoundaryTag::HardClamped;
    });
    const auto cm = classify_boundary(m, spec);
    int constrained = 0;
    int transitions = 0;
    for (int v = 0; v < m->num_vertices(); ++v) {
        const auto& vi = cm.vertex_info(v);
        constrained += vi.jump_constrained ? 1 : 0;
        transitions += vi.transition ? 1 : 0;
        if (vi.jump_constrained) {
            EXPECT_NEAR(m->vertex(v).x(), 0.0, 1e-14);
            EXPECT_GT(m->vertex(v).y(), 0.0);
            EXPECT_LT(m->vertex(v).y(), 1.0);
        }
    }
    EXPECT_EQ(transitions, 2);
    // Interior vertices of the free side: one at level 1 (side split in two).
    EXPECT_EQ(constrained, 1);
    EXPECT_TRUE(cm.has_tag(BoundaryTag::Free));
    EXPECT_FALSE(cm.has_tag(BoundaryTag::SoftClamped));
}
