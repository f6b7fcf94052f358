#pragma once

#include "smectic/tensor.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

namespace smectic {

/// Conforming triangulation of the unit square.
///
/// Triangles are stored counterclockwise. Local edge i joins local vertices
/// i and (i+1) mod 3. Global edges are stored with the lower vertex index
/// first; that direction fixes all edge sign conventions downstream.
/// Meshes are immutable once built.
class Mesh {
public:
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, std::vector<int> refinement_edges);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    std::array<Vec2, 3> triangle_points(int t) const;
    /// Local index of the refinement edge of triangle t.
    int refinement_edge(int t) const { return refinement_edges_[static_cast<std::size_t>(t)]; }

    const std::array<int, 2>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    /// Global edge ids of the local edges of t.
    const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[static_cast<std::size_t>(t)]; }
    /// Adjacent triangles of e; the second entry is -1 on the boundary.
    const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[static_cast<std::size_t>(e)]; }
    /// (triangle, local vertex) incidences of vertex v.
    const std::vector<std::pair<int, int>>& vertex_triangles(int v) const
    {
        return vertex_triangles_[static_cast<std::size_t>(v)];
    }

    bool is_boundary_edge(int e) const { return edge_triangles(e)[1] < 0; }
    bool is_boundary_vertex(int v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }
    /// Edge id joining a and b, or -1.
    int find_edge(int a, int b) const;

    double area(int t) const;
    double diameter(int t) const;
    double edge_length(int e) const;
    Vec2 edge_midpoint(int e) const;
    /// Maximal element diameter.
    double mesh_size() const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<int> refinement_edges_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<std::vector<std::pair<int, int>>> vertex_triangles_;
    std::vector<bool> boundary_vertex_;
    std::map<std::pair<int, int>, int> edge_index_;
};

/// Unit square split into four triangles through its center; refinement
/// edges are the square sides.
Mesh unit_square_crisscross();

/// One sweep of newest vertex bisection applied to every triangle.
Mesh bisect_all(const Mesh& mesh);

/// Two bisection sweeps: every triangle is split into four of equal area.
Mesh refine_uniform(const Mesh& mesh);

/// Initial mesh refined `levels` times.
Mesh unit_square_mesh(int levels);

/// Plain-text dump: one "x y" line per vertex, one "i j k" line per triangle.
void write_mesh_text(const Mesh& mesh, std::ostream& nodes, std::ostream& elements);

enum class BoundaryTag { HardClamped, SimplySupported, SoftClamped, Free };

std::string_view to_string(BoundaryTag tag);

/// Boundary conditions per boundary edge plus the designated point sets
/// J_D (point values of u prescribed) and J_N (corner jumps of M prescribed).
struct BoundarySpec {
    std::map<std::pair<int, int>, BoundaryTag> edge_tags; ///< keyed by sorted vertex pair
    std::set<int> dirichlet_points;
    std::set<int> jump_points;

    static BoundarySpec uniform(const Mesh& mesh, BoundaryTag tag);
    /// Tag of each boundary edge chosen from its midpoint.
    static BoundarySpec from_midpoints(const Mesh& mesh, const std::function<BoundaryTag(const Vec2&)>& tag_of);
};

struct VertexBoundaryInfo {
    bool on_boundary = false;
    std::array<int, 2> boundary_edges{-1, -1};
    /// Adjacent boundary edges carry different tags.
    bool transition = false;
    /// The sum of element jump values at this vertex is essential data.
    bool jump_constrained = false;
};

/// Mesh together with validated boundary classification.
class ClassifiedMesh {
public:
    ClassifiedMesh(std::shared_ptr<const Mesh> mesh, std::vector<std::optional<BoundaryTag>> edge_tags,
                   std::vector<VertexBoundaryInfo> vertex_info);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    /// Tag of a boundary edge; empty for interior edges.
    const std::optional<BoundaryTag>& tag(int e) const { return edge_tags_[static_cast<std::size_t>(e)]; }
    const VertexBoundaryInfo& vertex_info(int v) const { return vertex_info_[static_cast<std::size_t>(v)]; }
    bool has_tag(BoundaryTag tag) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<std::optional<BoundaryTag>> edge_tags_;
    std::vector<VertexBoundaryInfo> vertex_info_;
};

/// Validates `spec` against the boundary of `mesh`. Throws ConfigurationError
/// when `spec` does not cover exactly the boundary edges, when J_D and J_N
/// overlap or contain interior vertices, or when a point of J touches a hard
/// clamped or simply supported edge.
ClassifiedMesh classify_boundary(std::shared_ptr<const Mesh> mesh, const BoundarySpec& spec);

} // namespace smectic
