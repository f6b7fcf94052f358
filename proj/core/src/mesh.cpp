#include "smectic/mesh.hpp"

#include "smectic/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace smectic {

namespace {

std::pair<int, int> sorted_pair(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, std::vector<int> refinement_edges)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), refinement_edges_(std::move(refinement_edges))
{
    if (refinement_edges_.size() != triangles_.size()) {
        throw ConfigurationError("Mesh: one refinement edge per triangle required");
    }
    const int nv = num_vertices();
    vertex_triangles_.resize(vertices_.size());
    triangle_edges_.resize(triangles_.size());
    for (int t = 0; t < num_triangles(); ++t) {
        const auto& tri = triangle(t);
        for (int v : tri) {
            if (v < 0 || v >= nv) {
                throw ConfigurationError("Mesh: triangle references a nonexistent vertex");
            }
        }
        if (signed_area(vertex(tri[0]), vertex(tri[1]), vertex(tri[2])) <= 0.0) {
            std::ostringstream msg;
            msg << "Mesh: triangle " << t << " is not counterclockwise or degenerate";
            throw ConfigurationError(msg.str());
        }
        if (refinement_edge(t) < 0 || refinement_edge(t) > 2) {
            throw ConfigurationError("Mesh: refinement edge index must be 0, 1 or 2");
        }
        for (int i = 0; i < 3; ++i) {
            vertex_triangles_[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])].emplace_back(t, i);
            const auto key = sorted_pair(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>((i + 1) % 3)]);
            auto [it, inserted] = edge_index_.try_emplace(key, static_cast<int>(edges_.size()));
            if (inserted) {
                edges_.push_back({key.first, key.second});
                edge_triangles_.push_back({t, -1});
            } else {
                auto& adj = edge_triangles_[static_cast<std::size_t>(it->second)];
                if (adj[1] >= 0) {
                    throw ConfigurationError("Mesh: edge shared by more than two triangles");
                }
                adj[1] = t;
            }
            triangle_edges_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = it->second;
        }
    }
    boundary_vertex_.assign(vertices_.size(), false);
    for (int e = 0; e < num_edges(); ++e) {
        if (is_boundary_edge(e)) {
            boundary_vertex_[static_cast<std::size_t>(edge(e)[0])] = true;
            boundary_vertex_[static_cast<std::size_t>(edge(e)[1])] = true;
        }
    }
}

std::array<Vec2, 3> Mesh::triangle_points(int t) const
{
    const auto& tri = triangle(t);
    return {vertex(tri[0]), vertex(tri[1]), vertex(tri[2])};
}

int Mesh::find_edge(int a, int b) const
{
    const auto it = edge_index_.find(sorted_pair(a, b));
    return it == edge_index_.end() ? -1 : it->second;
}

double Mesh::area(int t) const
{
    const auto p = triangle_points(t);
    return signed_area(p[0], p[1], p[2]);
}

double Mesh::diameter(int t) const
{
    const auto p = triangle_points(t);
    return std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()});
}

double Mesh::edge_length(int e) const { return (vertex(edge(e)[1]) - vertex(edge(e)[0])).norm(); }

Vec2 Mesh::edge_midpoint(int e) const { return 0.5 * (vertex(edge(e)[0]) + vertex(edge(e)[1])); }

double Mesh::mesh_size() const
{
    double h = 0.0;
    for (int t = 0; t < num_triangles(); ++t) {
        h = std::max(h, diameter(t));
    }
    return h;
}

Mesh unit_square_crisscross()
{
    std::vector<Vec2> v = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.5, 0.5}};
    std::vector<std::array<int, 3>> t = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    return Mesh(std::move(v), std::move(t), {0, 0, 0, 0});
}

Mesh bisect_all(const Mesh& mesh)
{
    std::vector<Vec2> vertices = mesh.vertices();
    std::vector<int> midpoint(static_cast<std::size_t>(mesh.num_edges()), -1);
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2 * static_cast<std::size_t>(mesh.num_triangles()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const int r = mesh.refinement_edge(t);
        const int a = tri[static_cast<std::size_t>(r)];
        const int b = tri[static_cast<std::size_t>((r + 1) % 3)];
        const int c = tri[static_cast<std::size_t>((r + 2) % 3)];
        const int e = mesh.triangle_edges(t)[static_cast<std::size_t>(r)];
        int& m = midpoint[static_cast<std::size_t>(e)];
        if (m < 0) {
            m = static_cast<int>(vertices.size());
            vertices.push_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)));
        }
        // The new vertex m is the newest vertex of both children; their
        // refinement edges (local edge 0) lie opposite to it.
        triangles.push_back({c, a, m});
        triangles.push_back({b, c, m});
    }
    std::vector<int> refinement(triangles.size(), 0);
    return Mesh(std::move(vertices), std::move(triangles), std::move(refinement));
}

Mesh refine_uniform(const Mesh& mesh) { return bisect_all(bisect_all(mesh)); }

Mesh unit_square_mesh(int levels)
{
    Mesh mesh = unit_square_crisscross();
    for (int k = 0; k < levels; ++k) {
        mesh = refine_uniform(mesh);
    }
    return mesh;
}

void write_mesh_text(const Mesh& mesh, std::ostream& nodes, std::ostream& elements)
{
    const auto precision = nodes.precision(17);
    for (const auto& v : mesh.vertices()) {
        nodes << v.x() << ' ' << v.y() << '\n';
    }
    nodes.precision(precision);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        elements << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
}

std::string_view to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::HardClamped:
        return "hard-clamped";
    case BoundaryTag::SimplySupported:
        return "simply-supported";
    case BoundaryTag::SoftClamped:
        return "soft-clamped";
    case BoundaryTag::Free:
        return "free";
    }
    return "unknown";
}

BoundarySpec BoundarySpec::uniform(const Mesh& mesh, BoundaryTag tag)
{
    return from_midpoints(mesh, [tag](const Vec2&) { return tag; });
}

BoundarySpec BoundarySpec::from_midpoints(const Mesh& mesh, const std::function<BoundaryTag(const Vec2&)>& tag_of)
{
    BoundarySpec spec;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.is_boundary_edge(e)) {
            spec.edge_tags.emplace(std::make_pair(mesh.edge(e)[0], mesh.edge(e)[1]), tag_of(mesh.edge_midpoint(e)));
        }
    }
    return spec;
}

ClassifiedMesh::ClassifiedMesh(std::shared_ptr<const Mesh> mesh, std::vector<std::optional<BoundaryTag>> edge_tags,
                               std::vector<VertexBoundaryInfo> vertex_info)
    : mesh_(std::move(mesh)), edge_tags_(std::move(edge_tags)), vertex_info_(std::move(vertex_info))
{
}

bool ClassifiedMesh::has_tag(BoundaryTag tag) const
{
    return std::any_of(edge_tags_.begin(), edge_tags_.end(), [tag](const auto& t) { return t && *t == tag; });
}

ClassifiedMesh classify_boundary(std::shared_ptr<const Mesh> mesh_ptr, const BoundarySpec& spec)
{
    const Mesh& mesh = *mesh_ptr;
    std::vector<std::optional<BoundaryTag>> tags(static_cast<std::size_t>(mesh.num_edges()));
    std::size_t matched = 0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) {
            continue;
        }
        const auto it = spec.edge_tags.find({mesh.edge(e)[0], mesh.edge(e)[1]});
        if (it == spec.edge_tags.end()) {
            std::ostringstream msg;
            msg << "classify_boundary: boundary edge (" << mesh.edge(e)[0] << ", " << mesh.edge(e)[1]
                << ") has no boundary condition";
            throw ConfigurationError(msg.str());
        }
        tags[static_cast<std::size_t>(e)] = it->second;
        ++matched;
    }
    if (matched != spec.edge_tags.size()) {
        throw ConfigurationError("classify_boundary: boundary specification names edges that are not boundary edges");
    }

    std::vector<VertexBoundaryInfo> info(static_cast<std::size_t>(mesh.num_vertices()));
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) {
            continue;
        }
        for (int v : mesh.edge(e)) {
            auto& vi = info[static_cast<std::size_t>(v)];
            vi.on_boundary = true;
            (vi.boundary_edges[0] < 0 ? vi.boundary_edges[0] : vi.boundary_edges[1]) = e;
        }
    }

    auto touches_essential_u = [&](int v) {
        for (int e : info[static_cast<std::size_t>(v)].boundary_edges) {
            const auto tag = *tags[static_cast<std::size_t>(e)];
            if (tag == BoundaryTag::HardClamped || tag == BoundaryTag::SimplySupported) {
                return true;
            }
        }
        return false;
    };
    for (const auto* set : {&spec.dirichlet_points, &spec.jump_points}) {
        for (int v : *set) {
            if (v < 0 || v >= mesh.num_vertices() || !info[static_cast<std::size_t>(v)].on_boundary) {
                throw ConfigurationError("classify_boundary: designated point is not a boundary vertex");
            }
            if (touches_essential_u(v)) {
                throw ConfigurationError(
                    "classify_boundary: designated point touches a hard clamped or simply supported edge");
            }
        }
    }
    for (int v : spec.dirichlet_points) {
        if (spec.jump_points.count(v) != 0) {
            throw ConfigurationError("classify_boundary: J_D and J_N must be disjoint");
        }
    }

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        auto& vi = info[static_cast<std::size_t>(v)];
        if (!vi.on_boundary) {
            continue;
        }
        const auto t0 = *tags[static_cast<std::size_t>(vi.boundary_edges[0])];
        const auto t1 = *tags[static_cast<std::size_t>(vi.boundary_edges[1])];
        vi.transition = t0 != t1;
        auto free_value = [](BoundaryTag t) { return t == BoundaryTag::Free || t == BoundaryTag::SoftClamped; };
        if (spec.jump_points.count(v) != 0) {
            vi.jump_constrained = true;
        } else if (spec.dirichlet_points.count(v) != 0) {
            vi.jump_constrained = false;
        } else {
            vi.jump_constrained = free_value(t0) && free_value(t1);
        }
    }
    return ClassifiedMesh(std::move(mesh_ptr), std::move(tags), std::move(info));
}

} // namespace smectic
