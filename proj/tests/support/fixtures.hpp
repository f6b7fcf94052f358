#pragma once

#include "smectic/assembly.hpp"
#include "smectic/numerics/jet.hpp"
#include "smectic/spaces.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace smectic::testing {

/// Meshes 0..levels-1 of the uniform refinement family.
inline std::vector<std::shared_ptr<const Mesh>> mesh_family(int levels)
{
    std::vector<std::shared_ptr<const Mesh>> out;
    Mesh m = unit_square_crisscross();
    for (int l = 0; l < levels; ++l) {
        out.push_back(std::make_shared<const Mesh>(m));
        if (l + 1 < levels) {
            m = refine_uniform(m);
        }
    }
    return out;
}

inline ClassifiedMesh classified(const std::shared_ptr<const Mesh>& mesh, BoundaryTag tag)
{
    return classify_boundary(mesh, BoundarySpec::uniform(*mesh, tag));
}

/// Symmetric tensor field whose components are random polynomials of total
/// degree <= `degree` with coefficients in [-1, 1].
inline numerics::TensorFn random_polynomial_tensor(std::mt19937& rng, int degree)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    struct Term {
        int i, j;
        std::array<double, 3> c;
    };
    std::vector<Term> terms;
    for (int i = 0; i <= degree; ++i) {
        for (int j = 0; i + j <= degree; ++j) {
            terms.push_back({i, j, {u(rng), u(rng), u(rng)}});
        }
    }
    return [terms](const numerics::Jet& x, const numerics::Jet& y) {
        numerics::SymTensorJet q{numerics::Jet(0.0), numerics::Jet(0.0), numerics::Jet(0.0)};
        for (const Term& t : terms) {
            numerics::Jet mono(1.0);
            for (int k = 0; k < t.i; ++k) {
                mono = mono * x;
            }
            for (int k = 0; k < t.j; ++k) {
                mono = mono * y;
            }
            q.xx = q.xx + t.c[0] * mono;
            q.xy = q.xy + t.c[1] * mono;
            q.yy = q.yy + t.c[2] * mono;
        }
        return q;
    };
}

/// ||Pi^1 divDiv Q - divDiv Pi^divdiv Q|| / ||Pi^1 divDiv Q|| over the mesh.
inline double commutativity_defect(const HddSpace& space, const numerics::TensorFn& q, int quad_degree = 10)
{
    const QuadTable quad(space.mesh(), quad_degree);
    const Eigen::VectorXd y = interpolate_global(space, q);
    const HddValues vals = evaluate_hdd(space, quad, y);
    const P1Field proj = project_p1(space.mesh(), quad.rule(), [&](int t, int k) {
        return numerics::div_div(numerics::expand(q, quad.point(t, k), 2));
    });
    double num = 0.0;
    double den = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const double p = proj.value(t, quad.reference_point(k));
            const double d = p - vals.div_div[quad.index(t, k)];
            num += quad.weight(t, k) * d * d;
            den += quad.weight(t, k) * p * p;
        }
    }
    return std::sqrt(num / den);
}

/// ||Q - Pi^divdiv Q||_L2.
inline double interpolation_error(const HddSpace& space, const numerics::TensorFn& q, int quad_degree = 10)
{
    const QuadTable quad(space.mesh(), quad_degree);
    const Eigen::VectorXd y = interpolate_global(space, q);
    const HddValues vals = evaluate_hdd(space, quad, y);
    double s = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const SymTensor d = numerics::evaluate(q, quad.point(t, k)) - vals.value[quad.index(t, k)];
            s += quad.weight(t, k) * contract(d, d);
        }
    }
    return std::sqrt(s);
}

/// M = grad grad u + q^2 T u as a jet-evaluable field; supports expansion
/// orders up to 2.
inline numerics::TensorFn manufactured_tensor_fn(const numerics::ScalarFn& u, const numerics::TensorFn& t, double q)
{
    return [u, t, q](const numerics::Jet& x, const numerics::Jet& y) {
        const int order = x.order();
        const numerics::Jet xx = numerics::Jet::variable(x.value(), 0, order + 2);
        const numerics::Jet yy = numerics::Jet::variable(y.value(), 1, order + 2);
        const numerics::Jet uu = u(xx, yy);
        const numerics::Jet ux = numerics::differentiate(uu, 0);
        const numerics::Jet uy = numerics::differentiate(uu, 1);
        const numerics::SymTensorJet tt = t(xx, yy);
        const double q2 = q * q;
        return numerics::SymTensorJet{(numerics::differentiate(ux, 0) + q2 * tt.xx * uu).truncated(order),
                                      (numerics::differentiate(ux, 1) + q2 * tt.xy * uu).truncated(order),
                                      (numerics::differentiate(uy, 1) + q2 * tt.yy * uu).truncated(order)};
    };
}

/// nu nu^T for a director field.
inline numerics::TensorFn dyad_fn(const numerics::VectorFn& nu)
{
    return [nu](const numerics::Jet& x, const numerics::Jet& y) {
        const numerics::VectorJet v = nu(x, y);
        return numerics::SymTensorJet{v.x * v.x, v.x * v.y, v.y * v.y};
    };
}

/// x^T A x > 0 for `count` random vectors.
inline bool positive_definite_probes(const SparseMatrix& a, int count, std::mt19937& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd x(a.rows());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            x(k) = n(rng);
        }
        if (!(x.dot(a * x) > 0.0)) {
            return false;
        }
    }
    return true;
}

} // namespace smectic::testing
