#include "smectic/linear_scheme.hpp"

#include "smectic/error.hpp"

#include <cmath>

namespace smectic {

Density postprocess_density(const QuadTable& quad, const Mesh& mesh, const HddValues& m, const TensorValues& t,
                            const PointValues& f, const ModelParams& p)
{
    Density d;
    const double q2 = p.q * p.q;
    d.u_tilde.resize(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        d.u_tilde[i] = f[i] / p.m - (p.B / p.m) * (m.div_div[i] + q2 * contract(t[i], m.value[i]));
    }
    d.u = project_p1(mesh, quad.rule(), [&](int tri, int k) { return d.u_tilde[quad.index(tri, k)]; });
    return d;
}

PointValues p1_values(const QuadTable& quad, const P1Field& u)
{
    PointValues v(quad.size());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            v[quad.index(t, k)] = u.value(t, quad.reference_point(k));
        }
    }
    return v;
}

double p1_norm_sq(const QuadTable& quad, const P1Field& u)
{
    double s = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const double v = u.value(t, quad.reference_point(k));
            s += quad.weight(t, k) * v * v;
        }
    }
    return s;
}

LinearSolution solve_linear(const ClassifiedMesh& mesh, ElementCache& cache, const LinearProblem& problem,
                            const Discretization& disc)
{
    problem.params.validate();
    if (!problem.tensor || !problem.load) {
        throw ConfigurationError("solve_linear: tensor coefficient and load are required");
    }
    LinearSolution sol;
    sol.params = problem.params;
    sol.space = build_hdd_space(mesh, cache);
    sol.quad = std::make_shared<const QuadTable>(mesh.mesh(), disc.quad_degree);
    const HddSpace& space = *sol.space;
    const QuadTable& quad = *sol.quad;

    sol.tensor = tabulate_tensor(quad, problem.tensor);
    sol.load = tabulate_scalar(quad, problem.load);
    std::optional<HessianValues> g;
    if (problem.clamp) {
        g = tabulate_hessian(quad, *problem.clamp);
    }
    const Eigen::VectorXd essential =
        essential_values(space, problem.essential ? &*problem.essential : nullptr, disc.edge_points);

    const GramSystem gram = assemble_gram(space, quad, sol.tensor, problem.params);
    const Eigen::VectorXd rhs =
        assemble_rhs_linear(space, gram, quad, sol.tensor, problem.params, sol.load, g ? &*g : nullptr, essential);
    sol.num_free = space.num_free();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(space.num_free());
    if (space.num_free() > 0) {
        const SpdFactorization fact(gram.free_free, gram.free_free_lo);
        x = fact.solve(rhs, disc.solver_tol, &sol.solve_stats);
    }
    sol.m = space.combine(x, space.restrict_fixed(essential));

    const HddValues mv = evaluate_hdd(space, quad, sol.m);
    Density dens = postprocess_density(quad, mesh.mesh(), mv, sol.tensor, sol.load, problem.params);
    sol.u_tilde = std::move(dens.u_tilde);
    sol.u = std::move(dens.u);

    const ModelParams& p = problem.params;
    const double q2 = p.q * p.q;
    double l2 = 0.0;
    double dd = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const double w = quad.weight(static_cast<int>(i) / quad.points_per_triangle(),
                                     static_cast<int>(i) % quad.points_per_triangle());
        l2 += w * contract(mv.value[i], mv.value[i]);
        const double l = mv.div_div[i] + q2 * contract(sol.tensor[i], mv.value[i]);
        dd += w * l * l;
    }
    sol.b_norm_sq = p.B * l2;
    sol.norm_divdiv = std::sqrt(p.B * l2 + p.B * p.B / p.m * dd);
    sol.u_norm_sq = p1_norm_sq(quad, sol.u);
    return sol;
}

LinearErrors compute_errors(const LinearSolution& sol, const LinearProblem& problem, const numerics::ScalarFn& u)
{
    const QuadTable& quad = *sol.quad;
    const ModelParams& p = problem.params;
    const double q2 = p.q * p.q;
    const HddValues mv = evaluate_hdd(*sol.space, quad, sol.m);
    const P1Field proj_u = project_p1(sol.space->mesh(), quad.rule(), [&](int t, int k) {
        return numerics::evaluate(u, quad.point(t, k));
    });
    LinearErrors e;
    double m_l2 = 0.0;
    double m_dd = 0.0;
    double h_l2 = 0.0;
    double h_dd = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const std::size_t i = quad.index(t, k);
            const double w = quad.weight(t, k);
            const auto uh = numerics::second_order(u, quad.point(t, k));
            const SymTensor exact = uh.hessian + q2 * uh.value * sol.tensor[i];
            const SymTensor diff = exact - mv.value[i];
            const double exact_l = sol.load[i] - p.m * uh.value;
            const double discrete_l = p.B * (mv.div_div[i] + q2 * contract(sol.tensor[i], mv.value[i]));
            const double du = uh.value - sol.u.value(t, quad.reference_point(k));
            const double dut = uh.value - sol.u_tilde[i];
            const double dpu = uh.value - proj_u.value(t, quad.reference_point(k));
            e.err_L2 += w * contract(diff, diff);
            e.err_divdiv += w * (exact_l - discrete_l) * (exact_l - discrete_l);
            e.err_u += w * du * du;
            e.err_util += w * dut * dut;
            e.err_proj_u += w * dpu * dpu;
            m_l2 += w * contract(exact, exact);
            m_dd += w * exact_l * exact_l;
            h_l2 += w * contract(mv.value[i], mv.value[i]);
            h_dd += w * discrete_l * discrete_l;
        }
    }
    e.error_norm_sq = p.B * e.err_L2 + e.err_divdiv / p.m;
    e.exact_norm_sq = p.B * m_l2 + m_dd / p.m;
    e.discrete_norm_sq = p.B * h_l2 + h_dd / p.m;
    e.err_L2 = std::sqrt(p.B * e.err_L2);
    e.err_divdiv = std::sqrt(e.err_divdiv);
    e.err_u = std::sqrt(e.err_u);
    e.err_util = std::sqrt(e.err_util);
    e.err_proj_u = std::sqrt(e.err_proj_u);
    return e;
}

EnergyErrorSequence energy_error_sequence(const std::vector<double>& norms)
{
    const AitkenResult a = aitken(norms);
    EnergyErrorSequence out;
    out.limit = a.limit;
    out.degenerate = a.degenerate;
    for (double n : norms) {
        const double r = a.limit * a.limit - n * n;
        out.clamped.push_back(r < 0.0);
        out.error.push_back(r < 0.0 ? 0.0 : std::sqrt(r));
    }
    return out;
}

} // namespace smectic
