#include "smectic/uzawa.hpp"

#include "smectic/error.hpp"

#include <cmath>
#include <sstream>

namespace smectic {

namespace {

double gradient_norm_sq(const P2Space& space, const QuadTable& quad, const Eigen::VectorXd& phi)
{
    double s = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const Vec2 g = evaluate_p2(space, phi, t, quad.reference_point(k)).gradient;
            s += quad.weight(t, k) * g.squaredNorm();
        }
    }
    return s;
}

// Tensor step at a fixed angle: factor the Gram matrix once and reuse it for
// the defect solve and the following tensor solve.
struct TensorStep {
    GramSystem gram;
    Eigen::VectorXd rhs;
    std::unique_ptr<SpdFactorization> fact;

    TensorStep(const HddSpace& space, const QuadTable& quad, const TensorValues& tv, const ModelParams& p,
               const PointValues& f, const HessianValues* g, const Eigen::VectorXd& essential)
        : gram(assemble_gram(space, quad, tv, p)),
          rhs(gram.lifted(space, assemble_load(space, quad, tv, p, f, g), essential))
    {
        if (space.num_free() > 0) {
            fact = std::make_unique<SpdFactorization>(gram.free_free, gram.free_free_lo);
        }
    }

    Eigen::VectorXd solve(double tol) const
    {
        return fact ? fact->solve(rhs, tol) : Eigen::VectorXd();
    }

    // ||N|| with <N, dM> = <M_h, dM> - F(dM) on the free coefficients.
    double defect_norm(const Eigen::VectorXd& x, double tol) const
    {
        if (!fact) {
            return 0.0;
        }
        const CompensatedVector r = compensated_residual(gram.free_free, &gram.free_free_lo,
                                                         CompensatedVector{x, Eigen::VectorXd::Zero(x.size())}, rhs);
        const Eigen::VectorXd defect = -r.value();
        if (defect.norm() == 0.0) {
            return 0.0;
        }
        const Eigen::VectorXd n = fact->solve(defect, tol);
        return std::sqrt(std::max(0.0, n.dot(defect)));
    }
};

} // namespace

void UzawaConfig::validate() const
{
    if (!(alpha > 0.0) || !(tol_M > 0.0) || !(tol_phi > 0.0)) {
        throw ConfigurationError("Uzawa: alpha and both tolerances must be positive");
    }
    if (max_outer < 1 || max_inner < 1) {
        throw ConfigurationError("Uzawa: iteration caps must be at least 1");
    }
    if (poisson_degree < 2) {
        throw ConfigurationError("Uzawa: the Poisson quadrature degree must be at least 2");
    }
}

std::string to_string(UzawaStatus s)
{
    return s == UzawaStatus::Converged ? "converged" : "outer-cap-reached";
}

int IterationLog::inner_total() const
{
    int n = 0;
    for (const auto& o : outer) {
        n += static_cast<int>(o.res_phi.size());
    }
    return n;
}

double IterationLog::inner_mean() const
{
    return outer.empty() ? 0.0 : static_cast<double>(inner_total()) / static_cast<double>(outer.size());
}

Eigen::VectorXd harmonic_extension(const P2Space& space, const Eigen::VectorXd& boundary)
{
    if (boundary.size() != space.num_dofs()) {
        throw ConfigurationError("harmonic_extension: vector size does not match the P2 space");
    }
    const PoissonSystem sys = assemble_poisson(space, 1.0);
    Eigen::VectorXd phi = boundary;
    const auto& bd = space.boundary_dofs();
    Eigen::VectorXd phib(static_cast<Eigen::Index>(bd.size()));
    for (std::size_t i = 0; i < bd.size(); ++i) {
        phib(static_cast<Eigen::Index>(i)) = boundary(bd[i]);
    }
    const auto& in = space.interior_dofs();
    if (in.empty()) {
        return phi;
    }
    const Eigen::VectorXd rhs = -(sys.interior_boundary * phib);
    const Eigen::VectorXd phii = spd_solve(sys.interior_interior, rhs);
    for (std::size_t i = 0; i < in.size(); ++i) {
        phi(in[i]) = phii(static_cast<Eigen::Index>(i));
    }
    return phi;
}

NonlinearSolution uzawa_solve(const ClassifiedMesh& mesh, ElementCache& cache, const NonlinearProblem& problem,
                              const UzawaConfig& config, const Discretization& disc,
                              const std::optional<Eigen::VectorXd>& phi_init)
{
    problem.params.validate();
    config.validate();
    if (!problem.load || !problem.eta) {
        throw ConfigurationError("uzawa_solve: load and Dirichlet angle are required");
    }
    const ModelParams& p = problem.params;
    NonlinearSolution sol;
    sol.params = p;
    sol.space = build_hdd_space(mesh, cache);
    sol.angle_space = std::make_shared<const P2Space>(mesh.mesh_ptr());
    sol.quad = std::make_shared<const QuadTable>(mesh.mesh(), disc.quad_degree);
    const HddSpace& space = *sol.space;
    const P2Space& aspace = *sol.angle_space;
    const QuadTable& quad = *sol.quad;

    sol.load = tabulate_scalar(quad, problem.load);
    std::optional<HessianValues> g;
    if (problem.clamp) {
        g = tabulate_hessian(quad, *problem.clamp);
    }
    const auto& cm = space.classified();
    if (!g && (cm.has_tag(BoundaryTag::HardClamped) || cm.has_tag(BoundaryTag::SimplySupported) ||
               cm.has_tag(BoundaryTag::SoftClamped))) {
        throw ConfigurationError(
            "uzawa_solve: boundary data g is required for hard clamped, simply supported or soft clamped edges");
    }
    const HessianValues* gp = g ? &*g : nullptr;
    std::optional<PointValues> f_phi;
    if (problem.angle_source) {
        f_phi = tabulate_scalar(quad, problem.angle_source);
    }
    const Eigen::VectorXd essential =
        essential_values(space, problem.essential ? &*problem.essential : nullptr, disc.edge_points);
    const Eigen::VectorXd fixed = space.restrict_fixed(essential);

    const Eigen::VectorXd trace = boundary_l2_projection(aspace, problem.eta);
    Eigen::VectorXd phi;
    if (phi_init) {
        if (phi_init->size() != aspace.num_dofs()) {
            throw ConfigurationError("uzawa_solve: initial angle has the wrong size");
        }
        for (int d : aspace.boundary_dofs()) {
            if (std::abs((*phi_init)(d) - trace(d)) > 1e-12 * std::max(1.0, std::abs(trace(d)))) {
                std::ostringstream msg;
                msg << "uzawa_solve: initial angle violates the Dirichlet condition at P2 node " << d;
                throw ConfigurationError(msg.str());
            }
        }
        phi = *phi_init;
    } else {
        phi = harmonic_extension(aspace, trace);
    }

    const PoissonSystem poisson = assemble_poisson(aspace, p.K, config.poisson_degree);
    std::unique_ptr<SpdFactorization> poisson_fact;
    if (!aspace.interior_dofs().empty()) {
        poisson_fact = std::make_unique<SpdFactorization>(poisson.interior_interior);
    }

    auto tensor_at = [&](const Eigen::VectorXd& angle) {
        return director_tensor_values(tabulate_p2(quad, aspace, angle));
    };

    TensorValues tv = tensor_at(phi);
    auto step = std::make_unique<TensorStep>(space, quad, tv, p, sol.load, gp, essential);
    Eigen::VectorXd x = step->solve(disc.solver_tol);

    for (int outer = 0; outer < config.max_outer; ++outer) {
        OuterIteration rec;
        const Eigen::VectorXd m_full = space.combine(x, fixed);
        const HddValues mv = evaluate_hdd(space, quad, m_full);
        const Density dens = postprocess_density(quad, mesh.mesh(), mv, tv, sol.load, p);
        const PointValues u_values = p1_values(quad, dens.u);

        for (int inner = 0; inner < config.max_inner; ++inner) {
            double res_phi = 0.0;
            if (poisson_fact) {
                const Eigen::VectorXd r = assemble_phi_residual(aspace, quad, phi, mv.value, u_values, p,
                                                                f_phi ? &*f_phi : nullptr);
                const Eigen::VectorXd w = poisson_fact->solve(r, disc.solver_tol);
                const auto& in = aspace.interior_dofs();
                for (std::size_t i = 0; i < in.size(); ++i) {
                    phi(in[i]) -= config.alpha * w(static_cast<Eigen::Index>(i));
                }
                res_phi = std::sqrt(std::max(0.0, w.dot(poisson.interior_interior * w)));
            }
            rec.res_phi.push_back(res_phi);
            if (res_phi < config.tol_phi) {
                break;
            }
        }

        tv = tensor_at(phi);
        step = std::make_unique<TensorStep>(space, quad, tv, p, sol.load, gp, essential);
        rec.res_M = step->defect_norm(x, disc.solver_tol);
        sol.log.outer.push_back(std::move(rec));
        if (sol.log.outer.back().res_M < config.tol_M) {
            sol.log.status = UzawaStatus::Converged;
            break;
        }
        if (outer + 1 < config.max_outer) {
            x = step->solve(disc.solver_tol);
        }
    }

    sol.m = space.combine(x, fixed);
    sol.phi = std::move(phi);
    sol.tensor = std::move(tv);
    const HddValues mv = evaluate_hdd(space, quad, sol.m);
    Density dens = postprocess_density(quad, mesh.mesh(), mv, sol.tensor, sol.load, p);
    sol.u_tilde = std::move(dens.u_tilde);
    sol.u = std::move(dens.u);
    sol.energy = discrete_energy(space, aspace, quad, sol.m, sol.u, sol.phi, sol.load, p);
    return sol;
}

double discrete_energy(const HddSpace& space, const P2Space& angle_space, const QuadTable& quad,
                       const Eigen::VectorXd& m, const P1Field& u, const Eigen::VectorXd& phi, const PointValues& f,
                       const ModelParams& p)
{
    if (f.size() != quad.size()) {
        throw ConfigurationError("discrete_energy: load table does not match the quadrature");
    }
    const HddValues mv = evaluate_hdd(space, quad, m);
    double mm = 0.0;
    double uu = 0.0;
    double fu = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const std::size_t i = quad.index(t, k);
            const double w = quad.weight(t, k);
            const double uv = u.value(t, quad.reference_point(k));
            mm += w * contract(mv.value[i], mv.value[i]);
            uu += w * uv * uv;
            fu += w * f[i] * uv;
        }
    }
    return 0.5 * p.B * mm + 0.5 * p.m * uu + 0.5 * p.K * gradient_norm_sq(angle_space, quad, phi) - fu;
}

EnergySequence energy_error_nonlinear(const std::vector<double>& energies)
{
    const AitkenResult a = aitken(energies);
    EnergySequence out;
    out.limit = a.limit;
    out.degenerate = a.degenerate;
    for (double j : energies) {
        out.error.push_back(std::sqrt(std::abs(a.limit - j)));
    }
    return out;
}

NonlinearErrors compute_nonlinear_errors(const NonlinearSolution& sol, const numerics::ScalarFn& u,
                                         const numerics::ScalarFn& phi)
{
    const QuadTable& quad = *sol.quad;
    const ModelParams& p = sol.params;
    const double q2 = p.q * p.q;
    const HddValues mv = evaluate_hdd(*sol.space, quad, sol.m);
    NonlinearErrors e;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const std::size_t i = quad.index(t, k);
            const double w = quad.weight(t, k);
            const Vec2& x = quad.point(t, k);
            const auto uh = numerics::second_order(u, x);
            const auto ph = numerics::second_order(phi, x);
            const SymTensor tt = director_tensor(ph.value);
            const SymTensor diff = uh.hessian + q2 * uh.value * tt - mv.value[i];
            const double exact_l = sol.load[i] - p.m * uh.value;
            const double discrete_l = p.B * (mv.div_div[i] + q2 * contract(tt, mv.value[i]));
            const double du = uh.value - sol.u.value(t, quad.reference_point(k));
            const Vec2 dg = ph.gradient - evaluate_p2(*sol.angle_space, sol.phi, t, quad.reference_point(k)).gradient;
            e.err_L2 += w * contract(diff, diff);
            e.err_divdiv += w * (exact_l - discrete_l) * (exact_l - discrete_l);
            e.err_u += w * du * du;
            e.err_phi += w * dg.squaredNorm();
        }
    }
    e.err_L2 = std::sqrt(p.B * e.err_L2);
    e.err_divdiv = std::sqrt(e.err_divdiv);
    e.err_u = std::sqrt(e.err_u);
    e.err_phi = std::sqrt(p.K * e.err_phi);
    return e;
}

} // namespace smectic
