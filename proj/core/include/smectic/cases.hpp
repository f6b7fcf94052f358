#pragma once

#include "smectic/linear_scheme.hpp"
#include "smectic/mesh.hpp"
#include "smectic/numerics/jet.hpp"
#include "smectic/uzawa.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smectic {

enum class CaseKind { Linear, Nonlinear };

/// A benchmark problem: parameters, coefficients, loads, boundary data and,
/// when known, the exact solution.
struct Case {
    std::string name;
    CaseKind kind = CaseKind::Linear;
    ModelParams params;
    BoundaryTag boundary = BoundaryTag::HardClamped;

    /// Linear cases: director of T = nu nu^T.
    std::optional<numerics::VectorFn> director;
    std::function<double(const Vec2&)> load;
    std::optional<numerics::ScalarFn> clamp;     ///< g
    std::optional<numerics::TensorFn> essential; ///< G (absent: zero)
    std::optional<numerics::ScalarFn> exact_u;

    /// Nonlinear cases: Dirichlet angle and, for manufactured data, the exact
    /// angle and the angle-equation source.
    std::function<double(const Vec2&)> eta;
    std::optional<numerics::ScalarFn> exact_phi;
    std::function<double(const Vec2&)> angle_source;
    /// False when eta is not an H^1 trace and the energy diverges under refinement.
    bool energy_error_reported = true;

    /// T(x) of a linear case.
    SymTensor tensor(const Vec2& x) const;
    LinearProblem linear_problem() const;
    NonlinearProblem nonlinear_problem() const;
    BoundarySpec boundary_spec(const Mesh& mesh) const { return BoundarySpec::uniform(mesh, boundary); }
};

/// Unit director fields nu^(1..3). Kind 2 is piecewise constant with jumps on
/// x = 1/2 and on y = 1/2 for x < 1/2; kind 3 is a normalized rotated dipole
/// with singularities at (1/4, 1/2) and (3/4, 1/2). Exact hits of the singular
/// sets raise DomainError.
numerics::VectorFn director_field(int kind);

/// Dirichlet angles eta_1..3.
std::function<double(const Vec2&)> eta_field(int kind);

/// Load f = B (divDiv M + q^2 T:M) + m u with M = grad grad u + q^2 T u, from
/// fourth-order jets of u and second-order jets of T.
double manufactured_load(const numerics::ScalarFn& u, const numerics::TensorFn& t, const ModelParams& p,
                         const Vec2& x);

/// Exact tensor M = grad grad u + q^2 T u.
SymTensor manufactured_tensor(const numerics::ScalarFn& u, const numerics::TensorFn& t, double q, const Vec2& x);

Case linear_manufactured(double q);
Case unknown_solution_linear(int kind);
Case nonlinear_manufactured(double q);
Case nonlinear_eta(int kind);

/// Optional overrides; B defaults to q^-4 for manufactured cases when only q is set.
struct CaseOverrides {
    std::optional<double> q;
    std::optional<double> B;
    std::optional<double> K;
    std::optional<double> m;
    bool zero_load = false;
};

/// lin-manufactured, lin-field-{1,2,3}, nonlin-manufactured, nonlin-eta-{1,2,3}.
/// Throws ConfigurationError for unknown names.
Case case_by_name(const std::string& name, const CaseOverrides& overrides = {});
std::vector<std::string> case_names();

} // namespace smectic
