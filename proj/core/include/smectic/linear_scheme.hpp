#pragma once

#include "smectic/aitken.hpp"
#include "smectic/assembly.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace smectic {

/// Data of the linear tensor projection problem.
struct LinearProblem {
    ModelParams params;
    std::function<SymTensor(const Vec2&)> tensor; ///< T(x)
    std::function<double(const Vec2&)> load;      ///< f(x)
    std::optional<numerics::ScalarFn> clamp;      ///< g, needed unless all edges are free
    std::optional<numerics::TensorFn> essential;  ///< G; absent means G = 0
};

struct Discretization {
    int quad_degree = 10;
    int edge_points = 6;
    double solver_tol = 1e-12;
};

struct LinearSolution {
    std::shared_ptr<const HddSpace> space;
    std::shared_ptr<const QuadTable> quad;
    ModelParams params;
    Eigen::VectorXd m;   ///< full coefficient vector of M_h
    TensorValues tensor; ///< T at quadrature points
    PointValues load;    ///< f at quadrature points
    PointValues u_tilde; ///< f/m - (B/m)(divDiv M_h + q^2 T:M_h) at quadrature points
    P1Field u;           ///< elementwise L2 projection of u_tilde
    double norm_divdiv = 0.0; ///< ||M_h||_divdiv
    double b_norm_sq = 0.0;   ///< B ||M_h||^2
    double u_norm_sq = 0.0;   ///< ||u_h||^2
    SolveStats solve_stats;
    int num_free = 0;
};

LinearSolution solve_linear(const ClassifiedMesh& mesh, ElementCache& cache, const LinearProblem& problem,
                            const Discretization& disc = {});

/// ũ and u_h from a tensor field; shared with the nonlinear scheme.
struct Density {
    PointValues u_tilde;
    P1Field u;
};
Density postprocess_density(const QuadTable& quad, const Mesh& mesh, const HddValues& m, const TensorValues& t,
                            const PointValues& f, const ModelParams& p);

/// L2 norm squared of a P1 field and its values at quadrature points.
double p1_norm_sq(const QuadTable& quad, const P1Field& u);
PointValues p1_values(const QuadTable& quad, const P1Field& u);

struct LinearErrors {
    double err_L2 = 0.0;      ///< sqrt(B) ||M - M_h||
    double err_divdiv = 0.0;  ///< ||B(divDiv + q^2 T:)(M - M_h)||
    double err_u = 0.0;       ///< ||u - u_h||
    double err_util = 0.0;    ///< ||u - ũ||
    double exact_norm_sq = 0.0;    ///< ||M||^2_divdiv
    double discrete_norm_sq = 0.0; ///< ||M_h||^2_divdiv
    double error_norm_sq = 0.0;    ///< ||M - M_h||^2_divdiv
    double err_proj_u = 0.0;       ///< ||u - Pi^1 u||
};

/// Errors against an exact density u. The exact tensor is M = grad grad u + q^2 T u
/// and divDiv M + q^2 T:M is recovered as (f - m u) / B.
LinearErrors compute_errors(const LinearSolution& sol, const LinearProblem& problem, const numerics::ScalarFn& u);

/// err(M_h) = sqrt(E*^2 - ||M_h||^2) with E* the Aitken limit of the norms.
struct EnergyErrorSequence {
    double limit = 0.0;
    bool degenerate = false;
    std::vector<double> error;
    std::vector<bool> clamped; ///< negative radicand set to zero
};
EnergyErrorSequence energy_error_sequence(const std::vector<double>& norms);

} // namespace smectic
