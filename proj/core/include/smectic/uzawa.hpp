#pragma once

#include "smectic/linear_scheme.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace smectic {

/// Data of the coupled tensor/angle problem. The coefficient is T(phi) with
/// nu = (cos phi, sin phi); the angle is prescribed on the whole boundary.
struct NonlinearProblem {
    ModelParams params;
    std::function<double(const Vec2&)> load;         ///< f
    std::optional<numerics::ScalarFn> clamp;         ///< g
    std::optional<numerics::TensorFn> essential;     ///< G; absent means G = 0
    std::function<double(const Vec2&)> eta;          ///< Dirichlet angle
    std::function<double(const Vec2&)> angle_source; ///< f_phi; empty means zero
};

struct UzawaConfig {
    double alpha = 0.5;
    double tol_M = 1e-6;
    double tol_phi = 1e-6;
    int max_outer = 25;
    int max_inner = 50;
    int poisson_degree = 4;

    /// Throws ConfigurationError unless alpha, tolerances > 0 and caps >= 1.
    void validate() const;
};

enum class UzawaStatus { Converged, OuterCapReached };
std::string to_string(UzawaStatus s);

struct OuterIteration {
    double res_M = 0.0;
    std::vector<double> res_phi; ///< one entry per inner iteration
};

struct IterationLog {
    std::vector<OuterIteration> outer;
    UzawaStatus status = UzawaStatus::OuterCapReached;

    int num_outer() const { return static_cast<int>(outer.size()); }
    int inner_total() const;
    double inner_mean() const;
    double final_res_M() const { return outer.empty() ? 0.0 : outer.back().res_M; }
};

struct NonlinearSolution {
    std::shared_ptr<const HddSpace> space;
    std::shared_ptr<const P2Space> angle_space;
    std::shared_ptr<const QuadTable> quad;
    ModelParams params;
    Eigen::VectorXd m;   ///< full coefficient vector of M_h
    Eigen::VectorXd phi; ///< P2 coefficients of phi_h
    PointValues load;    ///< f at quadrature points
    TensorValues tensor; ///< T(phi_h) at quadrature points
    PointValues u_tilde;
    P1Field u;           ///< u_h(M_h, phi_h)
    double energy = 0.0; ///< J(M_h, phi_h; f)
    IterationLog log;
};

/// Discrete harmonic extension: interior P2 values solving K(grad phi, grad d) = 0
/// for the given boundary entries (interior entries of `boundary` are ignored).
Eigen::VectorXd harmonic_extension(const P2Space& space, const Eigen::VectorXd& boundary);

/// Uzawa-type iteration: tensor step with T(phi_h), damped angle updates, and
/// the defect norm res_M of the tensor equation at the updated angle. The
/// default initial angle is the harmonic extension of the boundary L2
/// projection of eta. A given `phi_init` must match that boundary trace.
NonlinearSolution uzawa_solve(const ClassifiedMesh& mesh, ElementCache& cache, const NonlinearProblem& problem,
                              const UzawaConfig& config = {}, const Discretization& disc = {},
                              const std::optional<Eigen::VectorXd>& phi_init = std::nullopt);

/// J = (B/2)||M_h||^2 + (m/2)||u_h||^2 + (K/2)||grad phi_h||^2 - (f, u_h).
double discrete_energy(const HddSpace& space, const P2Space& angle_space, const QuadTable& quad,
                       const Eigen::VectorXd& m, const P1Field& u, const Eigen::VectorXd& phi, const PointValues& f,
                       const ModelParams& p);

/// err = sqrt|J* - J| with J* the Aitken limit of the last three energies.
struct EnergySequence {
    double limit = 0.0;
    bool degenerate = false;
    std::vector<double> error;
};
EnergySequence energy_error_nonlinear(const std::vector<double>& energies);

struct NonlinearErrors {
    double err_L2 = 0.0;     ///< sqrt(B) ||M - M_h||
    double err_divdiv = 0.0; ///< ||B(divDiv + q^2 T(phi):)(M - M_h)||
    double err_u = 0.0;      ///< ||u - u_h||
    double err_phi = 0.0;    ///< sqrt(K) ||grad(phi - phi_h)||
};

/// Errors against exact u and phi; M = grad grad u + q^2 T(phi) u.
NonlinearErrors compute_nonlinear_errors(const NonlinearSolution& sol, const numerics::ScalarFn& u,
                                         const numerics::ScalarFn& phi);

} // namespace smectic
