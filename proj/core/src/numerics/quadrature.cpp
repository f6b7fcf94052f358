#include "smectic/numerics/quadrature.hpp"

#include "smectic/error.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <mutex>
#include <string>

namespace smectic::numerics {

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights)
{
    // Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        jacobi(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double t = 2.0 * m + ab;
            const double b2 = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (t * t * (t + 1.0) * (t - 1.0));
            jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(b2);
        }
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0)
                                - std::lgamma(ab + 2.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        nodes[static_cast<std::size_t>(k)] = eig.eigenvalues()(k);
        const double v0 = eig.eigenvectors()(0, k);
        weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
    }
}

namespace {

QuadratureRule make_edge_rule(int n)
{
    std::vector<double> x;
    std::vector<double> w;
    gauss_jacobi(n, 0.0, 0.0, x, w);
    QuadratureRule rule;
    rule.degree = 2 * n - 1;
    for (int k = 0; k < n; ++k) {
        rule.points.emplace_back(0.5 * (x[static_cast<std::size_t>(k)] + 1.0), 0.0);
        rule.weights.push_back(0.5 * w[static_cast<std::size_t>(k)]);
    }
    return rule;
}

// Conical product rule: int_T f = int_0^1 (1-s) int_0^1 f(s, (1-s) t) dt ds.
QuadratureRule make_triangle_rule(int degree)
{
    const int n = (degree + 2) / 2;
    std::vector<double> xs;
    std::vector<double> ws;
    std::vector<double> xt;
    std::vector<double> wt;
    gauss_jacobi(n, 1.0, 0.0, xs, ws);
    gauss_jacobi(n, 0.0, 0.0, xt, wt);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (xs[static_cast<std::size_t>(i)] + 1.0);
        const double wsi = 0.25 * ws[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double t = 0.5 * (xt[static_cast<std::size_t>(j)] + 1.0);
            rule.points.emplace_back(s, (1.0 - s) * t);
            rule.weights.push_back(wsi * 0.5 * wt[static_cast<std::size_t>(j)]);
        }
    }
    return rule;
}

} // namespace

const QuadratureRule& triangle_rule(int degree)
{
    if (degree < 1 || degree > kMaxTriangleDegree) {
        throw ConfigurationError("triangle_rule: unsupported degree " + std::to_string(degree)
                                 + " (supported degrees: 1.." + std::to_string(kMaxTriangleDegree) + ")");
    }
    static std::array<QuadratureRule, kMaxTriangleDegree + 1> rules;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int d = 1; d <= kMaxTriangleDegree; ++d) {
            rules[static_cast<std::size_t>(d)] = make_triangle_rule(d);
        }
    });
    return rules[static_cast<std::size_t>(degree)];
}

const QuadratureRule& edge_rule(int n_points)
{
    if (n_points < 1 || n_points > kMaxEdgePoints) {
        throw ConfigurationError("edge_rule: unsupported number of points " + std::to_string(n_points)
                                 + " (supported: 1.." + std::to_string(kMaxEdgePoints) + ")");
    }
    static std::array<QuadratureRule, kMaxEdgePoints + 1> rules;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int n = 1; n <= kMaxEdgePoints; ++n) {
            rules[static_cast<std::size_t>(n)] = make_edge_rule(n);
        }
    });
    return rules[static_cast<std::size_t>(n_points)];
}

} // namespace smectic::numerics
