#pragma once

#include "smectic/tensor.hpp"

#include <vector>

namespace smectic::numerics {

/// Quadrature rule on a reference entity.
///
/// Triangle rules live on the reference triangle (0,0),(1,0),(0,1), with
/// weights summing to its area 1/2. Edge rules live on [0,1] with weights
/// summing to 1. Every shipped rule has strictly positive weights.
struct QuadratureRule {
    std::vector<Vec2> points;    ///< for edge rules only points[i].x() is used
    std::vector<double> weights;
    int degree = 0;              ///< polynomial exactness degree

    std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxTriangleDegree = 20;
inline constexpr int kMaxEdgePoints = 20;

/// Rule exact for bivariate polynomials up to `degree` (1 <= degree <= 20).
/// Throws ConfigurationError for unsupported degrees.
const QuadratureRule& triangle_rule(int degree);

/// n-point Gauss-Legendre rule on [0,1], exact up to degree 2n-1 (1 <= n <= 20).
const QuadratureRule& edge_rule(int n_points);

/// Gauss-Jacobi nodes/weights on [-1,1] for the weight (1-x)^alpha (1+x)^beta.
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace smectic::numerics
