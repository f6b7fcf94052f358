#include "smectic/hdd_element.hpp"

#include "smectic/error.hpp"
#include "smectic/numerics/poly2.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smectic {

namespace {

namespace poly = numerics::poly;
using Monomials = poly::CubicMonomials;
constexpr int kMono = Monomials::kSize;
using Poly = std::array<double, kMono>;

struct VectorPoly {
    Poly x{};
    Poly y{};
};

Poly monomial(int i, int j, double c = 1.0)
{
    Poly p{};
    p[static_cast<std::size_t>(poly::index(i, j))] = c;
    return p;
}

Poly multiply(const Poly& a, const Poly& b)
{
    Poly r{};
    for (int k1 = 0; k1 < kMono; ++k1) {
        if (a[static_cast<std::size_t>(k1)] == 0.0) {
            continue;
        }
        const auto [i1, j1] = poly::exponents(k1);
        for (int k2 = 0; k2 < kMono; ++k2) {
            const auto [i2, j2] = poly::exponents(k2);
            if (i1 + i2 + j1 + j2 > Monomials::kDegree) {
                continue;
            }
            r[static_cast<std::size_t>(poly::index(i1 + i2, j1 + j2))] +=
                a[static_cast<std::size_t>(k1)] * b[static_cast<std::size_t>(k2)];
        }
    }
    return r;
}

// Spanning sets of RT0 and RT1 (degrees 1 and 2).
std::vector<VectorPoly> rt0_fields()
{
    return {{monomial(0, 0), Poly{}}, {Poly{}, monomial(0, 0)}, {monomial(1, 0), monomial(0, 1)}};
}

std::vector<VectorPoly> rt1_fields()
{
    return {
        {monomial(0, 0), Poly{}},         {monomial(1, 0), Poly{}},         {monomial(0, 1), Poly{}},
        {Poly{}, monomial(0, 0)},         {Poly{}, monomial(1, 0)},         {Poly{}, monomial(0, 1)},
        {monomial(2, 0), monomial(1, 1)}, {monomial(1, 1), monomial(0, 2)},
    };
}

using Coeffs = Eigen::Matrix<double, ReferenceShape::kCoeffs, 1>;

TensorSample sample_polynomial(const double* c, const Vec2& xi)
{
    const Monomials m(xi);
    TensorSample s;
    for (int k = 0; k < kMono; ++k) {
        const auto u = static_cast<std::size_t>(k);
        const double cxx = c[k];
        const double cxy = c[kMono + k];
        const double cyy = c[2 * kMono + k];
        s.value += SymTensor{cxx * m.value[u], cxy * m.value[u], cyy * m.value[u]};
        s.dx += SymTensor{cxx * m.dx[u], cxy * m.dx[u], cyy * m.dx[u]};
        s.dy += SymTensor{cxx * m.dy[u], cxy * m.dy[u], cyy * m.dy[u]};
    }
    return s;
}

double div_div_polynomial(const double* c, const Monomials& m)
{
    double r = 0.0;
    for (int k = 0; k < kMono; ++k) {
        const auto u = static_cast<std::size_t>(k);
        r += c[k] * m.dxx[u] + 2.0 * c[kMono + k] * m.dxy[u] + c[2 * kMono + k] * m.dyy[u];
    }
    return r;
}

SymTensor value_polynomial(const double* c, const Monomials& m)
{
    SymTensor v;
    for (int k = 0; k < kMono; ++k) {
        const auto u = static_cast<std::size_t>(k);
        v.xx += c[k] * m.value[u];
        v.xy += c[kMono + k] * m.value[u];
        v.yy += c[2 * kMono + k] * m.value[u];
    }
    return v;
}

struct Normalization {
    Vec2 centroid;
    double diameter;
};

Normalization normalization(const Triangle& tri)
{
    const Vec2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
    const double h = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(), (tri[0] - tri[2]).norm()});
    return {c, h};
}

Triangle normalize(const Triangle& tri, const Normalization& nz)
{
    return {(tri[0] - nz.centroid) / nz.diameter, (tri[1] - nz.centroid) / nz.diameter,
            (tri[2] - nz.centroid) / nz.diameter};
}

double signed_area(const Triangle& t)
{
    return 0.5 * ((t[1].x() - t[0].x()) * (t[2].y() - t[0].y()) - (t[2].x() - t[0].x()) * (t[1].y() - t[0].y()));
}

} // namespace

ReferenceShape::ReferenceShape(const Triangle& normalized) : vertices_(normalized)
{
    if (!(signed_area(vertices_) > 0.0)) {
        throw ElementConstructionError("build_local_element: triangle is degenerate or clockwise");
    }
    const auto rt0 = rt0_fields();
    const auto rt1 = rt1_fields();
    const int n_span = static_cast<int>(rt0.size() * rt1.size());
    Eigen::MatrixXd span(kCoeffs, n_span);
    int col = 0;
    for (const auto& a : rt0) {
        for (const auto& b : rt1) {
            const Poly xx = multiply(a.x, b.x);
            const Poly yy = multiply(a.y, b.y);
            const Poly xy1 = multiply(a.x, b.y);
            const Poly xy2 = multiply(a.y, b.x);
            for (int k = 0; k < kMono; ++k) {
                const auto u = static_cast<std::size_t>(k);
                span(k, col) = xx[u];
                span(kMono + k, col) = 0.5 * (xy1[u] + xy2[u]);
                span(2 * kMono + k, col) = yy[u];
            }
            ++col;
        }
    }

    const auto& rule = numerics::edge_rule(4);
    Eigen::MatrixXd dof_matrix(kLocalDofs, n_span);
    for (int j = 0; j < n_span; ++j) {
        const Coeffs c = span.col(j);
        dof_matrix.col(j) =
            evaluate_dofs(vertices_, [&](const Vec2& xi) { return sample_polynomial(c.data(), xi); }, rule);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dof_matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    singular_values_ = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, singular_values_(0));
    int rank = 0;
    for (Eigen::Index i = 0; i < singular_values_.size(); ++i) {
        rank += singular_values_(i) > tol ? 1 : 0;
    }
    if (rank != kLocalDofs) {
        std::ostringstream msg;
        msg << "build_local_element: DOF matrix has rank " << rank << " (expected " << kLocalDofs
            << "); singular values:";
        for (Eigen::Index i = 0; i < singular_values_.size(); ++i) {
            msg << ' ' << singular_values_(i);
        }
        throw ElementConstructionError(msg.str());
    }
    // Right inverse: dof_matrix * pinv = I, so span * pinv is the dual basis.
    const Eigen::MatrixXd pinv = svd.matrixV().leftCols(kLocalDofs) *
                                 singular_values_.cwiseInverse().asDiagonal() *
                                 svd.matrixU().transpose();
    coeffs_ = span * pinv;
}

const ShapeTable& ReferenceShape::table(const numerics::QuadratureRule& rule) const
{
    const std::lock_guard<std::mutex> lock(mutex_);
    auto it = tables_.find(rule.degree);
    if (it != tables_.end()) {
        return it->second;
    }
    ShapeTable t;
    t.num_points = static_cast<int>(rule.size());
    t.value.resize(rule.size() * kLocalDofs);
    t.div_div.resize(rule.size() * kLocalDofs);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& r = rule.points[q];
        const Vec2 xi = vertices_[0] + r.x() * (vertices_[1] - vertices_[0]) + r.y() * (vertices_[2] - vertices_[0]);
        const Monomials m(xi);
        for (int j = 0; j < kLocalDofs; ++j) {
            const double* c = coeffs_.col(j).data();
            t.value[q * kLocalDofs + static_cast<std::size_t>(j)] = value_polynomial(c, m);
            t.div_div[q * kLocalDofs + static_cast<std::size_t>(j)] = div_div_polynomial(c, m);
        }
    }
    return tables_.emplace(rule.degree, std::move(t)).first->second;
}

LocalElement::LocalElement(const Triangle& tri, std::shared_ptr<const ReferenceShape> shape)
    : vertices_(tri), shape_(std::move(shape))
{
    const auto nz = normalization(tri);
    centroid_ = nz.centroid;
    diameter_ = nz.diameter;
    area_ = signed_area(tri);
    for (int j = 0; j < kLocalDofs; ++j) {
        scale_[static_cast<std::size_t>(j)] = dof_kind(j) == DofKind::NormalMoment ? 1.0 / diameter_ : 1.0;
    }
}

SymTensor LocalElement::basis_value(int j, const Vec2& x) const
{
    const Monomials m(normalized(x));
    return value_scale(j) * value_polynomial(shape_->coefficients().col(j).data(), m);
}

TensorSample LocalElement::basis_sample(int j, const Vec2& x) const
{
    TensorSample s = sample_polynomial(shape_->coefficients().col(j).data(), normalized(x));
    const double w = value_scale(j);
    s.value *= w;
    s.dx *= w / diameter_;
    s.dy *= w / diameter_;
    return s;
}

double LocalElement::basis_div_div(int j, const Vec2& x) const
{
    const Monomials m(normalized(x));
    return div_div_scale(j) * div_div_polynomial(shape_->coefficients().col(j).data(), m);
}

Eigen::Matrix<double, ReferenceShape::kCoeffs, 1> LocalElement::polynomial(const DofValues& dofs) const
{
    DofValues scaled;
    for (int j = 0; j < kLocalDofs; ++j) {
        scaled(j) = dofs(j) * value_scale(j);
    }
    return shape_->coefficients() * scaled;
}

SymTensor LocalElement::value(const DofValues& dofs, const Vec2& x) const
{
    const Coeffs c = polynomial(dofs);
    return value_polynomial(c.data(), Monomials(normalized(x)));
}

TensorSample LocalElement::sample(const DofValues& dofs, const Vec2& x) const
{
    const Coeffs c = polynomial(dofs);
    TensorSample s = sample_polynomial(c.data(), normalized(x));
    s.dx *= 1.0 / diameter_;
    s.dy *= 1.0 / diameter_;
    return s;
}

double LocalElement::div_div(const DofValues& dofs, const Vec2& x) const
{
    const Coeffs c = polynomial(dofs);
    return div_div_polynomial(c.data(), Monomials(normalized(x))) / (diameter_ * diameter_);
}

LocalElement build_local_element(const Triangle& tri)
{
    const auto nz = normalization(tri);
    if (!(nz.diameter > 0.0) || !std::isfinite(nz.diameter)) {
        throw ElementConstructionError("build_local_element: triangle is degenerate");
    }
    return LocalElement(tri, std::make_shared<const ReferenceShape>(normalize(tri, nz)));
}

LocalElement ElementCache::get(const Triangle& tri)
{
    const auto nz = normalization(tri);
    if (!(nz.diameter > 0.0) || !std::isfinite(nz.diameter)) {
        throw ElementConstructionError("build_local_element: triangle is degenerate");
    }
    const Triangle xi = normalize(tri, nz);
    std::array<long long, 6> key{};
    for (std::size_t i = 0; i < 3; ++i) {
        key[2 * i] = std::llround(xi[i].x() * 1e12);
        key[2 * i + 1] = std::llround(xi[i].y() * 1e12);
    }
    const std::lock_guard<std::mutex> lock(mutex_);
    auto it = shapes_.find(key);
    if (it == shapes_.end()) {
        it = shapes_.emplace(key, std::make_shared<const ReferenceShape>(xi)).first;
    }
    return LocalElement(tri, it->second);
}

std::size_t ElementCache::num_shapes() const
{
    const std::lock_guard<std::mutex> lock(mutex_);
    return shapes_.size();
}

TensorSample sample_tensor(const numerics::TensorFn& q, const Vec2& x)
{
    const auto j = numerics::expand(q, x, 1);
    return {{j.xx.value(), j.xy.value(), j.yy.value()},
            {j.xx.coeff(1, 0), j.xy.coeff(1, 0), j.yy.coeff(1, 0)},
            {j.xx.coeff(0, 1), j.xy.coeff(0, 1), j.yy.coeff(0, 1)}};
}

DofValues eval_dofs(const Triangle& tri, const numerics::TensorFn& q, int edge_points)
{
    return evaluate_dofs(tri, [&](const Vec2& x) { return sample_tensor(q, x); }, numerics::edge_rule(edge_points));
}

DofValues interpolate_local(const LocalElement& element, const numerics::TensorFn& q, int edge_points)
{
    return eval_dofs(element.vertices(), q, edge_points);
}

} // namespace smectic
