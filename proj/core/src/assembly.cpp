#include "smectic/assembly.hpp"

#include "smectic/error.hpp"
#include "smectic/numerics/compensated.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>
#include <utility>

namespace smectic {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Local slots expressed through the distinct global coefficients they touch.
struct Gather {
    std::vector<int> globals;
    Eigen::MatrixXd p; // 15 x globals.size()

    void build(const HddSpace& space, int t)
    {
        globals.clear();
        for (int j = 0; j < kLocalDofs; ++j) {
            for (const auto& e : space.local_map(t, j)) {
                if (std::find(globals.begin(), globals.end(), e.global) == globals.end()) {
                    globals.push_back(e.global);
                }
            }
        }
        p.setZero(kLocalDofs, static_cast<Eigen::Index>(globals.size()));
        for (int j = 0; j < kLocalDofs; ++j) {
            for (const auto& e : space.local_map(t, j)) {
                const auto c = std::find(globals.begin(), globals.end(), e.global) - globals.begin();
                p(j, c) += e.coeff;
            }
        }
    }
};

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& trips)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

struct CompensatedTriplet {
    int row;
    int col;
    numerics::DoubleDouble value;
};

// Duplicates are summed in double-double; returns (hi, lo) on one pattern.
std::pair<SparseMatrix, SparseMatrix> from_compensated(Eigen::Index rows, Eigen::Index cols,
                                                       std::vector<CompensatedTriplet>& trips)
{
    std::sort(trips.begin(), trips.end(), [](const CompensatedTriplet& a, const CompensatedTriplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    Triplets hi;
    Triplets lo;
    std::size_t i = 0;
    while (i < trips.size()) {
        numerics::DoubleDouble acc = trips[i].value;
        std::size_t j = i + 1;
        while (j < trips.size() && trips[j].row == trips[i].row && trips[j].col == trips[i].col) {
            acc += trips[j].value;
            ++j;
        }
        hi.emplace_back(trips[i].row, trips[i].col, acc.hi);
        lo.emplace_back(trips[i].row, trips[i].col, acc.lo);
        i = j;
    }
    return {from_triplets(rows, cols, hi), from_triplets(rows, cols, lo)};
}

template <class Fn>
auto guarded(int t, Fn&& fn)
{
    try {
        return fn();
    } catch (const DomainError& e) {
        std::ostringstream msg;
        msg << "assembly: coefficient evaluation failed on element " << t << ": " << e.what();
        throw AssemblyError(msg.str());
    }
}

} // namespace

void ModelParams::validate() const
{
    if (!(m > 0.0) || !(q > 0.0) || !(K > 0.0) || !(B > 0.0) || B > 1.0) {
        std::ostringstream msg;
        msg << "model parameters must satisfy m, q, K > 0 and 0 < B <= 1 (got m=" << m << ", B=" << B << ", q=" << q
            << ", K=" << K << ")";
        throw ConfigurationError(msg.str());
    }
}

QuadTable::QuadTable(const Mesh& mesh, int degree)
    : rule_(&numerics::triangle_rule(degree)), num_triangles_(mesh.num_triangles()),
      nq_(static_cast<int>(rule_->size()))
{
    points_.resize(static_cast<std::size_t>(num_triangles_) * rule_->size());
    weights_.resize(points_.size());
    for (int t = 0; t < num_triangles_; ++t) {
        const auto p = mesh.triangle_points(t);
        const double jac = 2.0 * mesh.area(t);
        for (int k = 0; k < nq_; ++k) {
            const Vec2& r = rule_->points[static_cast<std::size_t>(k)];
            points_[index(t, k)] = p[0] + r.x() * (p[1] - p[0]) + r.y() * (p[2] - p[0]);
            weights_[index(t, k)] = jac * rule_->weights[static_cast<std::size_t>(k)];
        }
    }
}

TensorValues tabulate_tensor(const QuadTable& quad, const std::function<SymTensor(const Vec2&)>& f)
{
    TensorValues v(quad.size());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        guarded(t, [&] {
            for (int k = 0; k < quad.points_per_triangle(); ++k) {
                v[quad.index(t, k)] = f(quad.point(t, k));
            }
            return 0;
        });
    }
    return v;
}

PointValues tabulate_scalar(const QuadTable& quad, const std::function<double(const Vec2&)>& f)
{
    PointValues v(quad.size());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        guarded(t, [&] {
            for (int k = 0; k < quad.points_per_triangle(); ++k) {
                v[quad.index(t, k)] = f(quad.point(t, k));
            }
            return 0;
        });
    }
    return v;
}

HessianValues tabulate_hessian(const QuadTable& quad, const numerics::ScalarFn& g)
{
    HessianValues h;
    h.value.resize(quad.size());
    h.hessian.resize(quad.size());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        guarded(t, [&] {
            for (int k = 0; k < quad.points_per_triangle(); ++k) {
                const auto s = numerics::second_order(g, quad.point(t, k));
                h.value[quad.index(t, k)] = s.value;
                h.hessian[quad.index(t, k)] = s.hessian;
            }
            return 0;
        });
    }
    return h;
}

PointValues tabulate_p2(const QuadTable& quad, const P2Space& space, const Eigen::VectorXd& phi)
{
    std::vector<P2Shape> shapes;
    for (int k = 0; k < quad.points_per_triangle(); ++k) {
        shapes.emplace_back(quad.reference_point(k));
    }
    PointValues v(quad.size());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        const auto dofs = space.local_dofs(t);
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < 6; ++i) {
                s += phi(dofs[i]) * shapes[static_cast<std::size_t>(k)].value[i];
            }
            v[quad.index(t, k)] = s;
        }
    }
    return v;
}

TensorValues director_tensor_values(const PointValues& phi)
{
    TensorValues v(phi.size());
    std::transform(phi.begin(), phi.end(), v.begin(), [](double a) { return director_tensor(a); });
    return v;
}

TensorValues director_tensor_derivative_values(const PointValues& phi)
{
    TensorValues v(phi.size());
    std::transform(phi.begin(), phi.end(), v.begin(), [](double a) { return director_tensor_derivative(a); });
    return v;
}

HddValues evaluate_hdd(const HddSpace& space, const QuadTable& quad, const Eigen::VectorXd& y)
{
    HddValues out;
    out.value.resize(quad.size());
    out.div_div.resize(quad.size());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        const LocalElement& el = space.element(t);
        const ShapeTable& tab = el.shape().table(quad.rule());
        DofValues d = space.local_dofs(y, t);
        DofValues dv;
        DofValues dd;
        for (int j = 0; j < kLocalDofs; ++j) {
            dv(j) = d(j) * el.value_scale(j);
            dd(j) = d(j) * el.div_div_scale(j);
        }
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            SymTensor v;
            double div = 0.0;
            for (int j = 0; j < kLocalDofs; ++j) {
                const std::size_t s = static_cast<std::size_t>(k * kLocalDofs + j);
                v += dv(j) * tab.value[s];
                div += dd(j) * tab.div_div[s];
            }
            out.value[quad.index(t, k)] = v;
            out.div_div[quad.index(t, k)] = div;
        }
    }
    return out;
}

GramSystem assemble_gram(const HddSpace& space, const QuadTable& quad, const TensorValues& tv, const ModelParams& p)
{
    p.validate();
    if (tv.size() != quad.size() || quad.num_triangles() != space.mesh().num_triangles()) {
        throw AssemblyError("assemble_gram: coefficient table does not match the mesh");
    }
    const int nq = quad.points_per_triangle();
    const double q2 = p.q * p.q;
    const double c_div = p.B * p.B / p.m;
    std::vector<CompensatedTriplet> ff;
    std::vector<CompensatedTriplet> fc;
    ff.reserve(static_cast<std::size_t>(quad.num_triangles()) * 400);
    Gather gather;
    Eigen::MatrixXd g(kLocalDofs, 4 * nq);
    numerics::DoubleDouble kt[kLocalDofs][kLocalDofs];
    std::vector<numerics::DoubleDouble> kl;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        const LocalElement& el = space.element(t);
        const ShapeTable& tab = el.shape().table(quad.rule());
        for (int k = 0; k < nq; ++k) {
            const double w = quad.weight(t, k);
            const double sb = std::sqrt(w * p.B);
            const double sd = std::sqrt(w * c_div);
            const SymTensor& tk = tv[quad.index(t, k)];
            for (int j = 0; j < kLocalDofs; ++j) {
                const std::size_t s = static_cast<std::size_t>(k * kLocalDofs + j);
                const SymTensor v = el.value_scale(j) * tab.value[s];
                const double l = el.div_div_scale(j) * tab.div_div[s] + q2 * contract(tk, v);
                g(j, 4 * k) = sb * v.xx;
                g(j, 4 * k + 1) = sb * std::sqrt(2.0) * v.xy;
                g(j, 4 * k + 2) = sb * v.yy;
                g(j, 4 * k + 3) = sd * l;
            }
        }
        for (int i = 0; i < kLocalDofs; ++i) {
            for (int j = i; j < kLocalDofs; ++j) {
                numerics::DoubleDouble acc;
                for (Eigen::Index r = 0; r < g.cols(); ++r) {
                    acc += numerics::two_prod(g(i, r), g(j, r));
                }
                kt[i][j] = acc;
                kt[j][i] = acc;
            }
        }
        gather.build(space, t);
        const auto n = static_cast<Eigen::Index>(gather.globals.size());
        kl.assign(static_cast<std::size_t>(n * n), {});
        for (int i = 0; i < kLocalDofs; ++i) {
            for (Eigen::Index a = 0; a < n; ++a) {
                const double pa = gather.p(i, a);
                if (pa == 0.0) {
                    continue;
                }
                for (int j = 0; j < kLocalDofs; ++j) {
                    for (Eigen::Index b = a; b < n; ++b) {
                        const double pb = gather.p(j, b);
                        if (pb != 0.0) {
                            kl[static_cast<std::size_t>(a * n + b)] += (pa * pb) * kt[i][j];
                        }
                    }
                }
            }
        }
        for (Eigen::Index a = 0; a < n; ++a) {
            const int ga = gather.globals[static_cast<std::size_t>(a)];
            for (Eigen::Index b = a; b < n; ++b) {
                const int gb = gather.globals[static_cast<std::size_t>(b)];
                const numerics::DoubleDouble val = kl[static_cast<std::size_t>(a * n + b)];
                const int fa = space.free_index(ga);
                const int fb = space.free_index(gb);
                if (fa >= 0 && fb >= 0) {
                    ff.push_back({fa, fb, val});
                    if (a != b) {
                        ff.push_back({fb, fa, val});
                    }
                } else if (fa >= 0) {
                    fc.push_back({fa, space.fixed_index(gb), val});
                } else if (fb >= 0) {
                    fc.push_back({fb, space.fixed_index(ga), val});
                }
            }
        }
    }
    GramSystem sys;
    std::tie(sys.free_free, sys.free_free_lo) = from_compensated(space.num_free(), space.num_free(), ff);
    std::tie(sys.free_fixed, sys.free_fixed_lo) = from_compensated(space.num_free(), space.num_fixed(), fc);
    return sys;
}

Eigen::VectorXd GramSystem::lifted(const HddSpace& space, const Eigen::VectorXd& load, const Eigen::VectorXd& y) const
{
    Eigen::VectorXd b = space.restrict_free(load);
    if (space.num_fixed() > 0) {
        const Eigen::VectorXd yf = space.restrict_fixed(y);
        b -= free_fixed * yf;
        if (free_fixed_lo.size() > 0) {
            b -= free_fixed_lo * yf;
        }
    }
    return b;
}

Eigen::VectorXd assemble_load(const HddSpace& space, const QuadTable& quad, const TensorValues& tv,
                              const ModelParams& p, const PointValues& f, const HessianValues* g)
{
    p.validate();
    if (tv.size() != quad.size() || f.size() != quad.size() ||
        (g != nullptr && (g->value.size() != quad.size() || g->hessian.size() != quad.size()))) {
        throw AssemblyError("assemble_load: data tables do not match the quadrature");
    }
    const double q2 = p.q * p.q;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(space.num_dofs());
    for (int t = 0; t < quad.num_triangles(); ++t) {
        const LocalElement& el = space.element(t);
        const ShapeTable& tab = el.shape().table(quad.rule());
        DofValues bt = DofValues::Zero();
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const std::size_t idx = quad.index(t, k);
            const double w = quad.weight(t, k);
            for (int j = 0; j < kLocalDofs; ++j) {
                const std::size_t s = static_cast<std::size_t>(k * kLocalDofs + j);
                const SymTensor v = el.value_scale(j) * tab.value[s];
                const double dd = el.div_div_scale(j) * tab.div_div[s];
                double val = (p.B / p.m) * f[idx] * (dd + q2 * contract(tv[idx], v));
                if (g != nullptr) {
                    val -= p.B * (dd * g->value[idx] - contract(v, g->hessian[idx]));
                }
                bt(j) += w * val;
            }
        }
        for (int j = 0; j < kLocalDofs; ++j) {
            for (const auto& e : space.local_map(t, j)) {
                load(e.global) += e.coeff * bt(j);
            }
        }
    }
    return load;
}

Eigen::VectorXd assemble_rhs_linear(const HddSpace& space, const GramSystem& gram, const QuadTable& quad,
                                    const TensorValues& t, const ModelParams& p, const PointValues& f,
                                    const HessianValues* g, const Eigen::VectorXd& essential)
{
    const auto& cm = space.classified();
    const bool needs_g = cm.has_tag(BoundaryTag::HardClamped) || cm.has_tag(BoundaryTag::SimplySupported) ||
                         cm.has_tag(BoundaryTag::SoftClamped);
    if (needs_g && g == nullptr) {
        throw ConfigurationError(
            "assemble_rhs_linear: boundary data g is required for hard clamped, simply supported or soft clamped edges");
    }
    return gram.lifted(space, assemble_load(space, quad, t, p, f, g), essential);
}

double gram_inner(const HddSpace& space, const QuadTable& quad, const TensorValues& tv, const ModelParams& p,
                  const Eigen::VectorXd& y1, const Eigen::VectorXd& y2)
{
    const HddValues a = evaluate_hdd(space, quad, y1);
    const HddValues b = evaluate_hdd(space, quad, y2);
    const double q2 = p.q * p.q;
    double s = 0.0;
    for (int t = 0; t < quad.num_triangles(); ++t) {
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const std::size_t i = quad.index(t, k);
            const double la = a.div_div[i] + q2 * contract(tv[i], a.value[i]);
            const double lb = b.div_div[i] + q2 * contract(tv[i], b.value[i]);
            s += quad.weight(t, k) * (p.B * contract(a.value[i], b.value[i]) + p.B * p.B / p.m * la * lb);
        }
    }
    return s;
}

PoissonSystem assemble_poisson(const P2Space& space, double k, int degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = numerics::triangle_rule(degree);
    std::vector<P2Shape> shapes;
    for (const auto& r : rule.points) {
        shapes.emplace_back(r);
    }
    const int nb = static_cast<int>(space.boundary_dofs().size());
    std::vector<int> bpos(static_cast<std::size_t>(space.num_dofs()), -1);
    for (int i = 0; i < nb; ++i) {
        bpos[static_cast<std::size_t>(space.boundary_dofs()[static_cast<std::size_t>(i)])] = i;
    }
    Triplets ii;
    Triplets ib;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto p = mesh.triangle_points(t);
        Eigen::Matrix2d jac;
        jac.col(0) = p[1] - p[0];
        jac.col(1) = p[2] - p[0];
        const Eigen::Matrix2d inv_t = jac.inverse().transpose();
        const double det = jac.determinant();
        Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            Eigen::Matrix<double, 2, 6> grads;
            for (std::size_t i = 0; i < 6; ++i) {
                grads.col(static_cast<Eigen::Index>(i)) = inv_t * shapes[q].grad_ref[i];
            }
            a += (k * rule.weights[q] * det) * grads.transpose() * grads;
        }
        const auto dofs = space.local_dofs(t);
        for (std::size_t i = 0; i < 6; ++i) {
            const int ri = space.interior_index(dofs[i]);
            if (ri < 0) {
                continue;
            }
            for (std::size_t j = 0; j < 6; ++j) {
                const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                const int cj = space.interior_index(dofs[j]);
                if (cj >= 0) {
                    ii.emplace_back(ri, cj, v);
                } else {
                    ib.emplace_back(ri, bpos[static_cast<std::size_t>(dofs[j])], v);
                }
            }
        }
    }
    const auto ni = static_cast<Eigen::Index>(space.interior_dofs().size());
    return {from_triplets(ni, ni, ii), from_triplets(ni, nb, ib)};
}

Eigen::VectorXd assemble_phi_residual(const P2Space& space, const QuadTable& quad, const Eigen::VectorXd& phi,
                                      const TensorValues& m_values, const PointValues& u_values,
                                      const ModelParams& p, const PointValues* f_phi)
{
    const Mesh& mesh = space.mesh();
    if (quad.num_triangles() != mesh.num_triangles() || m_values.size() != quad.size() ||
        u_values.size() != quad.size() || phi.size() != space.num_dofs() ||
        (f_phi != nullptr && f_phi->size() != quad.size())) {
        throw AssemblyError("assemble_phi_residual: fields do not live on the same mesh");
    }
    std::vector<P2Shape> shapes;
    for (int k = 0; k < quad.points_per_triangle(); ++k) {
        shapes.emplace_back(quad.reference_point(k));
    }
    const double bq2 = p.B * p.q * p.q;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.interior_dofs().size()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto pts = mesh.triangle_points(t);
        Eigen::Matrix2d jac;
        jac.col(0) = pts[1] - pts[0];
        jac.col(1) = pts[2] - pts[0];
        const Eigen::Matrix2d inv_t = jac.inverse().transpose();
        const auto dofs = space.local_dofs(t);
        Eigen::Matrix<double, 6, 1> rt = Eigen::Matrix<double, 6, 1>::Zero();
        for (int k = 0; k < quad.points_per_triangle(); ++k) {
            const auto& sh = shapes[static_cast<std::size_t>(k)];
            std::array<Vec2, 6> grads;
            double value = 0.0;
            Vec2 grad = Vec2::Zero();
            for (std::size_t i = 0; i < 6; ++i) {
                grads[i] = inv_t * sh.grad_ref[i];
                value += phi(dofs[i]) * sh.value[i];
                grad += phi(dofs[i]) * grads[i];
            }
            const std::size_t idx = quad.index(t, k);
            double source = bq2 * contract(m_values[idx], director_tensor_derivative(value)) * u_values[idx];
            if (f_phi != nullptr) {
                source -= (*f_phi)[idx];
            }
            const double w = quad.weight(t, k);
            for (std::size_t i = 0; i < 6; ++i) {
                rt(static_cast<Eigen::Index>(i)) += w * (p.K * grad.dot(grads[i]) + source * sh.value[i]);
            }
        }
        for (std::size_t i = 0; i < 6; ++i) {
            const int ri = space.interior_index(dofs[i]);
            if (ri >= 0) {
                r(ri) += rt(static_cast<Eigen::Index>(i));
            }
        }
    }
    return r;
}

} // namespace smectic
