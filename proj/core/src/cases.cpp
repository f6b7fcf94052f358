#include "smectic/cases.hpp"

#include "smectic/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace smectic {

namespace {

using numerics::Jet;
using numerics::SymTensorJet;
using numerics::VectorJet;
constexpr double kPi = std::numbers::pi;

VectorJet director_one(const Jet& y)
{
    const Jet a = (kPi / 2.0) * (y - 0.5);
    return {numerics::cos(a), numerics::sin(a)};
}

numerics::TensorFn tensor_of(const numerics::VectorFn& nu)
{
    return [nu](const Jet& x, const Jet& y) {
        const VectorJet n = nu(x, y);
        return SymTensorJet{n.x * n.x, n.x * n.y, n.y * n.y};
    };
}

// T(phi) for a closed-form angle.
numerics::TensorFn tensor_of_angle(const numerics::ScalarFn& phi)
{
    return tensor_of([phi](const Jet& x, const Jet& y) {
        const Jet a = phi(x, y);
        return VectorJet{numerics::cos(a), numerics::sin(a)};
    });
}

void require_kind(int kind, const char* what)
{
    if (kind < 1 || kind > 3) {
        std::ostringstream msg;
        msg << what << ": kind must be 1, 2 or 3 (got " << kind << ")";
        throw ConfigurationError(msg.str());
    }
}

// Angle-equation residual -K lap(phi) + B q^2 (M : T'(phi)) u at the exact data.
double angle_source(const numerics::ScalarFn& phi, const numerics::ScalarFn& u, const ModelParams& p,
                    const Vec2& x)
{
    const auto ph = numerics::second_order(phi, x);
    const auto t = tensor_of_angle(phi);
    const SymTensor m = manufactured_tensor(u, t, p.q, x);
    const double uval = numerics::evaluate(u, x);
    return -p.K * ph.hessian.trace() +
           p.B * p.q * p.q * contract(m, director_tensor_derivative(ph.value)) * uval;
}

} // namespace

SymTensor Case::tensor(const Vec2& x) const
{
    if (!director) {
        throw ConfigurationError("case " + name + " has no closed-form director");
    }
    return SymTensor::dyad(numerics::evaluate(*director, x));
}

LinearProblem Case::linear_problem() const
{
    LinearProblem lp;
    lp.params = params;
    lp.tensor = [c = *this](const Vec2& x) { return c.tensor(x); };
    lp.load = load;
    lp.clamp = clamp;
    lp.essential = essential;
    return lp;
}

NonlinearProblem Case::nonlinear_problem() const
{
    if (!eta) {
        throw ConfigurationError("case " + name + " has no Dirichlet angle");
    }
    NonlinearProblem np;
    np.params = params;
    np.load = load;
    np.clamp = clamp;
    np.essential = essential;
    np.eta = eta;
    np.angle_source = angle_source;
    return np;
}

numerics::VectorFn director_field(int kind)
{
    require_kind(kind, "director_field");
    switch (kind) {
    case 1:
        return [](const Jet&, const Jet& y) { return director_one(y); };
    case 2:
        return [](const Jet& x, const Jet& y) {
            const double xv = x.value();
            const double yv = y.value();
            if (xv > 0.5) {
                return director_one(y);
            }
            if (xv == 0.5 || yv == 0.5) {
                throw DomainError("director_field(2): evaluation on the discontinuity set");
            }
            return VectorJet{Jet(0.0), Jet(yv < 0.5 ? -1.0 : 1.0)};
        };
    default:
        return [](const Jet& x, const Jet& y) {
            const Jet dy = y - 0.5;
            const Jet x1 = x - 0.25;
            const Jet x2 = x - 0.75;
            const Jet r1 = x1 * x1 + dy * dy;
            const Jet r2 = x2 * x2 + dy * dy;
            if (r1.value() == 0.0 || r2.value() == 0.0) {
                throw DomainError("director_field(3): evaluation at a dipole center");
            }
            const Jet ir1 = numerics::reciprocal(r1);
            const Jet ir2 = numerics::reciprocal(r2);
            const Jet vx = dy * ir1 - dy * ir2;
            const Jet vy = x2 * ir2 - x1 * ir1;
            const Jet c = numerics::reciprocal(numerics::sqrt(vx * vx + vy * vy));
            return VectorJet{vx * c, vy * c};
        };
    }
}

std::function<double(const Vec2&)> eta_field(int kind)
{
    require_kind(kind, "eta_field");
    switch (kind) {
    case 1:
        return [](const Vec2& x) { return -kPi / 4.0 + kPi / 2.0 * x.y(); };
    case 2:
        return [](const Vec2& x) { return kPi / 2.0 * std::sin(2.0 * kPi * (x.y() - 0.5)); };
    default:
        return [](const Vec2& x) {
            if (x.x() > 0.5) {
                return -kPi / 2.0 + kPi * x.y();
            }
            return x.y() > 0.5 ? kPi / 2.0 : -kPi / 2.0;
        };
    }
}

SymTensor manufactured_tensor(const numerics::ScalarFn& u, const numerics::TensorFn& t, double q, const Vec2& x)
{
    const auto uh = numerics::second_order(u, x);
    return uh.hessian + q * q * uh.value * numerics::evaluate(t, x);
}

double manufactured_load(const numerics::ScalarFn& u, const numerics::TensorFn& t, const ModelParams& p,
                         const Vec2& x)
{
    const Jet ju = numerics::expand(u, x, 4);
    const SymTensorJet jt = numerics::expand(t, x, 2);
    const Jet ux = numerics::differentiate(ju, 0);
    const Jet uy = numerics::differentiate(ju, 1);
    const double q2 = p.q * p.q;
    const SymTensorJet m{numerics::differentiate(ux, 0) + q2 * jt.xx * ju,
                         numerics::differentiate(ux, 1) + q2 * jt.xy * ju,
                         numerics::differentiate(uy, 1) + q2 * jt.yy * ju};
    const double tm = jt.xx.value() * m.xx.value() + 2.0 * jt.xy.value() * m.xy.value() +
                      jt.yy.value() * m.yy.value();
    return p.B * (numerics::div_div(m) + q2 * tm) + p.m * ju.value();
}

Case linear_manufactured(double q)
{
    Case c;
    c.name = "lin-manufactured";
    c.kind = CaseKind::Linear;
    c.params = {1.0, std::pow(q, -4.0), q, 1.0};
    c.boundary = BoundaryTag::HardClamped;
    c.director = director_field(1);
    const numerics::ScalarFn u = [q](const Jet& x, const Jet& y) {
        const VectorJet n = director_one(y);
        return numerics::sin(q * (x * n.x + y * n.y));
    };
    c.exact_u = u;
    c.clamp = u;
    const auto t = tensor_of(*c.director);
    c.load = [u, t, p = c.params](const Vec2& x) { return manufactured_load(u, t, p, x); };
    return c;
}

Case unknown_solution_linear(int kind)
{
    require_kind(kind, "unknown_solution_linear");
    Case c;
    c.name = "lin-field-" + std::to_string(kind);
    c.kind = CaseKind::Linear;
    c.params = {1.0, 1e-5, 40.0, 1.0};
    c.boundary = BoundaryTag::Free;
    c.director = director_field(kind);
    c.load = [](const Vec2&) { return 1.0; };
    return c;
}

Case nonlinear_manufactured(double q)
{
    Case c;
    c.name = "nonlin-manufactured";
    c.kind = CaseKind::Nonlinear;
    c.params = {1.0, std::pow(q, -4.0), q, 1.0};
    c.boundary = BoundaryTag::HardClamped;
    const numerics::ScalarFn phi = [](const Jet&, const Jet& y) { return -kPi / 4.0 + (kPi / 2.0) * y * y * y; };
    const numerics::ScalarFn u = [phi, q](const Jet& x, const Jet& y) {
        const Jet a = phi(x, y);
        return numerics::sin(q * ((x - 0.5) * numerics::cos(a) + (y - 0.5) * numerics::sin(a)));
    };
    c.exact_phi = phi;
    c.exact_u = u;
    c.clamp = u;
    c.eta = [phi](const Vec2& x) { return numerics::evaluate(phi, x); };
    const auto t = tensor_of_angle(phi);
    c.load = [u, t, p = c.params](const Vec2& x) { return manufactured_load(u, t, p, x); };
    c.angle_source = [phi, u, p = c.params](const Vec2& x) { return angle_source(phi, u, p, x); };
    return c;
}

Case nonlinear_eta(int kind)
{
    require_kind(kind, "nonlinear_eta");
    Case c;
    c.name = "nonlin-eta-" + std::to_string(kind);
    c.kind = CaseKind::Nonlinear;
    c.params = {1.0, 1e-5, 40.0, 1.0};
    c.boundary = BoundaryTag::Free;
    c.load = [](const Vec2&) { return 1.0; };
    c.eta = eta_field(kind);
    c.energy_error_reported = kind != 3;
    return c;
}

std::vector<std::string> case_names()
{
    return {"lin-manufactured", "lin-field-1",     "lin-field-2",     "lin-field-3",
            "nonlin-manufactured", "nonlin-eta-1", "nonlin-eta-2", "nonlin-eta-3"};
}

Case case_by_name(const std::string& name, const CaseOverrides& o)
{
    const double q = o.q.value_or(name.rfind("lin-manufactured", 0) == 0 || name == "nonlin-manufactured" ? 1.0 : 40.0);
    Case c;
    if (name == "lin-manufactured") {
        c = linear_manufactured(q);
    } else if (name == "nonlin-manufactured") {
        c = nonlinear_manufactured(q);
    } else if (name.rfind("lin-field-", 0) == 0 && name.size() == 11) {
        c = unknown_solution_linear(name.back() - '0');
    } else if (name.rfind("nonlin-eta-", 0) == 0 && name.size() == 12) {
        c = nonlinear_eta(name.back() - '0');
    } else {
        std::ostringstream msg;
        msg << "unknown case '" << name << "'; available:";
        for (const auto& n : case_names()) {
            msg << ' ' << n;
        }
        throw ConfigurationError(msg.str());
    }
    const bool manufactured = c.exact_u.has_value();
    if (o.q && !manufactured) {
        c.params.q = *o.q;
    }
    if (o.B || o.K || o.m || o.zero_load) {
        if (manufactured && (o.B || o.m || o.K || o.zero_load)) {
            throw ConfigurationError("case " + name +
                                     ": B, K, m and the load are fixed by the manufactured solution; only q may be set");
        }
        c.params.B = o.B.value_or(c.params.B);
        c.params.K = o.K.value_or(c.params.K);
        c.params.m = o.m.value_or(c.params.m);
        if (o.zero_load) {
            c.load = [](const Vec2&) { return 0.0; };
        }
    }
    c.params.validate();
    return c;
}

} // namespace smectic
