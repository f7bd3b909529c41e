#include "affine/dynamics_engine.hpp"

#include <cmath>

namespace affine {
namespace {

struct Subspace {
    std::vector<Mat> basis;
    Side side = Side::Spatial;
};

Vec pair(double a, double b) {
    Vec r(2);
    r << a, b;
    return r;
}

Mat unit(Index n, Index i, Index j) {
    Mat E = Mat::Zero(n, n);
    E(i, j) = 1.0;
    return E;
}

// Admissible velocities are φ̇ = Ωφ (spatial side) or φ̇ = φΩ̂ (material side) with the
// velocity gradient in a fixed linear subspace spanned by `basis`.
Subspace admissible_subspace(ConstraintKind kind, const MetricD& g, const MetricD& eta) {
    const Index n = g.dim();
    Subspace s;
    auto antisym = [&](const MetricD& h) {
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                s.basis.push_back(h.inverse() * (unit(n, i, j) - unit(n, j, i)));
    };
    auto sym = [&](const MetricD& h) {
        for (Index i = 0; i < n; ++i)
            for (Index j = i; j < n; ++j)
                s.basis.push_back(h.inverse() * (unit(n, i, j) + unit(n, j, i)));
    };
    switch (kind) {
        case ConstraintKind::Gyroscopic:
            antisym(g);
            break;
        case ConstraintKind::ShapePreserving:
            antisym(g);
            s.basis.push_back(Mat::Identity(n, n));
            break;
        case ConstraintKind::Isochoric:
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j)
                    if (i != j) s.basis.push_back(unit(n, i, j));
            for (Index i = 0; i + 1 < n; ++i)
                s.basis.push_back(unit(n, i, i) - unit(n, n - 1, n - 1));
            break;
        case ConstraintKind::Dilatational:
            s.basis.push_back(Mat::Identity(n, n));
            break;
        case ConstraintKind::RotationFreeSpatial:
            sym(g);
            break;
        case ConstraintKind::RotationFreeMaterial:
            sym(eta);
            s.side = Side::Material;
            break;
        case ConstraintKind::Unconstrained:
            break;
    }
    return s;
}

Mat project_velocity_gradient(ConstraintKind kind, const Mat& W, const MetricD& g,
                              const MetricD& eta) {
    const Index n = W.rows();
    const Mat I = Mat::Identity(n, n);
    switch (kind) {
        case ConstraintKind::Gyroscopic:
            return metric_antisymmetric_part(W, g);
        case ConstraintKind::ShapePreserving:
            return metric_antisymmetric_part(W, g) + (W.trace() / double(n)) * I;
        case ConstraintKind::Isochoric:
            return W - (W.trace() / double(n)) * I;
        case ConstraintKind::Dilatational:
            return (W.trace() / double(n)) * I;
        case ConstraintKind::RotationFreeSpatial:
            return metric_symmetric_part(W, g);
        case ConstraintKind::RotationFreeMaterial:
            return metric_symmetric_part(W, eta);
        case ConstraintKind::Unconstrained:
            break;
    }
    return W;
}

double isochoric_target(const MetricD& g, const MetricD& eta) {
    return std::sqrt(eta.determinant() / g.determinant());
}

double conformal_residual(const Mat& phi, const MetricD& g, const MetricD& eta) {
    const Mat G = phi.transpose() * g.components() * phi;
    const double lambda2 = (eta.inverse() * G).trace() / double(phi.rows());
    return (G - lambda2 * eta.components()).norm();
}

BodyAcceleration newton_acceleration(const InertiaD& inertia, const TorqueOutput& out,
                                     const BodyStateD& s) {
    // φ̈ J = Nᵀ φ⁻ᵀ
    const Mat rhs = out.N.transpose() * s.phi().inverse().transpose();
    return {out.F / inertia.mass(), rhs * inertia.Jinv()};
}

std::vector<NamedMonitor> standard_monitors(const InertiaD& inertia, const TorqueModel& model,
                                            const MetricD& g, const MetricD& eta) {
    std::vector<NamedMonitor> mons;
    if (has_full_potential(model, g.dim()) && is_velocity_independent(model))
        mons.push_back({"energy", [=](double, const BodyStateD& s) {
                            return newton_energy(inertia, model, s, g, eta);
                        }});
    mons.push_back({"spin_norm", [=](double, const BodyStateD& s) {
                        const KinematicalMomenta<double> km = kinematical_momenta(s, inertia);
                        return std::sqrt(antisymmetric_norm_sq(Mat(km.S * g.components())));
                    }});
    mons.push_back({"det_phi", [](double, const BodyStateD& s) { return s.phi().determinant(); }});
    return mons;
}

}  // namespace

const char* constraint_name(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::Unconstrained: return "unconstrained";
        case ConstraintKind::Gyroscopic: return "gyroscopic";
        case ConstraintKind::ShapePreserving: return "shape_preserving";
        case ConstraintKind::Isochoric: return "isochoric";
        case ConstraintKind::Dilatational: return "dilatational";
        case ConstraintKind::RotationFreeSpatial: return "rotation_free_spatial";
        case ConstraintKind::RotationFreeMaterial: return "rotation_free_material";
    }
    return "unknown";
}

std::optional<ConstraintKind> parse_constraint(const std::string& name) {
    for (ConstraintKind k :
         {ConstraintKind::Unconstrained, ConstraintKind::Gyroscopic,
          ConstraintKind::ShapePreserving, ConstraintKind::Isochoric, ConstraintKind::Dilatational,
          ConstraintKind::RotationFreeSpatial, ConstraintKind::RotationFreeMaterial})
        if (name == constraint_name(k)) return k;
    return std::nullopt;
}

Index internal_dof(ConstraintKind kind, Index n) {
    switch (kind) {
        case ConstraintKind::Gyroscopic: return n * (n - 1) / 2;
        case ConstraintKind::ShapePreserving: return n * (n - 1) / 2 + 1;
        case ConstraintKind::Isochoric: return n * n - 1;
        case ConstraintKind::Dilatational: return 1;
        default: return n * n;
    }
}

double newton_energy(const InertiaD& inertia, const TorqueModel& model, const BodyStateD& s,
                     const MetricD& g, const MetricD& eta) {
    const double T = 0.5 * inertia.mass() * s.v.dot(g.components() * s.v) +
                     0.5 * (inertia.J() * s.phidot.transpose() * g.components() * s.phidot).trace();
    return T + potential_energy(model, s, g, eta);
}

EquationSystem unconstrained_rhs(const InertiaD& inertia, const TorqueModel& model,
                                 const MetricD& g, const MetricD& eta) {
    EquationSystem sys;
    sys.kind = ConstraintKind::Unconstrained;
    sys.rhs = [=](double, const BodyStateD& s) {
        return newton_acceleration(inertia, torque(model, s, g, eta), s);
    };
    sys.constraint_residual = [](const BodyStateD&) { return Vec(); };
    sys.conserved_monitors = standard_monitors(inertia, model, g, eta);
    sys.stabilize = [](BodyStateD&) {};
    return sys;
}

EquationSystem constrained_rhs(ConstraintKind kind, const InertiaD& inertia,
                               const TorqueModel& model, const MetricD& g, const MetricD& eta) {
    if (kind == ConstraintKind::Unconstrained) return unconstrained_rhs(inertia, model, g, eta);
    const Subspace sub = admissible_subspace(kind, g, eta);
    EquationSystem sys;
    sys.kind = kind;
    sys.rhs = [=](double, const BodyStateD& s) {
        const TorqueOutput out = torque(model, s, g, eta);
        const Mat& phi = s.phi();
        const Mat phi_inv = phi.inverse();
        const Mat& J = inertia.J();
        const Mat& gc = g.components();
        // Generalized force Φ with virtual work tr(Φ δφ).
        const Mat Phi = phi_inv * out.N * gc;
        // Velocity-dependent part of φ̈ with the velocity gradient held fixed; equal to Ω²φ
        // and to φ̇Ω̂ alike.
        const Mat acc0 = s.phidot * phi_inv * s.phidot;
        std::vector<Mat> D;
        D.reserve(sub.basis.size());
        for (const Mat& T : sub.basis) D.push_back(sub.side == Side::Spatial ? Mat(T * phi) : Mat(phi * T));
        const Index k = static_cast<Index>(D.size());
        Mat gram(k, k);
        Vec b(k);
        const Mat residual0 = Phi - J * acc0.transpose() * gc;
        for (Index a = 0; a < k; ++a) {
            b(a) = (residual0 * D[a]).trace();
            for (Index c = a; c < k; ++c) {
                gram(a, c) = (J * D[a].transpose() * gc * D[c]).trace();
                gram(c, a) = gram(a, c);
            }
        }
        const Vec coeff = gram.ldlt().solve(b);
        Mat acc = acc0;
        for (Index a = 0; a < k; ++a) acc += coeff(a) * D[a];
        return BodyAcceleration{out.F / inertia.mass(), acc};
    };
    sys.constraint_residual = [=](const BodyStateD& s) {
        return constraint_residual(kind, s, g, eta);
    };
    sys.conserved_monitors = standard_monitors(inertia, model, g, eta);
    sys.stabilize = [=](BodyStateD& s) { stabilize(kind, s, g, eta); };
    return sys;
}

Vec constraint_residual(ConstraintKind kind, const BodyStateD& s, const MetricD& g,
                        const MetricD& eta) {
    if (kind == ConstraintKind::Unconstrained) return Vec();
    require_invertible(s.phi());
    const Mat& phi = s.phi();
    const Mat phi_inv = phi.inverse();
    const bool material = kind == ConstraintKind::RotationFreeMaterial;
    const Mat W = material ? Mat(phi_inv * s.phidot) : Mat(s.phidot * phi_inv);
    const double vel = (W - project_velocity_gradient(kind, W, g, eta)).norm();
    switch (kind) {
        case ConstraintKind::Gyroscopic: {
            const Mat G = phi.transpose() * g.components() * phi;
            return pair((G - eta.components()).norm(), vel);
        }
        case ConstraintKind::ShapePreserving:
        case ConstraintKind::Dilatational:
            return pair(conformal_residual(phi, g, eta), vel);
        case ConstraintKind::Isochoric:
            return pair(phi.determinant() - isochoric_target(g, eta), vel);
        default:
            return Vec::Constant(1, vel);
    }
}

void require_constraint(ConstraintKind kind, const BodyStateD& s, const MetricD& g,
                        const MetricD& eta, double tol) {
    const Vec r = constraint_residual(kind, s, g, eta);
    for (Index i = 0; i < r.size(); ++i)
        if (!(std::abs(r(i)) <= tol))
            throw ConstraintViolation(std::string(constraint_name(kind)) +
                                      " constraint residual " + std::to_string(r(i)) +
                                      " exceeds tolerance");
}

void stabilize(ConstraintKind kind, BodyStateD& s, const MetricD& g, const MetricD& eta) {
    if (kind == ConstraintKind::Unconstrained) return;
    const Index n = s.dim();
    const Mat phi_old = s.config.phi;
    const Mat phi_old_inv = phi_old.inverse();
    switch (kind) {
        case ConstraintKind::Gyroscopic:
            s.config.phi = polar(phi_old, g, eta).U_iso;
            break;
        case ConstraintKind::ShapePreserving:
        case ConstraintKind::Dilatational: {
            const PolarFactors<double> p = polar(phi_old, g, eta);
            const double lambda = std::pow(p.A_sym.determinant(), 1.0 / double(n));
            s.config.phi = lambda * p.U_iso;
            break;
        }
        case ConstraintKind::Isochoric: {
            const double ratio = isochoric_target(g, eta) / phi_old.determinant();
            s.config.phi = phi_old * std::pow(ratio, 1.0 / double(n));
            break;
        }
        default:
            break;
    }
    if (kind == ConstraintKind::RotationFreeMaterial) {
        const Mat W = phi_old_inv * s.phidot;
        s.phidot = s.config.phi * project_velocity_gradient(kind, W, g, eta);
    } else {
        const Mat W = s.phidot * phi_old_inv;
        s.phidot = project_velocity_gradient(kind, W, g, eta) * s.config.phi;
    }
}

ComovingSystem comoving_rhs(const InertiaD& inertia, const TorqueModel& model, const MetricD& g,
                            const MetricD& eta) {
    ComovingSystem sys;
    sys.rhs = [=](double, const ComovingState& c) {
        const BodyStateD s = from_comoving(c);
        const TorqueOutput out = torque(model, s, g, eta);
        const Mat phi_inv = c.phi.inverse();
        ComovingState d;
        d.x = c.phi * c.vhat;
        d.vhat = -c.OmegaHat * c.vhat + phi_inv * out.F / inertia.mass();
        d.phi = c.phi * c.OmegaHat;
        d.OmegaHat =
            (out.Nhat.transpose() - c.OmegaHat * c.OmegaHat * inertia.J()) * inertia.Jinv();
        return d;
    };
    return sys;
}

ComovingState to_comoving(const BodyStateD& s) {
    require_invertible(s.phi());
    const auto lu = s.phi().partialPivLu();
    return {s.x(), lu.solve(s.v), s.phi(), lu.solve(s.phidot)};
}

BodyStateD from_comoving(const ComovingState& c) {
    BodyStateD s;
    s.config = {c.x, c.phi};
    s.v = c.phi * c.vhat;
    s.phidot = c.phi * c.OmegaHat;
    return s;
}

Vec pack(const BodyStateD& s) {
    const Index n = s.dim();
    Vec y(2 * n + 2 * n * n);
    y << s.x(), s.v, Eigen::Map<const Vec>(s.phi().data(), n * n),
        Eigen::Map<const Vec>(s.phidot.data(), n * n);
    return y;
}

BodyStateD unpack_body(const Vec& y, Index n) {
    BodyStateD s;
    s.config.x = y.segment(0, n);
    s.v = y.segment(n, n);
    s.config.phi = Eigen::Map<const Mat>(y.data() + 2 * n, n, n);
    s.phidot = Eigen::Map<const Mat>(y.data() + 2 * n + n * n, n, n);
    return s;
}

Vec pack(const ComovingState& c) {
    const Index n = c.phi.rows();
    Vec y(2 * n + 2 * n * n);
    y << c.x, c.vhat, Eigen::Map<const Vec>(c.phi.data(), n * n),
        Eigen::Map<const Vec>(c.OmegaHat.data(), n * n);
    return y;
}

ComovingState unpack_comoving(const Vec& y, Index n) {
    ComovingState c;
    c.x = y.segment(0, n);
    c.vhat = y.segment(n, n);
    c.phi = Eigen::Map<const Mat>(y.data() + 2 * n, n, n);
    c.OmegaHat = Eigen::Map<const Mat>(y.data() + 2 * n + n * n, n, n);
    return c;
}

OdeRhs as_ode(const EquationSystem& sys, Index n) {
    return [rhs = sys.rhs, n](double t, const Vec& y) {
        const BodyStateD s = unpack_body(y, n);
        const BodyAcceleration a = rhs(t, s);
        BodyStateD d;
        d.config = {s.v, s.phidot};
        d.v = a.vdot;
        d.phidot = a.phiddot;
        return pack(d);
    };
}

OdeRhs as_ode(const ComovingSystem& sys, Index n) {
    return [rhs = sys.rhs, n](double t, const Vec& y) { return pack(rhs(t, unpack_comoving(y, n))); };
}

StepHooks stabilization_hooks(const EquationSystem& sys, Index n) {
    StepHooks hooks;
    hooks.check = [n](const Vec& y) {
        const Mat phi = Eigen::Map<const Mat>(y.data() + 2 * n, n, n);
        require_invertible(phi);
    };
    if (sys.kind != ConstraintKind::Unconstrained)
        hooks.project = [stab = sys.stabilize, n](Vec& y) {
            BodyStateD s = unpack_body(y, n);
            stab(s);
            y = pack(s);
        };
    return hooks;
}

}  // namespace affine
