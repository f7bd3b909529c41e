#include "affine/kinetic_model.hpp"

#include <cmath>

namespace affine {
namespace {

// Every family expands to one quadratic form:
//   T = ½[m1 vᵀgv + m2 vᵀCv] + ½[I1 tr(Ωᵀ(g)Ω) + I2 tr(Ω̂ᵀ(η)Ω̂) + tr(Jd φ̇ᵀgφ̇) + I4 tr(g⁻¹ΩᵀCΩ)]
//     + A/2 tr Ω² + B/2 (tr Ω)²
struct Quadratic {
    double m1 = 0, m2 = 0, I1 = 0, I2 = 0, I4 = 0, A = 0, B = 0;
    Mat Jd;  // empty when absent
};

Quadratic expand(const KineticModel& model, const MetricD& eta) {
    Quadratic q;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DAlembert>) {
                q.m1 = m.m;
                q.Jd = m.J;
            } else if constexpr (std::is_same_v<T, SpatialAffine>) {
                q.m2 = m.m;
                q.I2 = m.I;
                q.A = m.A;
                q.B = m.B;
            } else if constexpr (std::is_same_v<T, MaterialAffine>) {
                q.m1 = m.m;
                q.I1 = m.I;
                q.A = m.A;
                q.B = m.B;
            } else if constexpr (std::is_same_v<T, DoublyAffine>) {
                q.A = m.A;
                q.B = m.B;
            } else {
                q.m1 = m.m1;
                q.m2 = m.m2;
                q.I1 = m.I1;
                q.I2 = m.I2;
                q.I4 = m.I4;
                q.A = m.A;
                q.B = m.B;
                if (m.I3 != 0.0) q.Jd = m.I3 * eta.inverse();
            }
        },
        model);
    return q;
}

bool near_zero(double x, double scale) { return std::abs(x) <= 1e-12 * std::max(1.0, scale); }

struct Kinematics {
    Mat phi_inv, Omega, OmegaHat, C;
};

Kinematics kinematics_of(const Mat& phi, const Mat& phidot, const MetricD& eta) {
    require_invertible(phi);
    Kinematics k;
    k.phi_inv = phi.inverse();
    k.Omega = phidot * k.phi_inv;
    k.OmegaHat = k.phi_inv * phidot;
    k.C = k.phi_inv.transpose() * eta.components() * k.phi_inv;
    return k;
}

// Z with dT = tr(Z dφ̇); this is P.
Mat momentum_map(const Quadratic& q, const Mat& phidot, const Kinematics& k, const MetricD& g,
                 const MetricD& eta) {
    const Index n = phidot.rows();
    Mat Z = Mat::Zero(n, n);
    if (q.Jd.size() != 0) Z += q.Jd * phidot.transpose() * g.components();
    if (q.I1 != 0.0) Z += q.I1 * k.phi_inv * metric_transpose(k.Omega, g);
    if (q.I2 != 0.0) Z += q.I2 * metric_transpose(k.OmegaHat, eta) * k.phi_inv;
    if (q.I4 != 0.0) Z += q.I4 * k.phi_inv * g.inverse() * k.Omega.transpose() * k.C;
    if (q.A != 0.0) Z += q.A * k.phi_inv * k.Omega;
    if (q.B != 0.0) Z += q.B * k.Omega.trace() * k.phi_inv;
    return Z;
}

Mat translational_metric(const Quadratic& q, const Kinematics& k, const MetricD& g) {
    return q.m1 * g.components() + q.m2 * k.C;
}

bool translation_active(const Quadratic& q) { return q.m1 != 0.0 || q.m2 != 0.0; }

Vec solve_translation(const Quadratic& q, const Kinematics& k, const MetricD& g, const Vec& p) {
    if (!translation_active(q)) return Vec::Zero(p.size());
    const Mat M = translational_metric(q, k, g);
    Eigen::FullPivLU<Mat> lu(M);
    if (lu.rcond() < 1e-14) throw NonInvertibleLegendre("translational mass form is singular");
    return lu.solve(p);
}

void check_ia_family(double I, double A, double B, Index n) {
    const double s = std::abs(I) + std::abs(A) + n * std::abs(B);
    if (near_zero(I + A, s)) throw NonInvertibleLegendre("I + A vanishes");
    if (near_zero(A - I, s)) throw NonInvertibleLegendre("A - I vanishes");
    if (near_zero(I + A + n * B, s)) throw NonInvertibleLegendre("I + A + nB vanishes");
}

// Ω from Σ = I Ωᵀ(h) + A Ω + B tr(Ω) Id, in the metric h.
Mat invert_ia(const Mat& Sigma, double I, double A, double B, const MetricD& h) {
    const InverseConstants c = inverse_constants(I, A, B, h.dim());
    const Index n = Sigma.rows();
    Mat Omega = c.inv_A * Sigma + c.inv_B * Sigma.trace() * Mat::Identity(n, n);
    if (c.inv_I != 0.0) Omega += c.inv_I * metric_transpose(Sigma, h);
    return Omega;
}

double ia_hamiltonian(const Mat& Sigma, double I, double A, double B, const MetricD& h) {
    const InverseConstants c = inverse_constants(I, A, B, h.dim());
    double H = 0.5 * c.inv_A * (Sigma * Sigma).trace() +
               0.5 * c.inv_B * Sigma.trace() * Sigma.trace();
    if (c.inv_I != 0.0) H += 0.5 * c.inv_I * (metric_transpose(Sigma, h) * Sigma).trace();
    return H;
}

Mat general_inverse(const Quadratic& q, const Mat& phi, const Mat& P, const MetricD& g,
                    const MetricD& eta) {
    const Index n = phi.rows();
    const Index nn = n * n;
    Mat Mmat(nn, nn);
    Mat basis = Mat::Zero(n, n);
    for (Index c = 0; c < nn; ++c) {
        basis.setZero();
        basis(c % n, c / n) = 1.0;
        const Kinematics k = kinematics_of(phi, basis, eta);
        const Mat Z = momentum_map(q, basis, k, g, eta);
        Mmat.col(c) = Eigen::Map<const Vec>(Z.data(), nn);
    }
    Eigen::FullPivLU<Mat> lu(Mmat);
    if (lu.rcond() < 1e-13) throw NonInvertibleLegendre("internal kinetic form is singular");
    const Vec sol = lu.solve(Eigen::Map<const Vec>(P.data(), nn));
    return Eigen::Map<const Mat>(sol.data(), n, n);
}

}  // namespace

KineticModel dalembert_model(const InertiaD& inertia) {
    return DAlembert{inertia.mass(), inertia.J()};
}

const char* kinetic_model_name(const KineticModel& model) {
    static const char* names[] = {"dalembert", "spatial_affine", "material_affine",
                                  "doubly_affine", "general_eight_param"};
    return names[model.index()];
}

InverseConstants inverse_constants(double I, double A, double B, Index n) {
    check_ia_family(I, A, B, n);
    InverseConstants c{};
    c.inv_I = I == 0.0 ? 0.0 : I / (I * I - A * A);
    c.inv_A = A / (A * A - I * I);
    c.inv_B = B == 0.0 ? 0.0 : -B / ((I + A) * (I + A + n * B));
    return c;
}

CasimirConstants casimir_constants(double I, double A, double B, Index n) {
    const InverseConstants c = inverse_constants(I, A, B, n);
    return {1.0 / (I + A), c.inv_B, c.inv_I};
}

void check_nondegenerate(const KineticModel& model, Index n) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DAlembert>) {
                if (!(m.m > 0.0)) throw NonInvertibleLegendre("mass must be positive");
                if (m.J.rows() != n || m.J.cols() != n)
                    throw DimensionMismatch("J has wrong dimension");
                Eigen::LLT<Mat> llt(m.J);
                if (llt.info() != Eigen::Success)
                    throw NonInvertibleLegendre("J is not positive definite");
            } else if constexpr (std::is_same_v<T, SpatialAffine> ||
                                 std::is_same_v<T, MaterialAffine>) {
                if (m.m < 0.0) throw NonInvertibleLegendre("mass must be non-negative");
                check_ia_family(m.I, m.A, m.B, n);
            } else if constexpr (std::is_same_v<T, DoublyAffine>) {
                check_ia_family(0.0, m.A, m.B, n);
            }
        },
        model);
}

bool has_translation(const KineticModel& model) {
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DoublyAffine>) return false;
            else if constexpr (std::is_same_v<T, GeneralEightParam>) return m.m1 != 0.0 || m.m2 != 0.0;
            else return m.m != 0.0;
        },
        model);
}

double kinetic_energy(const KineticModel& model, const BodyStateD& s, const MetricD& g,
                      const MetricD& eta) {
    const Quadratic q = expand(model, eta);
    const Kinematics k = kinematics_of(s.phi(), s.phidot, eta);
    double T = 0.0;
    if (translation_active(q)) T += 0.5 * s.v.dot(translational_metric(q, k, g) * s.v);
    if (q.Jd.size() != 0)
        T += 0.5 * (q.Jd * s.phidot.transpose() * g.components() * s.phidot).trace();
    if (q.I1 != 0.0) T += 0.5 * q.I1 * (metric_transpose(k.Omega, g) * k.Omega).trace();
    if (q.I2 != 0.0) T += 0.5 * q.I2 * (metric_transpose(k.OmegaHat, eta) * k.OmegaHat).trace();
    if (q.I4 != 0.0)
        T += 0.5 * q.I4 * (g.inverse() * k.Omega.transpose() * k.C * k.Omega).trace();
    const double tr = k.Omega.trace();
    T += 0.5 * q.A * (k.Omega * k.Omega).trace() + 0.5 * q.B * tr * tr;
    return T;
}

PhaseState legendre(const KineticModel& model, const BodyStateD& s, const MetricD& g,
                    const MetricD& eta) {
    require_dim(s.phi(), g, eta);
    const Quadratic q = expand(model, eta);
    const Kinematics k = kinematics_of(s.phi(), s.phidot, eta);
    PhaseState out;
    out.x = s.x();
    out.phi = s.phi();
    out.p = translation_active(q) ? Vec(translational_metric(q, k, g) * s.v)
                                  : Vec(Vec::Zero(s.dim()));
    out.P = momentum_map(q, s.phidot, k, g, eta);
    return out;
}

BodyStateD legendre_inverse(const KineticModel& model, const PhaseState& s, const MetricD& g,
                            const MetricD& eta) {
    require_dim(s.phi, g, eta);
    require_invertible(s.phi);
    const Index n = s.dim();
    const Quadratic q = expand(model, eta);
    const Kinematics k = kinematics_of(s.phi, Mat::Zero(n, n), eta);
    BodyStateD out;
    out.config = {s.x, s.phi};
    out.v = solve_translation(q, k, g, s.p);
    out.phidot = std::visit(
        [&](const auto& m) -> Mat {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DAlembert>) {
                Eigen::LLT<Mat> llt(m.J);
                if (llt.info() != Eigen::Success)
                    throw NonInvertibleLegendre("J is not positive definite");
                // P = J φ̇ᵀ g  ⇒  φ̇ = g⁻¹ Pᵀ J⁻¹
                return g.inverse() * llt.solve(s.P).transpose();
            } else if constexpr (std::is_same_v<T, SpatialAffine>) {
                return s.phi * invert_ia(s.SigmaHat(), m.I, m.A, m.B, eta);
            } else if constexpr (std::is_same_v<T, MaterialAffine>) {
                return invert_ia(s.Sigma(), m.I, m.A, m.B, g) * s.phi;
            } else if constexpr (std::is_same_v<T, DoublyAffine>) {
                return s.phi * invert_ia(s.SigmaHat(), 0.0, m.A, m.B, eta);
            } else {
                return general_inverse(q, s.phi, s.P, g, eta);
            }
        },
        model);
    return out;
}

Mat kinetic_config_gradient(const KineticModel& model, const BodyStateD& s, const MetricD& g,
                            const MetricD& eta) {
    const Quadratic q = expand(model, eta);
    const Kinematics k = kinematics_of(s.phi(), s.phidot, eta);
    const Index n = s.dim();
    Mat Y = Mat::Zero(n, n);
    if (q.m2 != 0.0) Y -= q.m2 * k.phi_inv * s.v * s.v.transpose() * k.C;
    if (q.I1 != 0.0) Y -= q.I1 * k.phi_inv * metric_transpose(k.Omega, g) * k.Omega;
    if (q.I2 != 0.0) Y -= q.I2 * k.OmegaHat * metric_transpose(k.OmegaHat, eta) * k.phi_inv;
    if (q.I4 != 0.0) {
        const Mat W = k.Omega * g.inverse() * k.Omega.transpose();
        Y -= q.I4 * k.phi_inv * (W * k.C + g.inverse() * k.Omega.transpose() * k.C * k.Omega);
    }
    if (q.A != 0.0) Y -= q.A * k.phi_inv * k.Omega * k.Omega;
    if (q.B != 0.0) Y -= q.B * k.Omega.trace() * k.phi_inv * k.Omega;
    return Y;
}

double kinetic_hamiltonian(const KineticModel& model, const PhaseState& s, const MetricD& g,
                           const MetricD& eta) {
    require_invertible(s.phi);
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DAlembert>) {
                Eigen::LLT<Mat> llt(m.J);
                const double Ht = 0.5 * s.p.dot(g.inverse() * s.p) / m.m;
                return Ht + 0.5 * (s.P * g.inverse() * llt.solve(s.P).transpose()).trace();
            } else if constexpr (std::is_same_v<T, SpatialAffine>) {
                double H = ia_hamiltonian(s.SigmaHat(), m.I, m.A, m.B, eta);
                if (m.m != 0.0) {
                    const Vec phat = s.phi.transpose() * s.p;
                    H += 0.5 * phat.dot(eta.inverse() * phat) / m.m;
                }
                return H;
            } else if constexpr (std::is_same_v<T, MaterialAffine>) {
                double H = ia_hamiltonian(s.Sigma(), m.I, m.A, m.B, g);
                if (m.m != 0.0) H += 0.5 * s.p.dot(g.inverse() * s.p) / m.m;
                return H;
            } else if constexpr (std::is_same_v<T, DoublyAffine>) {
                return ia_hamiltonian(s.SigmaHat(), 0.0, m.A, m.B, eta);
            } else {
                return kinetic_energy(model, legendre_inverse(model, s, g, eta), g, eta);
            }
        },
        model);
}

double kinetic_hamiltonian_casimir(const KineticModel& model, const PhaseState& s,
                                   const MetricD& g, const MetricD& eta) {
    const Index n = s.dim();
    auto internal = [&](double I, double A, double B, const Mat& W) {
        const CasimirConstants c = casimir_constants(I, A, B, n);
        const Mat Sh = s.SigmaHat();
        const double c1 = Sh.trace();
        return 0.5 * c.inv_alpha * casimir(Sh, 2) + 0.5 * c.inv_beta * c1 * c1 +
               0.5 * c.inv_mu * antisymmetric_norm_sq(W);
    };
    const CanonicalMomenta<double> cm = canonical_momenta(s.phi, s.p, s.P, g, eta);
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SpatialAffine>) {
                double H = internal(m.I, m.A, m.B, cm.vorticity);
                if (m.m != 0.0) {
                    const Vec phat = s.phi.transpose() * s.p;
                    H += 0.5 * phat.dot(eta.inverse() * phat) / m.m;
                }
                return H;
            } else if constexpr (std::is_same_v<T, MaterialAffine>) {
                double H = internal(m.I, m.A, m.B, cm.spin);
                if (m.m != 0.0) H += 0.5 * s.p.dot(g.inverse() * s.p) / m.m;
                return H;
            } else if constexpr (std::is_same_v<T, DoublyAffine>) {
                return internal(0.0, m.A, m.B, cm.vorticity);
            } else {
                throw NonInvertibleLegendre("Casimir form exists only for the (I, A, B) families");
            }
        },
        model);
}

CanonicalMomenta<double> canonical_from_kinematical(const BodyStateD& s, const MetricD& g,
                                                    const MetricD& eta,
                                                    const KineticModel& model) {
    check_nondegenerate(model, s.dim());
    const PhaseState ps = legendre(model, s, g, eta);
    return canonical_momenta(ps.phi, ps.p, ps.P, g, eta);
}

CanonicalMomenta<double> canonical_from_kinematical(const BodyStateD& s, const InertiaD& inertia,
                                                    const MetricD& g, const MetricD& eta) {
    return canonical_from_kinematical(s, g, eta, dalembert_model(inertia));
}

}  // namespace affine
