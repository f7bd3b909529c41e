#include "affine/force_models.hpp"

#include <cmath>

namespace affine {
namespace {

struct Context {
    const BodyStateD& s;
    const MetricD& g;
    const MetricD& eta;
    Index n;
    Mat phi_inv;
    Mat Omega;

    Context(const BodyStateD& s_, const MetricD& g_, const MetricD& eta_)
        : s(s_), g(g_), eta(eta_), n(s_.dim()) {
        require_dim(s.phi(), g, eta);
        require_invertible(s.phi());
        phi_inv = s.phi().inverse();
        Omega = s.phidot * phi_inv;
    }

    Mat G() const { return s.phi().transpose() * g.components() * s.phi(); }
    Mat E() const { return 0.5 * (G() - eta.components()); }
    Vec invariants() const { return deformation_bundle(s.phi(), g, eta).invariants_K; }
    TorqueOutput from_material(const Mat& Nhat) const {
        return {s.phi() * Nhat * s.phi().transpose(), Nhat, Vec::Zero(n)};
    }
    TorqueOutput from_spatial(const Mat& N) const {
        return {N, phi_inv * N * phi_inv.transpose(), Vec::Zero(n)};
    }
};

// Σ_a c_a (η⁻¹G)^a η⁻¹ for a = 0..n−1.
Mat material_power_series(const Vec& c, const Mat& Ghat, const Mat& eta_inv) {
    const Index n = Ghat.rows();
    Mat acc = Mat::Zero(n, n);
    Mat power = Mat::Identity(n, n);
    for (Index a = 0; a < c.size(); ++a) {
        acc += c(a) * power;
        power = power * Ghat;
    }
    return acc * eta_inv;
}

Mat contract4(const std::vector<double>& T, const Mat& X, Index n) {
    if (static_cast<Index>(T.size()) != n * n * n * n)
        throw DimensionMismatch("fourth-order tensor must have n^4 entries");
    Mat out = Mat::Zero(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            double acc = 0.0;
            for (Index k = 0; k < n; ++k)
                for (Index l = 0; l < n; ++l) acc += T[((a * n + b) * n + k) * n + l] * X(k, l);
            out(a, b) = acc;
        }
    return out;
}

bool major_symmetric(const std::vector<double>& T, Index n) {
    if (static_cast<Index>(T.size()) != n * n * n * n) return false;
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
            for (Index k = 0; k < n; ++k)
                for (Index l = 0; l < n; ++l)
                    if (std::abs(T[((a * n + b) * n + k) * n + l] -
                                 T[((k * n + l) * n + a) * n + b]) > 1e-14)
                        return false;
    return true;
}

TorqueOutput zero_output(Index n) { return {Mat::Zero(n, n), Mat::Zero(n, n), Vec::Zero(n)}; }

TorqueOutput evaluate(const TorqueModel& model, const Context& c) {
    return std::visit(
        [&](const auto& m) -> TorqueOutput {
            using T = std::decay_t<decltype(m)>;
            const Mat& eta_inv = c.eta.inverse();
            if constexpr (std::is_same_v<T, HyperelasticInvariant>) {
                const Mat G = c.G();
                const Vec K = c.invariants();
                const Vec dU = m.dU(K);
                // l_{a−1} = −2a ∂U/∂𝒦_a for powers (η⁻¹G)^{a−1}, a = 1..n.
                Vec coeff(c.n);
                for (Index a = 0; a < c.n; ++a) coeff(a) = -2.0 * double(a + 1) * dU(a);
                return c.from_material(material_power_series(coeff, eta_inv * G, eta_inv));
            } else if constexpr (std::is_same_v<T, IsotropicExpansion>) {
                const Mat G = c.G();
                const Vec l = m.l(c.invariants());
                return c.from_material(material_power_series(l, eta_inv * G, eta_inv));
            } else if constexpr (std::is_same_v<T, HookeAnisotropic>) {
                return c.from_material(contract4(m.C, c.E(), c.n));
            } else if constexpr (std::is_same_v<T, HookeIsotropic>) {
                const Mat E = c.E();
                return c.from_material(m.lambda * eta_inv * E * eta_inv +
                                       m.mu * (eta_inv * E).trace() * eta_inv);
            } else if constexpr (std::is_same_v<T, HookeGreenShifted>) {
                const Mat E = c.E();
                const Mat Gi = c.G().inverse();
                return c.from_material(m.lambda * Gi * E * Gi + m.mu * (Gi * E).trace() * Gi);
            } else if constexpr (std::is_same_v<T, ViscousContinuum>) {
                const double Dphi =
                    std::sqrt(c.g.determinant() / c.eta.determinant()) * c.s.phi().determinant();
                const Mat& gi = c.g.inverse();
                const Mat Oup = c.Omega * gi;
                const Mat N = -m.Vol0 * Dphi *
                              (m.eta_vis * (Oup + Oup.transpose()) +
                               (m.zeta - 2.0 * m.eta_vis / double(c.n)) * c.Omega.trace() * gi);
                return c.from_spatial(N);
            } else if constexpr (std::is_same_v<T, ViscousDiscrete>) {
                const Mat Ng = -m.alpha * (c.Omega + metric_transpose(c.Omega, c.g)) -
                               m.beta * c.Omega.trace() * Mat::Identity(c.n, c.n);
                return c.from_spatial(Ng * c.g.inverse());
            } else if constexpr (std::is_same_v<T, ExternalFriction>) {
                const VelocitySplit<double> sp = split_velocity(c.Omega, c.g);
                // The rotational term enters as +αω: with 𝒫 = tr(N g Ω) this is the
                // sign that makes it dissipative, since tr(ω²) ≤ 0.
                const Mat Ng = m.alpha * sp.omega - m.beta * sp.d -
                               (m.gamma - m.beta / double(c.n)) * sp.d.trace() *
                                   Mat::Identity(c.n, c.n);
                return c.from_spatial(Ng * c.g.inverse());
            } else if constexpr (std::is_same_v<T, LinearFriction>) {
                const Mat d_low = c.g.components() * metric_symmetric_part(c.Omega, c.g);
                return c.from_spatial(-contract4(m.V, d_low, c.n));
            } else if constexpr (std::is_same_v<T, Pressure>) {
                return c.from_spatial(-m.p * c.g.inverse());
            } else if constexpr (std::is_same_v<T, ConstantForce>) {
                if (m.F.size() != c.n) throw DimensionMismatch("force has wrong dimension");
                TorqueOutput out = zero_output(c.n);
                out.F = m.F;
                return out;
            } else if constexpr (std::is_same_v<T, ConfigPotential>) {
                return c.from_spatial(potential_torque_from_gradient(m.dV, c.s.phi(), c.g).N);
            } else {
                TorqueOutput out = zero_output(c.n);
                for (const TorqueModel& part : m.models) {
                    const TorqueOutput o = evaluate(part, c);
                    out.N += o.N;
                    out.Nhat += o.Nhat;
                    out.F += o.F;
                }
                return out;
            }
        },
        model.model);
}

double potential_of(const TorqueModel& model, const Context& c) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            const Mat& eta_inv = c.eta.inverse();
            if constexpr (std::is_same_v<T, HyperelasticInvariant>) {
                return m.U(c.invariants());
            } else if constexpr (std::is_same_v<T, HookeAnisotropic>) {
                const Mat E = c.E();
                return -0.5 * (E.array() * contract4(m.C, E, c.n).array()).sum();
            } else if constexpr (std::is_same_v<T, HookeIsotropic>) {
                const Mat E = c.E();
                const double tr = (eta_inv * E).trace();
                return -0.5 * (m.lambda * (eta_inv * E * eta_inv * E).trace() + m.mu * tr * tr);
            } else if constexpr (std::is_same_v<T, Pressure>) {
                return m.p * std::log(std::abs(c.s.phi().determinant()));
            } else if constexpr (std::is_same_v<T, ConstantForce>) {
                return -m.F.dot(c.g.components() * c.s.x());
            } else if constexpr (std::is_same_v<T, ConfigPotential>) {
                return m.V(c.s.phi());
            } else if constexpr (std::is_same_v<T, SumModel>) {
                double V = 0.0;
                for (const TorqueModel& part : m.models) V += potential_of(part, c);
                return V;
            } else {
                return 0.0;
            }
        },
        model.model);
}

}  // namespace

TorqueOutput torque(const TorqueModel& model, const BodyStateD& s, const MetricD& g,
                    const MetricD& eta) {
    return evaluate(model, Context(s, g, eta));
}

PotentialTorque potential_torque_from_gradient(const std::function<Mat(const Mat&)>& dV,
                                               const Mat& phi, const MetricD& g) {
    const Mat D = dV(phi);
    if (D.rows() != phi.rows() || D.cols() != phi.cols())
        throw DimensionMismatch("potential gradient has wrong shape");
    PotentialTorque out;
    out.N_mixed = -phi * D.transpose();
    out.N = out.N_mixed * g.inverse();
    return out;
}

double potential_energy(const TorqueModel& model, const BodyStateD& s, const MetricD& g,
                        const MetricD& eta) {
    return potential_of(model, Context(s, g, eta));
}

bool is_velocity_independent(const TorqueModel& model) {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ViscousContinuum> || std::is_same_v<T, ViscousDiscrete> ||
                          std::is_same_v<T, ExternalFriction> || std::is_same_v<T, LinearFriction>)
                return false;
            else if constexpr (std::is_same_v<T, SumModel>) {
                for (const TorqueModel& part : m.models)
                    if (!is_velocity_independent(part)) return false;
                return true;
            } else
                return true;
        },
        model.model);
}

bool has_full_potential(const TorqueModel& model, Index n) {
    return std::visit(
        [n](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IsotropicExpansion> ||
                          std::is_same_v<T, HookeGreenShifted>)
                return false;
            else if constexpr (std::is_same_v<T, HookeAnisotropic>)
                return major_symmetric(m.C, n);
            else if constexpr (std::is_same_v<T, SumModel>) {
                for (const TorqueModel& part : m.models)
                    if (!has_full_potential(part, n)) return false;
                return true;
            } else
                return true;
        },
        model.model);
}

bool is_purely_dissipative(const TorqueModel& model) {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ViscousContinuum> || std::is_same_v<T, ViscousDiscrete> ||
                          std::is_same_v<T, ExternalFriction> || std::is_same_v<T, LinearFriction>)
                return true;
            else if constexpr (std::is_same_v<T, SumModel>) {
                for (const TorqueModel& part : m.models)
                    if (!is_purely_dissipative(part)) return false;
                return !m.models.empty();
            } else
                return false;
        },
        model.model);
}

bool has_translational_force(const TorqueModel& model) {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantForce>)
                return true;
            else if constexpr (std::is_same_v<T, SumModel>) {
                for (const TorqueModel& part : m.models)
                    if (has_translational_force(part)) return true;
                return false;
            } else
                return false;
        },
        model.model);
}

double power(const BodyStateD& s, const TorqueOutput& out, const MetricD& g) {
    require_invertible(s.phi());
    const Mat Omega = s.phidot * s.phi().inverse();
    return out.F.dot(g.components() * s.v) + (out.N * g.components() * Omega).trace();
}

HyperelasticInvariant quadratic_invariant_potential(const Vec& k) {
    HyperelasticInvariant h;
    h.U = [k](const Vec& K) {
        const double n = double(K.size());
        double U = 0.0;
        for (Index a = 0; a < K.size() && a < k.size(); ++a)
            U += 0.5 * k(a) * (K(a) - n) * (K(a) - n);
        return U;
    };
    h.dU = [k](const Vec& K) {
        const double n = double(K.size());
        Vec d = Vec::Zero(K.size());
        for (Index a = 0; a < K.size() && a < k.size(); ++a) d(a) = k(a) * (K(a) - n);
        return d;
    };
    return h;
}

}  // namespace affine
