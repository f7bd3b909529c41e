#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "affine/kinematics.hpp"

namespace affine {

// V = U(𝒦₁…𝒦ₙ); dU returns ∂U/∂𝒦_a for a = 1..n.
struct HyperelasticInvariant {
    std::function<double(const Vec&)> U;
    std::function<Vec(const Vec&)> dU;
};

// N̂ = Σ_{a=0}^{n−1} l_a(𝒦) (η⁻¹G)^a η⁻¹.
struct IsotropicExpansion {
    std::function<Vec(const Vec&)> l;
};

// N̂^{AB} = C^{ABKL} E_{KL}; C stored flat at ((A·n + B)·n + K)·n + L.
struct HookeAnisotropic {
    std::vector<double> C;
};

// C^{ABKL} = λ η^{AK}η^{BL} + μ η^{AB}η^{KL}.
struct HookeIsotropic {
    double lambda, mu;
};

// As HookeIsotropic with η^{-1} replaced by G^{-1}; not derivable from a potential.
struct HookeGreenShifted {
    double lambda, mu;
};

struct ViscousContinuum {
    double eta_vis, zeta, Vol0;
};

// N_g = −α(Ω + Ωᵀ(g)) − β tr(Ω) Id.
struct ViscousDiscrete {
    double alpha, beta;
};

// Separate rotational (α), shear (β) and dilatational (γ) surface friction.
struct ExternalFriction {
    double alpha, beta, gamma;
};

// N^{ij} = −V^{ijab} d_ab, with d_ab = g_ac d^c_b; raw tensor, flat like HookeAnisotropic.
struct LinearFriction {
    std::vector<double> V;
};

// N = −p g⁻¹, from V = p ln|det φ|.
struct Pressure {
    double p;
};

// Constant spatial force field on the centre of mass, V = −g(F, x).
struct ConstantForce {
    Vec F;
};

// General potential V(φ) with gradient ∂V/∂φ^i_A returned as an n×n matrix.
struct ConfigPotential {
    std::function<double(const Mat&)> V;
    std::function<Mat(const Mat&)> dV;
};

struct TorqueModel;

struct SumModel {
    std::vector<TorqueModel> models;
};

struct TorqueModel {
    using Variant =
        std::variant<HyperelasticInvariant, IsotropicExpansion, HookeAnisotropic, HookeIsotropic,
                     HookeGreenShifted, ViscousContinuum, ViscousDiscrete, ExternalFriction,
                     LinearFriction, Pressure, ConstantForce, ConfigPotential, SumModel>;
    Variant model;

    TorqueModel() : model(SumModel{}) {}
    template <typename T, typename = std::enable_if_t<!std::is_same_v<std::decay_t<T>, TorqueModel>>>
    TorqueModel(T&& m) : model(std::forward<T>(m)) {}
};

struct TorqueOutput {
    Mat N;     // N^{ij}
    Mat Nhat;  // N̂^{AB} = φ⁻¹ N φ⁻ᵀ
    Vec F;     // F^i
};

TorqueOutput torque(const TorqueModel& model, const BodyStateD& s, const MetricD& g,
                    const MetricD& eta);

// N^i_j = −φ^i_A ∂V/∂φ^j_A and N^{ij} = N^i_k g^{kj}.
struct PotentialTorque {
    Mat N_mixed, N;
};
PotentialTorque potential_torque_from_gradient(const std::function<Mat(const Mat&)>& dV,
                                               const Mat& phi, const MetricD& g);

// Sum of the potentials of all conservative parts; dissipative parts contribute nothing.
double potential_energy(const TorqueModel& model, const BodyStateD& s, const MetricD& g,
                        const MetricD& eta);

// True when no part is velocity dependent.
bool is_velocity_independent(const TorqueModel& model);
// True when every velocity-independent part has a potential.
bool has_full_potential(const TorqueModel& model, Index n);
// True when every part is a dissipative friction law.
bool is_purely_dissipative(const TorqueModel& model);
// True when any part produces a translational force.
bool has_translational_force(const TorqueModel& model);

// 𝒫 = g(F, v) + tr(N g Ω).
double power(const BodyStateD& s, const TorqueOutput& out, const MetricD& g);

// 𝒦-potential U = Σ k_a/2 (𝒦_a − n)², minimised at the undeformed state.
HyperelasticInvariant quadratic_invariant_potential(const Vec& k);

}  // namespace affine
