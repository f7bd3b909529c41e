#pragma once

#include "affine/tensor_core.hpp"

namespace affine {

template <typename Scalar>
struct BodyState {
    Configuration<Scalar> config;
    VectorX<Scalar> v;
    MatrixX<Scalar> phidot;

    Index dim() const { return config.phi.rows(); }
    const MatrixX<Scalar>& phi() const { return config.phi; }
    const VectorX<Scalar>& x() const { return config.x; }
};

using BodyStateD = BodyState<double>;

template <typename Scalar>
struct AffineVelocity {
    MatrixX<Scalar> omega_spatial;   // Ω = φ̇φ⁻¹
    MatrixX<Scalar> omega_material;  // Ω̂ = φ⁻¹φ̇
    VectorX<Scalar> vhat;            // φ⁻¹v
};

template <typename Scalar>
AffineVelocity<Scalar> affine_velocity(const BodyState<Scalar>& s, const Metric<Scalar>& g,
                                       const Metric<Scalar>& eta) {
    require_dim(s.phi(), g, eta);
    require_invertible(s.phi());
    const auto lu = s.phi().partialPivLu();
    AffineVelocity<Scalar> w;
    w.omega_material = lu.solve(s.phidot);
    w.omega_spatial = s.phidot * lu.inverse();
    w.vhat = lu.solve(s.v);
    return w;
}

template <typename Scalar>
struct VelocitySplit {
    MatrixX<Scalar> omega;  // metric-antisymmetric part
    MatrixX<Scalar> d;      // metric-symmetric part
};

template <typename Scalar>
VelocitySplit<Scalar> split_velocity(const MatrixX<Scalar>& Omega, const Metric<Scalar>& g) {
    return {metric_antisymmetric_part(Omega, g), metric_symmetric_part(Omega, g)};
}

enum class Side { Spatial, Material };

// The spatial split of Ω (w.r.t. g) and the co-moving split of Ω̂ (w.r.t. η) are not
// equivalent unless φ is an isometry, so the side is explicit.
template <typename Scalar>
VelocitySplit<Scalar> split_velocity(const AffineVelocity<Scalar>& w, const Metric<Scalar>& g,
                                     const Metric<Scalar>& eta, Side side) {
    return side == Side::Spatial ? split_velocity(w.omega_spatial, g)
                                 : split_velocity(w.omega_material, eta);
}

// dG/dt = φᵀ(gΩ + (gΩ)ᵀ)φ.
template <typename Scalar>
MatrixX<Scalar> green_rate(const BodyState<Scalar>& s, const Metric<Scalar>& g) {
    require_invertible(s.phi());
    const MatrixX<Scalar> Omega = s.phidot * s.phi().inverse();
    const MatrixX<Scalar> gO = g.components() * Omega;
    return s.phi().transpose() * (gO + gO.transpose()) * s.phi();
}

// dC/dt = −(ΩᵀC + CΩ) with C = φ⁻ᵀηφ⁻¹.
template <typename Scalar>
MatrixX<Scalar> cauchy_rate(const BodyState<Scalar>& s, const Metric<Scalar>& eta) {
    require_invertible(s.phi());
    const MatrixX<Scalar> phi_inv = s.phi().inverse();
    const MatrixX<Scalar> C = phi_inv.transpose() * eta.components() * phi_inv;
    const MatrixX<Scalar> Omega = s.phidot * phi_inv;
    return -(Omega.transpose() * C + C * Omega);
}

}  // namespace affine
