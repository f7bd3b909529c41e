#pragma once

#include "affine/kinematics.hpp"

namespace affine {

// Monopole m and contravariant material dipole J^{AB}; only J and its inverse are stored.
template <typename Scalar>
class Inertia {
public:
    Inertia(Scalar mass, MatrixX<Scalar> J) : mass_(mass), J_(std::move(J)) {
        if (!(mass_ > Scalar(0))) throw SingularInertia("mass must be positive");
        if (J_.rows() != J_.cols()) throw DimensionMismatch("J must be square");
        if ((J_ - J_.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * (Scalar(1) + J_.cwiseAbs().maxCoeff()))
            throw SingularInertia("J must be symmetric");
        Eigen::LLT<MatrixX<Scalar>> llt(J_);
        if (llt.info() != Eigen::Success) throw SingularInertia("J must be positive definite");
        Jinv_ = llt.solve(MatrixX<Scalar>::Identity(J_.rows(), J_.cols()));
        Jinv_ = Scalar(0.5) * (Jinv_ + Jinv_.transpose());
    }

    // J^{AB} = I η^{AB}.
    static Inertia isotropic(Scalar mass, Scalar I, const Metric<Scalar>& eta) {
        Inertia in(mass, I * eta.inverse());
        in.isotropic_ = true;
        return in;
    }

    Scalar mass() const { return mass_; }
    const MatrixX<Scalar>& J() const { return J_; }
    const MatrixX<Scalar>& Jinv() const { return Jinv_; }
    Index dim() const { return J_.rows(); }
    // Set when J is proportional to η⁻¹; then J⁻¹ and the η-lowered J coincide up to scale.
    bool is_isotropic() const { return isotropic_; }

private:
    Scalar mass_;
    MatrixX<Scalar> J_, Jinv_;
    bool isotropic_ = false;
};

using InertiaD = Inertia<double>;

template <typename Scalar>
struct KinematicalMomenta {
    VectorX<Scalar> k;     // m v
    MatrixX<Scalar> K;     // φ J φ̇ᵀ
    MatrixX<Scalar> S;     // K − Kᵀ
    MatrixX<Scalar> Khat;  // φ⁻¹ K φ⁻ᵀ = J Ω̂ᵀ
    VectorX<Scalar> khat;  // φ⁻¹ k
};

template <typename Scalar>
KinematicalMomenta<Scalar> kinematical_momenta(const BodyState<Scalar>& s,
                                               const Inertia<Scalar>& in) {
    require_invertible(s.phi());
    const auto lu = s.phi().partialPivLu();
    KinematicalMomenta<Scalar> km;
    km.k = in.mass() * s.v;
    km.K = s.phi() * in.J() * s.phidot.transpose();
    km.S = km.K - km.K.transpose();
    km.Khat = in.J() * lu.solve(s.phidot).transpose();
    km.khat = lu.solve(km.k);
    return km;
}

// Eulerian inertia J[φ] = φ J φᵀ.
template <typename Scalar>
MatrixX<Scalar> euler_inertia(const MatrixX<Scalar>& phi, const Inertia<Scalar>& in) {
    return phi * in.J() * phi.transpose();
}

template <typename Scalar>
struct CanonicalMomenta {
    VectorX<Scalar> p;
    MatrixX<Scalar> P;          // P^A_i
    MatrixX<Scalar> Sigma;      // φP
    MatrixX<Scalar> SigmaHat;   // Pφ
    MatrixX<Scalar> spin;       // Σ − Σᵀ(g)
    MatrixX<Scalar> vorticity;  // Σ̂ − Σ̂ᵀ(η)
};

template <typename Scalar>
CanonicalMomenta<Scalar> canonical_momenta(const MatrixX<Scalar>& phi, const VectorX<Scalar>& p,
                                           const MatrixX<Scalar>& P, const Metric<Scalar>& g,
                                           const Metric<Scalar>& eta) {
    CanonicalMomenta<Scalar> c;
    c.p = p;
    c.P = P;
    c.Sigma = phi * P;
    c.SigmaHat = P * phi;
    c.spin = c.Sigma - metric_transpose(c.Sigma, g);
    c.vorticity = c.SigmaHat - metric_transpose(c.SigmaHat, eta);
    return c;
}

// C(k) = tr(Σ^k).
template <typename Derived>
typename Derived::Scalar casimir(const Eigen::MatrixBase<Derived>& Sigma, int k) {
    using Scalar = typename Derived::Scalar;
    MatrixX<Scalar> power = MatrixX<Scalar>::Identity(Sigma.rows(), Sigma.cols());
    for (int i = 0; i < k; ++i) power = power * Sigma;
    return power.trace();
}

// ‖W‖² = −½ tr(W²) for a metric-antisymmetric mixed tensor W.
template <typename Derived>
typename Derived::Scalar antisymmetric_norm_sq(const Eigen::MatrixBase<Derived>& W) {
    return -typename Derived::Scalar(0.5) * (W * W).trace();
}

// Orbital affine moment Λ^i_j = x^i p_j and total J(o) = Λ + Σ about the origin.
template <typename Scalar>
MatrixX<Scalar> orbital_moment(const VectorX<Scalar>& x, const VectorX<Scalar>& p) {
    return x * p.transpose();
}

}  // namespace affine
