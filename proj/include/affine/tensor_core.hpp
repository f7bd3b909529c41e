#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "affine/errors.hpp"

namespace affine {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;
using Index = Eigen::Index;

// Determinants below this magnitude are treated as a collapsed body.
inline constexpr double kDetEpsilon = 1e-12;

// Covariant metric tensor with cached inverse and Cholesky factor.
// Rc is upper triangular with components = Rcᵀ Rc.
template <typename Scalar>
class Metric {
public:
    explicit Metric(MatrixX<Scalar> components) : g_(std::move(components)) {
        if (g_.rows() != g_.cols() || g_.rows() == 0)
            throw InvalidMetric("metric must be a non-empty square matrix");
        using std::abs;
        const Scalar asym = (g_ - g_.transpose()).cwiseAbs().maxCoeff();
        if (!(asym <= Scalar(1e-12) * (Scalar(1) + g_.cwiseAbs().maxCoeff())))
            throw InvalidMetric("metric is not symmetric");
        Eigen::LLT<MatrixX<Scalar>> llt(g_);
        if (llt.info() != Eigen::Success)
            throw InvalidMetric("metric is not positive definite");
        upper_ = llt.matrixU();
        const Index n = g_.rows();
        upper_inv_ = upper_.template triangularView<Eigen::Upper>().solve(
            MatrixX<Scalar>::Identity(n, n));
        inv_ = upper_inv_ * upper_inv_.transpose();
        inv_ = Scalar(0.5) * (inv_ + inv_.transpose());
        det_ = upper_.diagonal().prod();
        det_ *= det_;
        identity_ = (g_ - MatrixX<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff() == Scalar(0);
    }

    static Metric identity(Index n) { return Metric(MatrixX<Scalar>::Identity(n, n)); }

    Index dim() const { return g_.rows(); }
    const MatrixX<Scalar>& components() const { return g_; }
    const MatrixX<Scalar>& inverse() const { return inv_; }
    const MatrixX<Scalar>& cholesky_upper() const { return upper_; }
    const MatrixX<Scalar>& cholesky_upper_inverse() const { return upper_inv_; }
    Scalar determinant() const { return det_; }
    bool is_identity() const { return identity_; }

private:
    MatrixX<Scalar> g_, inv_, upper_, upper_inv_;
    Scalar det_{};
    bool identity_ = false;
};

using MetricD = Metric<double>;

template <typename Scalar>
struct Configuration {
    VectorX<Scalar> x;
    MatrixX<Scalar> phi;
};

// Metric transpose of a mixed tensor Y^i_j: (Yᵀ(g))^i_j = g^{ik} Y^l_k g_{lj}.
template <typename Derived, typename Scalar>
MatrixX<Scalar> metric_transpose(const Eigen::MatrixBase<Derived>& Y, const Metric<Scalar>& g) {
    if (g.is_identity()) return Y.transpose();
    return g.inverse() * Y.transpose() * g.components();
}

template <typename Derived, typename Scalar>
MatrixX<Scalar> metric_symmetric_part(const Eigen::MatrixBase<Derived>& Y, const Metric<Scalar>& g) {
    return Scalar(0.5) * (Y + metric_transpose(Y, g));
}

template <typename Derived, typename Scalar>
MatrixX<Scalar> metric_antisymmetric_part(const Eigen::MatrixBase<Derived>& Y,
                                          const Metric<Scalar>& g) {
    return Scalar(0.5) * (Y - metric_transpose(Y, g));
}

template <typename Derived>
void require_invertible(const Eigen::MatrixBase<Derived>& phi) {
    using std::abs;
    if (phi.rows() != phi.cols())
        throw DimensionMismatch("internal configuration must be square");
    const auto d = phi.determinant();
    if (!(abs(d) >= typename Derived::Scalar(kDetEpsilon)))
        throw SingularConfiguration("|det phi| = " + std::to_string(static_cast<double>(abs(d))) +
                                    " below threshold");
}

template <typename Scalar>
void require_dim(const MatrixX<Scalar>& phi, const Metric<Scalar>& g, const Metric<Scalar>& eta) {
    if (phi.rows() != g.dim() || phi.cols() != eta.dim())
        throw DimensionMismatch("configuration and metric dimensions differ");
}

template <typename Scalar>
struct DeformationBundle {
    MatrixX<Scalar> G, C, Ginv, Cinv, Ghat, Chat, E, e;
    VectorX<Scalar> invariants_K;
};

// Green G = φᵀgφ, Cauchy C = φ⁻ᵀηφ⁻¹, Ĝ = η⁻¹G, Ĉ = g⁻¹C and 𝒦_a = tr Ĝ^a.
template <typename Scalar>
DeformationBundle<Scalar> deformation_bundle(const MatrixX<Scalar>& phi, const Metric<Scalar>& g,
                                             const Metric<Scalar>& eta) {
    require_dim(phi, g, eta);
    require_invertible(phi);
    const Index n = phi.rows();
    const MatrixX<Scalar> phi_inv = phi.inverse();
    DeformationBundle<Scalar> b;
    b.G = phi.transpose() * g.components() * phi;
    b.G = Scalar(0.5) * (b.G + b.G.transpose());
    b.C = phi_inv.transpose() * eta.components() * phi_inv;
    b.C = Scalar(0.5) * (b.C + b.C.transpose());
    b.Ginv = phi_inv * g.inverse() * phi_inv.transpose();
    b.Cinv = phi * eta.inverse() * phi.transpose();
    b.Ghat = eta.inverse() * b.G;
    b.Chat = g.inverse() * b.C;
    b.E = Scalar(0.5) * (b.G - eta.components());
    b.e = Scalar(0.5) * (g.components() - b.C);
    b.invariants_K.resize(n);
    MatrixX<Scalar> power = b.Ghat;
    for (Index a = 0; a < n; ++a) {
        b.invariants_K(a) = power.trace();
        power = power * b.Ghat;
    }
    return b;
}

// φ = L·diag(Q)·R⁻¹ with Lᵀ g L = I, Rᵀ η R = I and q sorted non-increasing.
template <typename Scalar>
struct TwoPolarFactors {
    MatrixX<Scalar> L, R;
    VectorX<Scalar> q, Q;

    MatrixX<Scalar> D() const { return Q.asDiagonal(); }
    MatrixX<Scalar> R_inverse(const Metric<Scalar>& eta) const {
        return R.transpose() * eta.components();
    }
    MatrixX<Scalar> L_inverse(const Metric<Scalar>& g) const {
        return L.transpose() * g.components();
    }
    MatrixX<Scalar> reconstruct(const Metric<Scalar>& eta) const {
        return L * Q.asDiagonal() * R_inverse(eta);
    }
};

// Whitened copy of φ: Rg φ Re⁻¹, which reduces every metric notion to the Euclidean one.
template <typename Scalar>
MatrixX<Scalar> whiten(const MatrixX<Scalar>& phi, const Metric<Scalar>& g,
                       const Metric<Scalar>& eta) {
    return g.cholesky_upper() * phi * eta.cholesky_upper_inverse();
}

template <typename Scalar>
TwoPolarFactors<Scalar> two_polar(const MatrixX<Scalar>& phi, const Metric<Scalar>& g,
                                  const Metric<Scalar>& eta) {
    require_dim(phi, g, eta);
    require_invertible(phi);
    const Index n = phi.rows();
    const MatrixX<Scalar> w = whiten(phi, g, eta);
    // Singular values come out non-increasing. Only V is used; L follows from φR/Q.
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(w, Eigen::ComputeFullV);
    MatrixX<Scalar> Rw = svd.matrixV();
    const VectorX<Scalar> Q = svd.singularValues();

    TwoPolarFactors<Scalar> f;
    f.R = eta.cholesky_upper_inverse() * Rw;
    for (Index a = 0; a < n; ++a) {
        Index k = 0;
        using std::abs;
        for (Index i = 1; i < n; ++i)
            if (abs(f.R(i, a)) > abs(f.R(k, a))) k = i;
        if (f.R(k, a) < Scalar(0)) {
            f.R.col(a) *= Scalar(-1);
            Rw.col(a) *= Scalar(-1);
        }
    }
    const MatrixX<Scalar> Lw = w * Rw * Q.cwiseInverse().asDiagonal();
    f.L = g.cholesky_upper_inverse() * Lw;
    f.Q = Q;
    f.q = Q.array().log().matrix();
    return f;
}

template <typename Scalar>
struct PolarFactors {
    MatrixX<Scalar> U_iso, A_sym, B_sym;
};

// φ = U·A = B·U with U an isometry (U,η) → (V,g) and A, B metric-symmetric positive.
template <typename Scalar>
PolarFactors<Scalar> polar(const MatrixX<Scalar>& phi, const Metric<Scalar>& g,
                           const Metric<Scalar>& eta) {
    const TwoPolarFactors<Scalar> f = two_polar(phi, g, eta);
    const MatrixX<Scalar> Rinv = f.R_inverse(eta);
    const MatrixX<Scalar> Linv = f.L_inverse(g);
    PolarFactors<Scalar> p;
    p.U_iso = f.L * Rinv;
    p.A_sym = f.R * f.Q.asDiagonal() * Rinv;
    p.B_sym = f.L * f.Q.asDiagonal() * Linv;
    return p;
}

// Scaling-and-squaring with a Padé core.
template <typename Derived>
MatrixX<typename Derived::Scalar> matrix_exponential(const Eigen::MatrixBase<Derived>& X) {
    if (X.rows() != X.cols()) throw DimensionMismatch("matrix exponential needs a square matrix");
    const MatrixX<typename Derived::Scalar> A = X;
    return A.exp();
}

// Commutator [A, B] = AB − BA.
template <typename DA, typename DB>
MatrixX<typename DA::Scalar> commutator(const Eigen::MatrixBase<DA>& A,
                                        const Eigen::MatrixBase<DB>& B) {
    return A * B - B * A;
}

}  // namespace affine
