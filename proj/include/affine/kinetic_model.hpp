#pragma once

#include <variant>

#include "affine/inertia_momenta.hpp"

namespace affine {

// T = ½ m vᵀgv + ½ tr(J φ̇ᵀ g φ̇).
struct DAlembert {
    double m;
    Mat J;
};

// Invariant under spatial affine maps: uses Ω̂ and the co-moving translational velocity.
struct SpatialAffine {
    double m, I, A, B;
};

// Invariant under material affine maps: uses Ω and the spatial translational velocity.
struct MaterialAffine {
    double m, I, A, B;
};

// Invariant on both sides; internal degrees of freedom only.
struct DoublyAffine {
    double A, B;
};

struct GeneralEightParam {
    double m1, m2, I1, I2, I3, I4, A, B;
};

using KineticModel =
    std::variant<DAlembert, SpatialAffine, MaterialAffine, DoublyAffine, GeneralEightParam>;

KineticModel dalembert_model(const InertiaD& inertia);
const char* kinetic_model_name(const KineticModel& model);

struct PhaseState {
    Vec x;
    Mat phi;
    Vec p;
    Mat P;  // P^A_i, so Σ = φP and Σ̂ = Pφ

    Index dim() const { return phi.rows(); }
    Mat Sigma() const { return phi * P; }
    Mat SigmaHat() const { return P * phi; }
};

// Reciprocal inverse inertial constants 1/Ĩ, 1/Ã, 1/B̃ of an (I, A, B) family:
//   Ĩ = (I²−A²)/I, Ã = (A²−I²)/A, B̃ = −(I+A)(I+A+nB)/B,
// with the reciprocal set to zero where the constant is infinite (I = 0 or B = 0).
struct InverseConstants {
    double inv_I, inv_A, inv_B;
};
InverseConstants inverse_constants(double I, double A, double B, Index n);

// Coefficients of 𝒯 = C(2)/(2α) + C(1)²/(2β) + ‖W‖²/(2μ), stored as reciprocals.
struct CasimirConstants {
    double inv_alpha, inv_beta, inv_mu;
};
CasimirConstants casimir_constants(double I, double A, double B, Index n);

// Throws NonInvertibleLegendre when the constant-coefficient quadratic form is degenerate.
// GeneralEightParam is configuration-dependent and is checked inside legendre_inverse.
void check_nondegenerate(const KineticModel& model, Index n);

bool has_translation(const KineticModel& model);

double kinetic_energy(const KineticModel& model, const BodyStateD& s, const MetricD& g,
                      const MetricD& eta);
PhaseState legendre(const KineticModel& model, const BodyStateD& s, const MetricD& g,
                    const MetricD& eta);
BodyStateD legendre_inverse(const KineticModel& model, const PhaseState& s, const MetricD& g,
                            const MetricD& eta);

// Y with dT = tr(Y dφ) at fixed (v, φ̇); shaped like P.
Mat kinetic_config_gradient(const KineticModel& model, const BodyStateD& s, const MetricD& g,
                            const MetricD& eta);

double kinetic_hamiltonian(const KineticModel& model, const PhaseState& s, const MetricD& g,
                           const MetricD& eta);
// Casimir form of the internal kinetic Hamiltonian for the (I, A, B) families.
double kinetic_hamiltonian_casimir(const KineticModel& model, const PhaseState& s,
                                   const MetricD& g, const MetricD& eta);

CanonicalMomenta<double> canonical_from_kinematical(const BodyStateD& s, const MetricD& g,
                                                    const MetricD& eta,
                                                    const KineticModel& model);
// d'Alembert model built from the inertia.
CanonicalMomenta<double> canonical_from_kinematical(const BodyStateD& s, const InertiaD& inertia,
                                                    const MetricD& g, const MetricD& eta);

}  // namespace affine
