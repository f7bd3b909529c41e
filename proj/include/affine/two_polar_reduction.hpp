#pragma once

#include <variant>

#include "affine/integrators.hpp"
#include "affine/kinetic_model.hpp"
#include "affine/kinematics.hpp"

namespace affine {

// Reduced variables of φ = L·diag(e^q)·R⁻¹: stretch momenta p_a and the L- and R-top spins.
// ρ̂ = L⁻¹SL carries the spin S, τ̂ = −R⁻¹VR the vorticity V; both antisymmetric.
struct TwoPolarState {
    TwoPolarFactors<double> factors;
    Vec p;
    Mat rho_hat, tau_hat;

    Index dim() const { return p.size(); }
    const Vec& q() const { return factors.q; }
    Mat M() const { return -rho_hat - tau_hat; }
    Mat N_lat() const { return rho_hat - tau_hat; }
};

// (1/2α)[Σp² + (1/8)Σ_{a<b}(M²/sinh²(Δ/2) − N²/cosh²(Δ/2))] + (inv_beta/2)(Σp)²,
// Δ = q_a − q_b. The bracket is C(2); inv_beta carries the trace term of the doubly
// affine model.
struct HyperbolicCasimir {
    double alpha;
    double inv_beta = 0.0;
};

// d'Alembert model with J = I·η⁻¹ in the Q = e^q variables.
struct DAlembertIsotropic {
    double I;
};

// Trigonometric counterpart on angle variables; every term is non-negative.
struct SutherlandCompact {
    double A;
};

// n = 2 closed form in centre-of-mass variables (q, x = q₂ − q₁, p = p₁ + p₂, p_x).
struct TwoDimClosed {
    double A;
};

using LatticeModel =
    std::variant<HyperbolicCasimir, DAlembertIsotropic, SutherlandCompact, TwoDimClosed>;

const char* lattice_model_name(const LatticeModel& model);

// Throws DegenerateReduction when two stretchings coincide within 1e-10.
TwoPolarState reduce(const PhaseState& s, const MetricD& g, const MetricD& eta);

// Inverse of reduce for the internal part; x and p are set to zero.
PhaseState reconstruct(const TwoPolarState& r, const MetricD& eta);

// Throws CoincidentInvariants when a singular denominator is approached.
double lattice_hamiltonian(const LatticeModel& model, const TwoPolarState& r);

struct ReducedVelocity {
    Vec qdot, pdot;
    Mat rho_dot, tau_dot;
    Mat Ldot, Rdot;  // empty unless legs are requested
};

// q̇ = ∂H/∂p, ṗ = −∂H/∂q, ρ̂̇ = [ρ̂, χ̂], τ̂̇ = [τ̂, ϑ̂] with χ̂ = −∂H/∂ρ̂ and ϑ̂ = −∂H/∂τ̂
// (antisymmetric, upper-triangle derivatives). Legs follow L̇ = Lχ̂ and Ṙ = Rϑ̂.
ReducedVelocity lattice_rhs(const LatticeModel& model, const TwoPolarState& r,
                            bool with_legs = false);

// Flat layout: q, p, upper triangles of ρ̂ and τ̂, then L and R when with_legs.
Vec pack(const TwoPolarState& r, bool with_legs);
// Without legs, L and R are set to the identity.
TwoPolarState unpack_two_polar(const Vec& y, Index n, bool with_legs);
OdeRhs as_ode(const LatticeModel& model, Index n, bool with_legs);
// Step check that rejects states within 1e-8 of a coincidence.
StepHooks lattice_hooks(const LatticeModel& model, Index n);

// φ(t) = exp(Et)φ₀ (spatial generator) or φ₀exp(Êt) (material generator).
Mat exponential_geodesic(const Mat& E, const Mat& phi0, double t, Side side);

// [E, Eᵀ(h)] = 0 to 1e-10, with h the metric of the chosen side.
bool is_stationary_generator(const Mat& E, const MetricD& metric, Side side);

// n = 2 amplitudes m = M₁₂ and ν = N₁₂; DimensionMismatch otherwise.
double m_ampl(const TwoPolarState& r);
double nu_lat(const TwoPolarState& r);

enum class Threshold { Bounded, Unbounded, Critical };
const char* threshold_name(Threshold t);

// Bounded when |ν| > |m| ("centrifugal attraction" wins at large |x|), Critical within 1e-12.
Threshold threshold_classify(const TwoPolarState& r, const TwoDimClosed& model);

}  // namespace affine
