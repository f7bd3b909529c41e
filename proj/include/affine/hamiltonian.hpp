#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "affine/force_models.hpp"
#include "affine/integrators.hpp"
#include "affine/kinetic_model.hpp"

namespace affine {

// Partial derivatives of a phase function. dphi(i, A) = ∂F/∂φ^i_A and dP(A, i) = ∂F/∂P^A_i,
// so each block has the shape of its coordinate.
struct PhaseGradient {
    Vec dx;
    Mat dphi;
    Vec dp;
    Mat dP;

    static PhaseGradient zero(Index n);
    PhaseGradient& operator+=(const PhaseGradient& o);
    PhaseGradient& operator*=(double c);
};

struct PhaseFunction {
    std::function<double(const PhaseState&)> value;
    std::function<PhaseGradient(const PhaseState&)> gradient;
};

// Σ_q ∂F/∂q ∂G/∂p_q − ∂F/∂p_q ∂G/∂q over (x, p) and (φ, P).
double canonical_bracket(const PhaseGradient& dF, const PhaseGradient& dG);
double canonical_bracket(const PhaseFunction& F, const PhaseFunction& G, const PhaseState& s);

// Σ^i_j, Σ̂^A_B, p_i, p̂_A = p_iφ^i_A, Λ^i_j = x^i p_j and J = Λ + Σ. Indices are 0-based;
// j is ignored for the covector generators.
enum class GeneratorKind { Sigma, SigmaHat, p, pHat, Lambda, J };

struct Generator {
    GeneratorKind kind;
    Index i = 0;
    Index j = 0;
};

// Accepts ASCII names (Sigma, SigmaHat, p, pHat, Lambda, J) and the symbols Σ, Σ̂, p̂, Λ.
GeneratorKind parse_generator(const std::string& name);
const char* generator_name(GeneratorKind kind);
bool is_covector(GeneratorKind kind);

double generator_value(const Generator& a, const PhaseState& s);
PhaseGradient generator_gradient(const Generator& a, const PhaseState& s);
PhaseFunction generator_function(const Generator& a);

// Closed-form bracket table of the generator algebra.
double poisson_bracket_generators(const Generator& a, const Generator& b, const PhaseState& s);
// Throws UnknownGenerator for unrecognised names and DimensionMismatch for bad indices.
double poisson_bracket_generators(const std::string& name1, const std::vector<Index>& idx1,
                                  const std::string& name2, const std::vector<Index>& idx2,
                                  const PhaseState& s);

// {a, b} as a constant-coefficient combination of generators, when the pair closes on the
// algebra; nullopt for pairs like {Σ, p̂} whose bracket involves φ explicitly.
struct GeneratorTerm {
    double coeff;
    Generator gen;
};
std::optional<std::vector<GeneratorTerm>> bracket_expansion(const Generator& a,
                                                            const Generator& b, Index n);

// Kinetic Hamiltonian 𝒯(φ; p, P) with analytic gradient; x-independent.
PhaseFunction kinetic_hamiltonian_function(const KineticModel& model, const MetricD& g,
                                           const MetricD& eta);

struct PhaseVelocity {
    Vec xdot;
    Mat phidot;
    Vec pdot;
    Mat Pdot;
};

// ẋ = ∂H/∂p, φ̇ = ∂H/∂P, ṗ = −∂H/∂x, Ṗ = −∂H/∂φ.
PhaseVelocity hamiltonian_rhs(const PhaseFunction& H, const PhaseState& s);

// Kinetic Hamiltonian flow forced by a torque model: ṗ += gF and Ṗ += φ⁻¹Ng.
// For potential models this is the flow of 𝒯 + V, with N̂ the G-raised torque φ⁻¹Nφ⁻ᵀ.
std::function<PhaseVelocity(const PhaseState&)> forced_hamiltonian_rhs(const KineticModel& model,
                                                                       const TorqueModel& torques,
                                                                       const MetricD& g,
                                                                       const MetricD& eta);

// 𝒯 + V with V evaluated at the configuration.
double total_hamiltonian(const KineticModel& model, const TorqueModel& torques,
                         const PhaseState& s, const MetricD& g, const MetricD& eta);

// Flat layout: x, φ, p, P, column-major.
Vec pack(const PhaseState& s);
PhaseState unpack_phase(const Vec& y, Index n);
OdeRhs as_ode(std::function<PhaseVelocity(const PhaseState&)> rhs, Index n);

}  // namespace affine
