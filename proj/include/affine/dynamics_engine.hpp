#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "affine/force_models.hpp"
#include "affine/inertia_momenta.hpp"
#include "affine/integrators.hpp"

namespace affine {

enum class ConstraintKind {
    Unconstrained,
    Gyroscopic,
    ShapePreserving,
    Isochoric,
    Dilatational,
    RotationFreeSpatial,
    RotationFreeMaterial,
};

const char* constraint_name(ConstraintKind kind);
std::optional<ConstraintKind> parse_constraint(const std::string& name);

// Internal degrees of freedom; the rotation-free kinds keep all n² and restrict velocities.
Index internal_dof(ConstraintKind kind, Index n);

struct BodyAcceleration {
    Vec vdot;
    Mat phiddot;
};

struct NamedMonitor {
    std::string name;
    std::function<double(double t, const BodyStateD&)> f;
};

struct EquationSystem {
    ConstraintKind kind = ConstraintKind::Unconstrained;
    std::function<BodyAcceleration(double t, const BodyStateD&)> rhs;
    // Holonomic residual first (if any), then the velocity residual.
    std::function<Vec(const BodyStateD&)> constraint_residual;
    std::vector<NamedMonitor> conserved_monitors;
    // Post-step projection back onto the constraint manifold; identity when unconstrained.
    std::function<void(BodyStateD&)> stabilize;
};

// m ẍ = F and φ̈ J = Nᵀ φ⁻ᵀ.
EquationSystem unconstrained_rhs(const InertiaD& inertia, const TorqueModel& model,
                                 const MetricD& g, const MetricD& eta);

// Reaction-free d'Alembert projection onto the admissible velocity subspace of `kind`.
EquationSystem constrained_rhs(ConstraintKind kind, const InertiaD& inertia,
                               const TorqueModel& model, const MetricD& g, const MetricD& eta);

// Throws ConstraintViolation when the state is off the constraint manifold by more than tol.
void require_constraint(ConstraintKind kind, const BodyStateD& s, const MetricD& g,
                        const MetricD& eta, double tol = 1e-10);
Vec constraint_residual(ConstraintKind kind, const BodyStateD& s, const MetricD& g,
                        const MetricD& eta);
void stabilize(ConstraintKind kind, BodyStateD& s, const MetricD& g, const MetricD& eta);

// T + V for the d'Alembert kinetic energy.
double newton_energy(const InertiaD& inertia, const TorqueModel& model, const BodyStateD& s,
                     const MetricD& g, const MetricD& eta);

// Co-moving representation (x, v̂, φ, Ω̂) with v = φv̂ and φ̇ = φΩ̂.
struct ComovingState {
    Vec x, vhat;
    Mat phi, OmegaHat;
};

struct ComovingSystem {
    std::function<ComovingState(double t, const ComovingState&)> rhs;
};

// m dv̂/dt = −m Ω̂v̂ + F̂ and (dΩ̂/dt) J = −Ω̂²J + N̂ᵀ.
ComovingSystem comoving_rhs(const InertiaD& inertia, const TorqueModel& model, const MetricD& g,
                            const MetricD& eta);

ComovingState to_comoving(const BodyStateD& s);
BodyStateD from_comoving(const ComovingState& c);

// Flat layouts for the integrators: x, v (or v̂), φ, φ̇ (or Ω̂), column-major.
Vec pack(const BodyStateD& s);
BodyStateD unpack_body(const Vec& y, Index n);
Vec pack(const ComovingState& c);
ComovingState unpack_comoving(const Vec& y, Index n);

OdeRhs as_ode(const EquationSystem& sys, Index n);
OdeRhs as_ode(const ComovingSystem& sys, Index n);
StepHooks stabilization_hooks(const EquationSystem& sys, Index n);

}  // namespace affine
