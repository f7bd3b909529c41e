#pragma once

#include <cmath>

#include "affine/dynamics_engine.hpp"
#include "support/generators.hpp"

namespace scenario {

using namespace affine;

// An initial state on the constraint manifold of `kind`, with velocities of order `speed`.
inline BodyStateD constrained_state(ConstraintKind kind, gen::Rng& rng, const MetricD& g,
                                    const MetricD& eta, double speed = 0.5) {
    const Index n = g.dim();
    const Mat I = Mat::Identity(n, n);
    BodyStateD s;
    s.config.x = rng.vec(n);
    s.v = rng.vec(n, speed);
    const Mat U = rng.isometry(g, eta);
    const Mat omega = g.inverse() * rng.antisymmetric(n, speed);
    const Mat d = g.inverse() * rng.symmetric(n, speed);
    const double mu = rng.uniform(-speed, speed);
    // Near-isometric so that elastic forces stay moderate under arbitrary metrics.
    const Mat near = U * (I + 0.1 * rng.mat(n));
    switch (kind) {
        case ConstraintKind::Gyroscopic:
            s.config.phi = U;
            s.phidot = omega * U;
            break;
        case ConstraintKind::ShapePreserving:
            s.config.phi = rng.uniform(0.8, 1.2) * U;
            s.phidot = (omega + mu * I) * s.config.phi;
            break;
        case ConstraintKind::Dilatational:
            s.config.phi = rng.uniform(0.8, 1.2) * U;
            s.phidot = mu * s.config.phi;
            break;
        case ConstraintKind::Isochoric: {
            Mat phi = near;
            const double target = std::sqrt(eta.determinant() / g.determinant());
            phi *= std::pow(target / phi.determinant(), 1.0 / double(n));
            Mat W = rng.mat(n, speed);
            W -= (W.trace() / double(n)) * I;
            s.config.phi = phi;
            s.phidot = W * phi;
            break;
        }
        case ConstraintKind::RotationFreeSpatial:
            s.config.phi = near;
            s.phidot = d * s.config.phi;
            break;
        case ConstraintKind::RotationFreeMaterial:
            s.config.phi = near;
            s.phidot = s.config.phi * eta.inverse() * rng.symmetric(n, speed);
            break;
        case ConstraintKind::Unconstrained:
            s.config.phi = near;
            s.phidot = rng.mat(n, speed);
            break;
    }
    return s;
}

// Integrates a Newtonian system with stabilization and returns every sample.
inline std::vector<BodyStateD> run(const EquationSystem& sys, const BodyStateD& s0, double dt,
                                   long steps, int stride = 1) {
    const Index n = s0.dim();
    IntegratorOptions opt;
    opt.dt = dt;
    opt.t_end = dt * double(steps);
    opt.stride = stride;
    std::vector<BodyStateD> out;
    for (const Sample& smp : integrate(as_ode(sys, n), pack(s0), opt, stabilization_hooks(sys, n)))
        out.push_back(unpack_body(smp.y, n));
    return out;
}

inline HyperelasticInvariant mild_elastic(Index n) {
    Vec k = Vec::Zero(n);
    k(0) = 0.8;
    if (n > 1) k(1) = 0.1;
    return quadratic_invariant_potential(k);
}

}  // namespace scenario
