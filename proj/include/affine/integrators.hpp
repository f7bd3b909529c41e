#pragma once

#include <functional>
#include <vector>

#include "affine/tensor_core.hpp"

namespace affine {

using OdeRhs = std::function<Vec(double t, const Vec& y)>;

enum class Method { RK4, RKF45 };

struct IntegratorOptions {
    Method method = Method::RK4;
    double dt = 1e-3;      // RK4 step; RKF45 initial step
    double t_end = 1.0;
    int stride = 1;        // samples every stride·dt
    double rtol = 1e-10;   // RKF45 only
    double atol = 1e-12;   // RKF45 only
    int max_rejections = 60;
    long max_steps = 100000000;
};

struct StepHooks {
    // Throws an affine::Error when y is not admissible; the step is then halved and retried.
    std::function<void(const Vec& y)> check;
    // Post-step stabilization onto a constraint manifold.
    std::function<void(Vec& y)> project;
};

struct Sample {
    double t;
    Vec y;
};

Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h);

// Samples at t = k·stride·dt for k = 0..floor(t_end/(stride·dt)).
std::vector<Sample> integrate(const OdeRhs& f, const Vec& y0, const IntegratorOptions& opt,
                              const StepHooks& hooks = {});

// Final state only, fixed RK4 steps of size h covering [t0, t0 + steps·h].
Vec rk4_advance(const OdeRhs& f, double t0, Vec y, double h, long steps,
                const StepHooks& hooks = {});

}  // namespace affine
