#include "affine/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace affine {
namespace {

bool finite(const Vec& y) { return y.allFinite(); }

void run_check(const StepHooks& hooks, const Vec& y) {
    if (!finite(y)) throw IntegrationFailure("state became non-finite");
    if (hooks.check) hooks.check(y);
}

// One RK4 step of size h; on an inadmissible result, retries as two half steps.
Vec guarded_rk4(const OdeRhs& f, double t, const Vec& y, double h, const StepHooks& hooks,
                int depth, int max_depth) {
    try {
        Vec y1 = rk4_step(f, t, y, h);
        run_check(hooks, y1);
        return y1;
    } catch (const Error&) {
        if (depth >= max_depth) throw;
        const Vec mid = guarded_rk4(f, t, y, 0.5 * h, hooks, depth + 1, max_depth);
        return guarded_rk4(f, t + 0.5 * h, mid, 0.5 * h, hooks, depth + 1, max_depth);
    }
}

// Fehlberg 4(5) tableau; the fourth-order solution is propagated.
struct Rkf45Result {
    Vec y4;
    double err;
};

Rkf45Result rkf45_step(const OdeRhs& f, double t, const Vec& y, double h, double rtol,
                       double atol) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + h / 4.0, y + h * (k1 / 4.0));
    const Vec k3 = f(t + 3.0 * h / 8.0, y + h * (3.0 / 32.0 * k1 + 9.0 / 32.0 * k2));
    const Vec k4 = f(t + 12.0 * h / 13.0,
                     y + h * (1932.0 / 2197.0 * k1 - 7200.0 / 2197.0 * k2 + 7296.0 / 2197.0 * k3));
    const Vec k5 = f(t + h, y + h * (439.0 / 216.0 * k1 - 8.0 * k2 + 3680.0 / 513.0 * k3 -
                                     845.0 / 4104.0 * k4));
    const Vec k6 = f(t + h / 2.0, y + h * (-8.0 / 27.0 * k1 + 2.0 * k2 - 3544.0 / 2565.0 * k3 +
                                           1859.0 / 4104.0 * k4 - 11.0 / 40.0 * k5));
    const Vec y4 =
        y + h * (25.0 / 216.0 * k1 + 1408.0 / 2565.0 * k3 + 2197.0 / 4104.0 * k4 - 0.2 * k5);
    const Vec y5 = y + h * (16.0 / 135.0 * k1 + 6656.0 / 12825.0 * k3 + 28561.0 / 56430.0 * k4 -
                            9.0 / 50.0 * k5 + 2.0 / 55.0 * k6);
    const Vec scale = (atol + rtol * y.cwiseAbs().cwiseMax(y4.cwiseAbs()).array()).matrix();
    const double err = ((y5 - y4).cwiseAbs().array() / scale.array()).maxCoeff();
    return {y4, std::isfinite(err) ? err : std::numeric_limits<double>::infinity()};
}

}  // namespace

Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec rk4_advance(const OdeRhs& f, double t0, Vec y, double h, long steps, const StepHooks& hooks) {
    for (long k = 0; k < steps; ++k) {
        y = guarded_rk4(f, t0 + double(k) * h, y, h, hooks, 0, 60);
        if (hooks.project) hooks.project(y);
    }
    return y;
}

std::vector<Sample> integrate(const OdeRhs& f, const Vec& y0, const IntegratorOptions& opt,
                              const StepHooks& hooks) {
    if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0) || opt.stride < 1)
        throw IntegrationFailure("dt, t_end and stride must be positive");
    run_check(hooks, y0);
    const double interval = opt.dt * opt.stride;
    const long n_samples = static_cast<long>(std::floor(opt.t_end / interval * (1.0 + 1e-12)));
    std::vector<Sample> out;
    out.reserve(static_cast<size_t>(n_samples) + 1);
    out.push_back({0.0, y0});
    Vec y = y0;

    if (opt.method == Method::RK4) {
        for (long s = 1; s <= n_samples; ++s) {
            for (int k = 0; k < opt.stride; ++k) {
                const long step = (s - 1) * opt.stride + k;
                y = guarded_rk4(f, double(step) * opt.dt, y, opt.dt, hooks, 0, opt.max_rejections);
                if (hooks.project) hooks.project(y);
            }
            out.push_back({double(s) * interval, y});
        }
        return out;
    }

    double h = opt.dt;
    double t = 0.0;
    long steps = 0;
    int rejections = 0;
    for (long s = 1; s <= n_samples; ++s) {
        const double target = double(s) * interval;
        while (t < target - 1e-14 * std::max(1.0, target)) {
            if (++steps > opt.max_steps) throw IntegrationFailure("step budget exhausted");
            const double step = std::min(h, target - t);
            Rkf45Result r = rkf45_step(f, t, y, step, opt.rtol, opt.atol);
            bool ok = r.err <= 1.0;
            if (ok) {
                try {
                    run_check(hooks, r.y4);
                } catch (const Error&) {
                    ok = false;
                    if (++rejections > opt.max_rejections) throw;
                    h = 0.5 * step;
                    continue;
                }
            }
            if (ok) {
                rejections = 0;
                t += step;
                y = r.y4;
                if (hooks.project) hooks.project(y);
            }
            const double factor =
                r.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.err, -0.2), 0.2, 5.0);
            h = step * factor;
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationFailure("step size underflow");
        }
        t = target;
        out.push_back({target, y});
    }
    return out;
}

}  // namespace affine
