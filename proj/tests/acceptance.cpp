// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "affine/dynamics_engine.hpp"
#include "affine/hamiltonian.hpp"
#include "affine/two_polar_reduction.hpp"
#include "support/generators.hpp"
#include "support/scenarios.hpp"

using namespace affine;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

std::vector<Sample> run_ode(const OdeRhs& f, const Vec& y0, double dt, double t_end, int stride,
                            const StepHooks& hooks = {}) {
    IntegratorOptions opt;
    opt.dt = dt;
    opt.t_end = t_end;
    opt.stride = stride;
    return integrate(f, y0, opt, hooks);
}

// 1. RK4 on the I = 0 doubly affine geodetic flow against exp(Et)φ₀.
Outcome geodesic_oracle() {
    constexpr double kTol = 1e-8;
    gen::Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = rng.integer(2, 4);
        const MetricD g = rng.metric(n), eta = rng.metric(n);
        const Mat phi0 = rng.phi(n);
        Mat E = rng.mat(n);
        E *= rng.uniform(0.2, 2.0) / E.norm();
        const KineticModel model = DoublyAffine{rng.uniform(0.5, 2.0), rng.uniform(0.0, 0.5)};
        const BodyStateD b0{{Vec::Zero(n), phi0}, Vec::Zero(n), Mat(E * phi0)};
        const auto out = run_ode(as_ode(forced_hamiltonian_rhs(model, TorqueModel{}, g, eta), n),
                                 pack(legendre(model, b0, g, eta)), 1e-4, 1.0, 10000);
        const Mat exact = exponential_geodesic(E, phi0, 1.0, Side::Spatial);
        worst = std::max(worst, (unpack_phase(out.back().y, n).phi - exact).norm() / exact.norm());
    }
    return {worst < kTol, fmt("20 runs, max relative error %.2e (tol %.0e)", worst, kTol)};
}

// 2. Conserved quantities, 10⁴ RK4 steps at dt = 1e-3.
Outcome conservation_suite() {
    constexpr double kTol = 1e-8;
    constexpr double dt = 1e-3;
    constexpr double t_end = 10.0;
    const int stride = 100;
    gen::Rng rng(1002);
    double worst = 0.0;
    std::string worst_name;
    auto track = [&](const std::string& name, double drift) {
        if (worst_name.empty() || drift > worst) {
            worst = drift;
            worst_name = name;
        }
    };
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);

    // Σ for the spatially affine geodetic model (translational momentum zero), Σ̂ for the material one.
    for (int side = 0; side < 2; ++side) {
        double I, A, B;
        rng.iab(I, A, B, n);
        const KineticModel model = side == 0 ? KineticModel(SpatialAffine{1.0, I, A, B})
                                             : KineticModel(MaterialAffine{1.0, I, A, B});
        PhaseState s0 = rng.phase(n, 0.2);
        s0.p.setZero();
        const auto out = run_ode(as_ode(forced_hamiltonian_rhs(model, TorqueModel{}, g, eta), n), pack(s0), dt,
                                 t_end, stride);
        const Mat ref = side == 0 ? s0.Sigma() : s0.SigmaHat();
        double d = 0.0;
        for (const Sample& smp : out) {
            const PhaseState s = unpack_phase(smp.y, n);
            d = std::max(d, rel(side == 0 ? s.Sigma() : s.SigmaHat(), ref));
        }
        track(side == 0 ? "Sigma (spatial affine)" : "SigmaHat (material affine)", d);
    }

    // Spin under a symmetric hyperelastic torque.
    {
        const InertiaD in(1.0, rng.spd(n));
        BodyStateD s0 = rng.body(n, 0.2);
        s0.config.phi = rng.isometry(g, eta) * (Mat::Identity(n, n) + 0.05 * rng.symmetric(n));
        const auto traj = scenario::run(unconstrained_rhs(in, scenario::mild_elastic(n), g, eta), s0, dt, 10000, stride);
        const Mat S0 = kinematical_momenta(traj.front(), in).S;
        double d = 0.0;
        for (const auto& s : traj) d = std::max(d, rel(kinematical_momenta(s, in).S, S0));
        track("S (symmetric torque)", d);
    }

    // C(1), C(2), ‖S‖, ‖V‖ for the doubly affine Hamiltonian.
    {
        const KineticModel model = DoublyAffine{1.3, 0.2};
        PhaseState s0 = rng.phase(n, 0.2);
        s0.p.setZero();
        const auto out = run_ode(as_ode(forced_hamiltonian_rhs(model, TorqueModel{}, g, eta), n), pack(s0), dt,
                                 t_end, stride);
        auto invariants = [&](const PhaseState& s) {
            const CanonicalMomenta<double> c = canonical_momenta(s.phi, s.p, s.P, g, eta);
            return Eigen::Vector4d(c.SigmaHat.trace(), casimir(c.SigmaHat, 2), antisymmetric_norm_sq(c.spin),
                                   antisymmetric_norm_sq(c.vorticity));
        };
        const Eigen::Vector4d ref = invariants(s0);
        Eigen::Vector4d d = Eigen::Vector4d::Zero();
        for (const Sample& smp : out)
            d = d.cwiseMax(((invariants(unpack_phase(smp.y, n)) - ref).cwiseAbs().array() /
                            ref.cwiseAbs().array().max(1.0)).matrix());
        track("C(1)", d(0));
        track("C(2)", d(1));
        track("|S|", d(2));
        track("|V|", d(3));
    }

    // m and ν on the n = 2 lattice.
    {
        TwoPolarState r0;
        r0.factors.q = Eigen::Vector2d(0.6, -0.6);
        r0.factors.Q = r0.factors.q.array().exp().matrix();
        r0.factors.L = r0.factors.R = Mat::Identity(2, 2);
        r0.p = Eigen::Vector2d(0.1, -0.05);
        r0.rho_hat = Mat::Zero(2, 2);
        r0.tau_hat = Mat::Zero(2, 2);
        r0.rho_hat(0, 1) = 0.3;
        r0.rho_hat(1, 0) = -0.3;
        r0.tau_hat(0, 1) = -0.9;
        r0.tau_hat(1, 0) = 0.9;
        const LatticeModel model = HyperbolicCasimir{1.0};
        const auto out = run_ode(as_ode(model, 2, false), pack(r0, false), dt, t_end, stride, lattice_hooks(model, 2));
        double dm = 0.0, dn = 0.0;
        for (const Sample& smp : out) {
            const TwoPolarState r = unpack_two_polar(smp.y, 2, false);
            dm = std::max(dm, std::abs(m_ampl(r) - m_ampl(r0)) / std::max(1.0, std::abs(m_ampl(r0))));
            dn = std::max(dn, std::abs(nu_lat(r) - nu_lat(r0)) / std::max(1.0, std::abs(nu_lat(r0))));
        }
        track("m_ampl", dm);
        track("nu_lat", dn);
    }
    return {worst < kTol, "max relative drift " + fmt("%.2e", worst) + " (" + worst_name + ", tol " + fmt("%.0e", kTol) + ")"};
}

// 3. Full GL(2) flow against the reduced lattice flow.
Outcome reduction_equivalence() {
    constexpr double kTol = 1e-6;
    gen::Rng rng(1003);
    const Index n = 2;
    double worst = 0.0;
    int runs = 0;
    while (runs < 10) {
        const MetricD g = rng.metric(n), eta = rng.metric(n);
        PhaseState s0 = rng.phase(n, 0.3);
        s0.x.setZero();
        s0.p.setZero();
        const Vec q = two_polar(s0.phi, g, eta).q;
        if (q(0) - q(1) < 0.4) continue;
        const double A = rng.uniform(0.8, 1.5), B = rng.uniform(0.0, 0.3);
        const KineticModel full = DoublyAffine{A, B};
        const CasimirConstants cc = casimir_constants(0.0, A, B, n);
        const LatticeModel lattice = HyperbolicCasimir{1.0 / cc.inv_alpha, cc.inv_beta};
        const Vec yf = run_ode(as_ode(forced_hamiltonian_rhs(full, TorqueModel{}, g, eta), n), pack(s0), 1e-3, 1.0, 1000)
                           .back()
                           .y;
        const TwoPolarState r0 = reduce(s0, g, eta);
        const Vec yr = run_ode(as_ode(lattice, n, false), pack(r0, false), 1e-3, 1.0, 1000).back().y;
        const PhaseState sf = unpack_phase(yf, n);
        const TwoPolarState rf = reduce(sf, g, eta), rr = unpack_two_polar(yr, n, false);
        worst = std::max({worst, (rf.q() - rr.q()).norm(), (rf.p - rr.p).norm(),
                          std::abs(kinetic_hamiltonian(full, sf, g, eta) - lattice_hamiltonian(lattice, rr)),
                          std::abs(kinetic_hamiltonian(full, s0, g, eta) - lattice_hamiltonian(lattice, r0))});
        ++runs;
    }
    return {worst < kTol, fmt("10 runs, max |difference| in H, q, p at t=1: %.2e (tol %.0e)", worst, kTol)};
}

TwoPolarState n2_state(double x, double m, double nu) {
    // x = q₂ − q₁; m = −(r + s) and ν = r − s.
    TwoPolarState r;
    r.factors.q = Eigen::Vector2d(-x / 2, x / 2);
    r.factors.Q = r.factors.q.array().exp().matrix();
    r.factors.L = r.factors.R = Mat::Identity(2, 2);
    r.p = Vec::Zero(2);
    const double rr = 0.5 * (nu - m), ss = -0.5 * (m + nu);
    r.rho_hat = Mat::Zero(2, 2);
    r.tau_hat = Mat::Zero(2, 2);
    r.rho_hat(0, 1) = rr;
    r.rho_hat(1, 0) = -rr;
    r.tau_hat(0, 1) = ss;
    r.tau_hat(1, 0) = -ss;
    return r;
}

// 4. Bounded libration for |ν| > |m|, unbounded growth for |m| > |ν|.
Outcome threshold_behaviour() {
    const double A = 1.0;
    const TwoDimClosed model{A};
    // Effective potential in x: the reduced Hamiltonian at zero stretch momenta.
    auto potential = [&](double x, double m, double nu) { return lattice_hamiltonian(model, n2_state(x, m, nu)); };
    std::string detail;
    bool pass = true;

    // Bounded: start at rest, so the relative energy is U(x₀) < 0 and the turning point bounds x.
    {
        const double x0 = 1.0, m = 0.2, nu = 1.0;
        const TwoPolarState r0 = n2_state(x0, m, nu);
        const double E = potential(x0, m, nu);
        double lo = x0, hi = 60.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (potential(mid, m, nu) < E ? lo : hi) = mid;
        }
        const double bound = hi + 1e-6;
        const auto out = run_ode(as_ode(model, 2, false), pack(r0, false), 1e-3, 50.0, 10, lattice_hooks(model, 2));
        double xmax = 0.0, prev_rate = 0.0;
        int sign_changes = 0;
        for (const Sample& s : out) {
            const TwoPolarState r = unpack_two_polar(s.y, 2, false);
            const double x = r.q()(1) - r.q()(0);
            xmax = std::max(xmax, std::abs(x));
            const Vec qdot = lattice_rhs(model, r).qdot;
            const double rate = qdot(1) - qdot(0);
            if (prev_rate != 0.0 && rate * prev_rate < 0) ++sign_changes;
            if (rate != 0.0) prev_rate = rate;
        }
        const bool ok = E < 0 && xmax <= bound && sign_changes >= 2 &&
                        threshold_classify(r0, model) == Threshold::Bounded;
        pass = pass && ok;
        detail += fmt("bounded: max|x| %.3f <= %.3f, %g sign changes; ", xmax, bound, sign_changes);
    }
    // Unbounded: monotone escape past x₀ + 5.
    {
        const double x0 = 1.0, m = 1.0, nu = 0.2;
        const TwoPolarState r0 = n2_state(x0, m, nu);
        const auto out = run_ode(as_ode(model, 2, false), pack(r0, false), 1e-3, 50.0, 10, lattice_hooks(model, 2));
        double prev = x0, t_escape = -1.0;
        bool monotone = true;
        for (const Sample& s : out) {
            const TwoPolarState r = unpack_two_polar(s.y, 2, false);
            const double x = r.q()(1) - r.q()(0);
            monotone = monotone && x >= prev - 1e-12;
            prev = x;
            if (t_escape < 0 && x > x0 + 5) t_escape = s.t;
        }
        const bool ok = monotone && t_escape > 0 && threshold_classify(r0, model) == Threshold::Unbounded;
        pass = pass && ok;
        detail += fmt("unbounded: monotone %g, x > x0+5 at t = %.2f", monotone ? 1 : 0, t_escape);
    }
    return {pass, detail};
}

// 5. legendre_inverse ∘ legendre on every non-degenerate kinetic model.
Outcome legendre_round_trip() {
    constexpr double kTol = 1e-10;
    gen::Rng rng(1005);
    double worst = 0.0;
    int count = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = rng.integer(2, 4);
        const MetricD g = rng.metric(n), eta = rng.metric(n);
        double I, A, B;
        std::vector<KineticModel> models = {DAlembert{rng.uniform(0.5, 2), rng.spd(n)}};
        rng.iab(I, A, B, n);
        models.push_back(SpatialAffine{rng.uniform(0.5, 2), I, A, B});
        rng.iab(I, A, B, n);
        models.push_back(MaterialAffine{rng.uniform(0.5, 2), I, A, B});
        rng.iab(I, A, B, n);
        models.push_back(DoublyAffine{A, B});
        models.push_back(GeneralEightParam{1.0, 0.5, 0.3, 0.2, 1.0, 0.1, 0.5, 0.1});
        models.push_back(SpatialAffine{1.0, 2.0, 1.0, 0.0});
        for (const KineticModel& model : models) {
            BodyStateD s = rng.body(n);
            if (!has_translation(model)) s.v.setZero();
            const BodyStateD back = legendre_inverse(model, legendre(model, s, g, eta), g, eta);
            worst = std::max({worst, rel(back.phidot, s.phidot), (back.v - s.v).norm()});
            ++count;
        }
    }
    // (I, A, B) = (2, 1, 0): Ĩ = 3/2, Ã = −3 and the B̃ reciprocal vanishes.
    const InverseConstants c = inverse_constants(2.0, 1.0, 0.0, 3);
    const double const_err = std::max({std::abs(c.inv_I - 2.0 / 3.0), std::abs(c.inv_A + 1.0 / 3.0), std::abs(c.inv_B)});
    return {worst < kTol && const_err < 1e-15,
            fmt("%g round trips, max error %.2e (tol %.0e); ", count, worst, kTol) +
                fmt("(2,1,0) constants 1/I~=%.6f 1/A~=%.6f 1/B~=%g", c.inv_I, c.inv_A, c.inv_B)};
}

std::vector<Generator> every_generator(Index n) {
    std::vector<Generator> out;
    for (GeneratorKind k : {GeneratorKind::Sigma, GeneratorKind::SigmaHat, GeneratorKind::p, GeneratorKind::pHat,
                            GeneratorKind::Lambda, GeneratorKind::J})
        for (Index i = 0; i < n; ++i) {
            if (is_covector(k)) out.push_back({k, i, 0});
            else
                for (Index j = 0; j < n; ++j) out.push_back({k, i, j});
        }
    return out;
}

// Central-difference gradient; exact to rounding for the quadratic brackets of generators.
PhaseGradient fd_gradient(const std::function<double(const PhaseState&)>& f, const PhaseState& s) {
    const double h = 1e-4;
    PhaseGradient d = PhaseGradient::zero(s.dim());
    auto diff = [&](auto member, auto& target) {
        for (Index k = 0; k < target.size(); ++k) {
            PhaseState up = s, dn = s;
            (up.*member)(k) += h;
            (dn.*member)(k) -= h;
            target(k) = (f(up) - f(dn)) / (2 * h);
        }
    };
    diff(&PhaseState::x, d.dx);
    diff(&PhaseState::p, d.dp);
    for (Index k = 0; k < s.phi.size(); ++k) {
        PhaseState up = s, dn = s;
        up.phi(k) += h;
        dn.phi(k) -= h;
        d.dphi(k) = (f(up) - f(dn)) / (2 * h);
        up = s;
        dn = s;
        up.P(k) += h;
        dn.P(k) -= h;
        d.dP(k) = (f(up) - f(dn)) / (2 * h);
    }
    return d;
}

// 6. Closed-form generator brackets, antisymmetry and Jacobi.
Outcome poisson_algebra() {
    constexpr double kTable = 1e-9, kJacobi = 1e-8;
    gen::Rng rng(1006);
    double table = 0.0, anti = 0.0, jacobi = 0.0;
    for (int point = 0; point < 50; ++point) {
        const Index n = 2 + point % 2;
        const PhaseState s = rng.phase(n, 1.0);
        const auto gens = every_generator(n);
        for (const Generator& a : gens)
            for (const Generator& b : gens) {
                const double closed = poisson_bracket_generators(a, b, s);
                const double canon = canonical_bracket(generator_gradient(a, s), generator_gradient(b, s));
                table = std::max(table, std::abs(closed - canon) / std::max(1.0, std::abs(canon)));
                anti = std::max(anti, std::abs(closed + poisson_bracket_generators(b, a, s)));
            }
        for (int k = 0; k < 20; ++k) {
            const Generator a = gens[rng.integer(0, int(gens.size()) - 1)];
            const Generator b = gens[rng.integer(0, int(gens.size()) - 1)];
            const Generator c = gens[rng.integer(0, int(gens.size()) - 1)];
            auto nested = [&](const Generator& u, const Generator& v, const Generator& w) {
                const auto vw = [&](const PhaseState& t) { return poisson_bracket_generators(v, w, t); };
                return canonical_bracket(generator_gradient(u, s), fd_gradient(vw, s));
            };
            jacobi = std::max(jacobi, std::abs(nested(a, b, c) + nested(b, c, a) + nested(c, a, b)));
        }
    }
    return {table < kTable && anti < kTable && jacobi < kJacobi,
            fmt("table vs canonical %.2e, antisymmetry %.2e (tol 1e-9), Jacobi %.2e (tol 1e-8)", table, anti, jacobi)};
}

// 7. Constraint manifolds over 10⁴ RK4 steps with stabilization.
Outcome constraint_preservation() {
    gen::Rng rng(1007);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    const TorqueModel model = SumModel{{scenario::mild_elastic(n), Pressure{0.2}}};
    double gyro = 0.0, iso = 0.0;
    for (int run = 0; run < 2; ++run) {
        const EquationSystem gs = constrained_rhs(ConstraintKind::Gyroscopic, in, model, g, eta);
        for (const auto& s : scenario::run(gs, scenario::constrained_state(ConstraintKind::Gyroscopic, rng, g, eta, 0.4),
                                           1e-3, 10000, 10))
            gyro = std::max(gyro, (s.phi().transpose() * g.components() * s.phi() - eta.components()).norm());
        const EquationSystem is = constrained_rhs(ConstraintKind::Isochoric, in, model, g, eta);
        const double target = std::sqrt(eta.determinant() / g.determinant());
        for (const auto& s : scenario::run(is, scenario::constrained_state(ConstraintKind::Isochoric, rng, g, eta, 0.2),
                                           1e-3, 10000, 10))
            iso = std::max(iso, std::abs(s.phi().determinant() - target));
    }
    // Rotation-free spatial motion on a deformed trajectory.
    double rf_sym = 0.0, rf_mat = 1e300;
    {
        const TorqueModel elastic = scenario::mild_elastic(n);
        const EquationSystem rs = constrained_rhs(ConstraintKind::RotationFreeSpatial, in, elastic, g, eta);
        const auto traj = scenario::run(rs, scenario::constrained_state(ConstraintKind::RotationFreeSpatial, rng, g, eta, 0.2),
                                        1e-3, 10000, 10);
        for (const auto& s : traj) {
            const Mat Om = s.phidot * s.phi().inverse();
            const Mat Oh = s.phi().inverse() * s.phidot;
            rf_sym = std::max(rf_sym, (Om - metric_transpose(Om, g)).norm());
            if (s.phidot.norm() > 1e-6) rf_mat = std::min(rf_mat, (Oh - metric_transpose(Oh, eta)).norm());
        }
    }
    const bool pass = gyro < 1e-8 && iso < 1e-10 && rf_sym < 1e-8 && rf_mat > 1e-3;
    return {pass, fmt("gyroscopic |G - eta| %.2e (tol 1e-8), isochoric |det - target| %.2e (tol 1e-10), ", gyro, iso) +
                      fmt("rotation-free |Omega - Omega^T(g)| %.2e (tol 1e-8), min |OmegaHat - OmegaHat^T(eta)| %.2e (> 1e-3)",
                          rf_sym, rf_mat)};
}

// 8. Green rate convergence and potential torques against directional derivatives.
Outcome gradient_checks() {
    gen::Rng rng(1008);
    double min_order = 1e300;
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = rng.integer(2, 4);
        const MetricD g = rng.metric(n);
        const Mat phi0 = rng.phi(n), W = rng.mat(n);
        auto G_at = [&](double t) {
            const Mat phi = matrix_exponential(Mat(W * t)) * phi0;
            return Mat(phi.transpose() * g.components() * phi);
        };
        const double t0 = 0.3;
        const Mat phi = matrix_exponential(Mat(W * t0)) * phi0;
        const Mat rate = green_rate(BodyStateD{{Vec::Zero(n), phi}, Vec::Zero(n), Mat(W * phi)}, g);
        auto err = [&](double h) { return ((G_at(t0 + h) - G_at(t0 - h)) / (2 * h) - rate).norm(); };
        min_order = std::min(min_order, std::log2(err(1e-2) / err(5e-3)));
    }

    constexpr double kTol = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = rng.integer(2, 4);
        const MetricD I = MetricD::identity(n);
        // Σ w⊗w over symmetric w has the minor and major symmetries of a stiffness tensor.
        std::vector<double> C(size_t(n * n * n * n), 0.0);
        for (int r = 0; r < 3; ++r) {
            const Mat w = rng.symmetric(n);
            for (Index a = 0; a < n * n; ++a)
                for (Index b = 0; b < n * n; ++b) C[size_t(a * n * n + b)] += w(a / n, a % n) * w(b / n, b % n);
        }
        Vec k = rng.vec(n).cwiseAbs();
        const TorqueModel models[] = {quadratic_invariant_potential(k), HookeIsotropic{0.7, 0.4}, HookeAnisotropic{C},
                                      Pressure{0.5}};
        const Mat phi = Mat::Identity(n, n) + 0.1 * rng.mat(n);
        const Mat W = rng.mat(n);
        const double h = 1e-5;
        for (const TorqueModel& m : models) {
            auto V = [&](double e) {
                return potential_energy(m, BodyStateD{{Vec::Zero(n), Mat(matrix_exponential(Mat(W * e)) * phi)}, Vec::Zero(n),
                                                      Mat::Zero(n, n)},
                                        I, I);
            };
            const TorqueOutput out = torque(m, BodyStateD{{Vec::Zero(n), phi}, Vec::Zero(n), Mat::Zero(n, n)}, I, I);
            // δV along φ → exp(εW)φ is −tr(W N g).
            const double analytic = -(W * out.N * I.components()).trace();
            worst = std::max(worst, std::abs((V(h) - V(-h)) / (2 * h) - analytic));
        }
    }
    return {min_order >= 1.9 && worst < kTol,
            fmt("green_rate FD order %.3f (>= 1.9), potential torque vs directional derivative %.2e (tol %.0e)", min_order,
                worst, kTol)};
}

// 9. Purely dissipative models: E non-increasing and dE/dt = 𝒫.
Outcome dissipation() {
    constexpr double kTol = 1e-6;
    gen::Rng rng(1009);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    std::vector<double> V(size_t(n * n * n * n), 0.0);
    for (int r = 0; r < 3; ++r) {
        const Mat w = rng.symmetric(n);
        for (Index a = 0; a < n * n; ++a)
            for (Index b = 0; b < n * n; ++b) V[size_t(a * n * n + b)] += w(a / n, a % n) * w(b / n, b % n);
    }
    const TorqueModel models[] = {ViscousDiscrete{0.3, 0.1}, ExternalFriction{0.2, 0.3, 0.1}, ViscousContinuum{0.2, 0.1, 1.0},
                                  LinearFriction{V}, SumModel{{ViscousDiscrete{0.1, 0.0}, ExternalFriction{0.1, 0.1, 0.1}}}};
    bool monotone = true;
    double worst = 0.0;
    const double dt = 1e-4;
    for (const TorqueModel& model : models) {
        if (!is_purely_dissipative(model)) return {false, "model not classified as dissipative"};
        const EquationSystem sys = unconstrained_rhs(in, model, g, eta);
        BodyStateD s0 = rng.body(n, 0.5);
        s0.config.phi = rng.isometry(g, eta) * (Mat::Identity(n, n) + 0.1 * rng.mat(n));
        const auto traj = scenario::run(sys, s0, dt, 10000, 1);
        std::vector<double> E;
        for (const auto& s : traj) E.push_back(newton_energy(in, model, s, g, eta));
        for (size_t k = 1; k < E.size(); ++k) monotone = monotone && E[k] <= E[k - 1] + 1e-14 * std::abs(E[0]);
        for (size_t k = 1; k + 1 < E.size(); k += 100) {
            const double dE = (E[k + 1] - E[k - 1]) / (2 * dt);
            worst = std::max(worst, std::abs(dE - power(traj[k], torque(model, traj[k], g, eta), g)));
        }
    }
    return {monotone && worst < kTol, fmt("energy non-increasing %g, max |dE/dt - P| %.2e (tol %.0e)", monotone ? 1 : 0, worst, kTol)};
}

// 10. Newton, co-moving and Hamiltonian drivers on the d'Alembert potential model.
Outcome formalism_equivalence() {
    constexpr double kTol = 1e-8;
    gen::Rng rng(1010);
    double worst = 0.0;
    for (int run = 0; run < 5; ++run) {
        const Index n = 2 + run % 2;
        const MetricD g = rng.metric(n), eta = rng.metric(n);
        const InertiaD in(rng.uniform(0.5, 2.0), rng.spd(n));
        const TorqueModel model = SumModel{{scenario::mild_elastic(n), Pressure{0.1}, ConstantForce{rng.vec(n, 0.3)}}};
        BodyStateD s0 = rng.body(n, 0.3);
        s0.config.phi = rng.isometry(g, eta) * (Mat::Identity(n, n) + 0.1 * rng.mat(n));
        const KineticModel kin = dalembert_model(in);
        const auto a = run_ode(as_ode(unconstrained_rhs(in, model, g, eta), n), pack(s0), 1e-3, 2.0, 100);
        const auto b = run_ode(as_ode(comoving_rhs(in, model, g, eta), n), pack(to_comoving(s0)), 1e-3, 2.0, 100);
        const auto c = run_ode(as_ode(forced_hamiltonian_rhs(kin, model, g, eta), n), pack(legendre(kin, s0, g, eta)),
                               1e-3, 2.0, 100);
        for (size_t k = 0; k < a.size(); ++k) {
            const BodyStateD sa = unpack_body(a[k].y, n);
            const BodyStateD sb = from_comoving(unpack_comoving(b[k].y, n));
            const BodyStateD sc = legendre_inverse(kin, unpack_phase(c[k].y, n), g, eta);
            for (const BodyStateD* o : {&sb, &sc})
                worst = std::max({worst, rel(o->phi(), sa.phi()), rel(o->phidot, sa.phidot), (o->x() - sa.x()).norm(),
                                  (o->v - sa.v).norm()});
        }
    }
    return {worst < kTol, fmt("5 runs, max trajectory difference %.2e (tol %.0e)", worst, kTol)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"exponential-geodesic oracle", geodesic_oracle},
        {"conservation suite", conservation_suite},
        {"reduction equivalence", reduction_equivalence},
        {"threshold behaviour", threshold_behaviour},
        {"Legendre round trip", legendre_round_trip},
        {"Poisson algebra", poisson_algebra},
        {"constraint preservation", constraint_preservation},
        {"gradient and rate checks", gradient_checks},
        {"dissipation", dissipation},
        {"formalism equivalence", formalism_equivalence},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
