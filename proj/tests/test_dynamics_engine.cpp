#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "affine/dynamics_engine.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace affine;

namespace {
const ConstraintKind kAllKinds[] = {ConstraintKind::Gyroscopic,      ConstraintKind::ShapePreserving,
                                    ConstraintKind::Isochoric,       ConstraintKind::Dilatational,
                                    ConstraintKind::RotationFreeSpatial, ConstraintKind::RotationFreeMaterial};

double max_drift(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x - v.front()));
    return m;
}
}  // namespace

TEST_CASE("constraint names and degrees of freedom") {
    for (ConstraintKind k : kAllKinds) CHECK(parse_constraint(constraint_name(k)) == k);
    CHECK(!parse_constraint("rigidish"));
    const Index n = 3;
    CHECK(internal_dof(ConstraintKind::Gyroscopic, n) == 3);
    CHECK(internal_dof(ConstraintKind::ShapePreserving, n) == 4);
    CHECK(internal_dof(ConstraintKind::Isochoric, n) == 8);
    CHECK(internal_dof(ConstraintKind::Dilatational, n) == 1);
    CHECK(internal_dof(ConstraintKind::RotationFreeSpatial, n) == 9);
}

TEST_CASE("free motion is straight in configuration space") {
    gen::Rng rng(70);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.5, rng.spd(n));
    const BodyStateD s0 = rng.body(n);
    const BodyAcceleration a = unconstrained_rhs(in, TorqueModel{}, g, eta).rhs(0, s0);
    CHECK(a.vdot.norm() == 0.0);
    CHECK(a.phiddot.norm() == 0.0);
}

TEST_CASE("constant force conserves the time-dependent momenta") {
    gen::Rng rng(71);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(2.0, rng.spd(n));
    const Vec F = rng.vec(n);
    const EquationSystem sys = unconstrained_rhs(in, ConstantForce{F}, g, eta);
    const BodyStateD s0 = rng.body(n);
    const auto traj = scenario::run(sys, s0, 1e-2, 200, 10);
    const double m = in.mass();
    for (size_t k = 0; k < traj.size(); ++k) {
        const double t = 0.1 * double(k);
        // ϰ = k − Ft and ξ = x − kt/m + Ft²/2m.
        const Vec kv = m * traj[k].v;
        CHECK((kv - F * t - m * s0.v).norm() < 1e-8);
        CHECK((traj[k].x() - kv * t / m + F * t * t / (2 * m) - s0.x()).norm() < 1e-8);
    }
}

TEST_CASE("one-dimensional elastic oscillator matches its scalar ODE") {
    const MetricD one = MetricD::identity(1);
    const InertiaD in(1.0, Mat::Identity(1, 1));
    const TorqueModel V = ConfigPotential{[](const Mat& p) { return 0.5 * (p(0, 0) - 1) * (p(0, 0) - 1); },
                                          [](const Mat& p) { return Mat(p.array() - 1.0); }};
    BodyStateD s0;
    s0.config = {Vec::Zero(1), Mat::Constant(1, 1, 1.1)};
    s0.v = Vec::Zero(1);
    s0.phidot = Mat::Zero(1, 1);
    const auto traj = scenario::run(unconstrained_rhs(in, V, one, one), s0, 1e-3, 3000, 1000);
    // φ̈ = −(φ − 1) exactly: φ(t) = 1 + 0.1 cos t.
    for (size_t k = 0; k < traj.size(); ++k)
        CHECK(traj[k].phi()(0, 0) == doctest::Approx(1 + 0.1 * std::cos(double(k))).epsilon(1e-10));
}

TEST_CASE("co-moving equations") {
    SUBCASE("by hand") {
        const MetricD I2 = MetricD::identity(2);
        const InertiaD in(1.0, Mat::Identity(2, 2));
        ComovingState c{Vec::Zero(2), Vec::Zero(2), Mat::Identity(2, 2), Mat(Eigen::Vector2d(0.3, -0.7).asDiagonal())};
        const ComovingState d = comoving_rhs(in, TorqueModel{}, I2, I2).rhs(0, c);
        CHECK((d.OmegaHat + Mat(Eigen::Vector2d(0.09, 0.49).asDiagonal())).norm() < 1e-15);
        c.OmegaHat.setZero();
        CHECK(comoving_rhs(in, TorqueModel{}, I2, I2).rhs(0, c).OmegaHat.norm() == 0.0);
    }
    SUBCASE("same trajectories as the spatial form") {
        gen::Rng rng(72);
        const Index n = 3;
        const MetricD g = rng.metric(n), eta = rng.metric(n);
        const InertiaD in(1.3, rng.spd(n));
        for (const TorqueModel& model : {TorqueModel{}, TorqueModel(SumModel{{scenario::mild_elastic(n), ConstantForce{rng.vec(n)}}})}) {
            // Slow enough that the free line φ₀ + φ̇₀t stays invertible.
            BodyStateD s0 = rng.body(n);
            s0.config.phi = Mat::Identity(n, n) + 0.1 * rng.mat(n);
            s0.phidot *= 0.3;
            IntegratorOptions opt;
            opt.dt = 1e-3;
            opt.t_end = 1.0;
            const BodyStateD a = unpack_body(
                integrate(as_ode(unconstrained_rhs(in, model, g, eta), n), pack(s0), opt).back().y, n);
            const BodyStateD b = from_comoving(unpack_comoving(
                integrate(as_ode(comoving_rhs(in, model, g, eta), n), pack(to_comoving(s0)), opt).back().y, n));
            CHECK((a.phi() - b.phi()).norm() < 1e-8);
            CHECK((a.phidot - b.phidot).norm() < 1e-8);
            CHECK((a.x() - b.x()).norm() < 1e-8);
        }
    }
}

TEST_CASE("energy and spin are conserved for hyperelastic models") {
    gen::Rng rng(73);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    const EquationSystem sys = unconstrained_rhs(in, scenario::mild_elastic(n), g, eta);
    BodyStateD s0 = rng.body(n, 0.3);
    s0.config.phi = rng.isometry(g, eta) * (Mat::Identity(n, n) + 0.1 * rng.symmetric(n));
    const auto traj = scenario::run(sys, s0, 1e-3, 4000, 100);
    std::vector<double> E, S;
    for (const auto& s : traj) {
        E.push_back(newton_energy(in, scenario::mild_elastic(n), s, g, eta));
        for (const NamedMonitor& m : sys.conserved_monitors)
            if (m.name == "spin_norm") S.push_back(m.f(0, s));
    }
    CHECK(max_drift(E) < 1e-6 * std::abs(E.front()));
    CHECK(max_drift(S) < 1e-8 * std::max(1.0, S.front()));
    const Mat S0 = kinematical_momenta(traj.front(), in).S, S1 = kinematical_momenta(traj.back(), in).S;
    CHECK((S1 - S0).norm() < 1e-8);
}

TEST_CASE("initial states must satisfy the constraint") {
    gen::Rng rng(74);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    for (ConstraintKind k : kAllKinds) {
        const BodyStateD on = scenario::constrained_state(k, rng, g, eta);
        CHECK_NOTHROW(require_constraint(k, on, g, eta));
        BodyStateD off = on;
        off.phidot += 0.1 * rng.mat(n);
        off.config.phi += 0.1 * rng.mat(n);
        if (k != ConstraintKind::RotationFreeSpatial && k != ConstraintKind::RotationFreeMaterial)
            CHECK_THROWS_AS(require_constraint(k, BodyStateD{{on.x(), off.phi()}, on.v, on.phidot}, g, eta),
                            ConstraintViolation);
        CHECK_THROWS_AS(require_constraint(k, BodyStateD{on.config, on.v, off.phidot}, g, eta), ConstraintViolation);
    }
}

TEST_CASE("projected accelerations stay tangent to every constraint") {
    gen::Rng rng(75);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    const TorqueModel model = SumModel{{scenario::mild_elastic(n), Pressure{0.2}, ViscousDiscrete{0.1, 0.05}}};
    for (ConstraintKind k : kAllKinds) {
        INFO(std::string(constraint_name(k)));
        const BodyStateD s = scenario::constrained_state(k, rng, g, eta);
        const EquationSystem sys = constrained_rhs(k, in, model, g, eta);
        const BodyAcceleration a = sys.rhs(0, s);
        // Differentiate the velocity residual along a short step of the exact flow.
        const double h = 1e-6;
        BodyStateD fwd = s, bwd = s;
        fwd.config.phi += h * s.phidot + 0.5 * h * h * a.phiddot;
        fwd.phidot += h * a.phiddot;
        bwd.config.phi -= h * s.phidot - 0.5 * h * h * a.phiddot;
        bwd.phidot -= h * a.phiddot;
        const Vec rf = constraint_residual(k, fwd, g, eta), rb = constraint_residual(k, bwd, g, eta);
        CHECK(rf.tail(1)(0) < 1e-9);
        CHECK(rb.tail(1)(0) < 1e-9);
        if (rf.size() == 2) CHECK(std::abs(rf(0)) < 1e-9);
    }
}

TEST_CASE("constrained runs keep their constraints and conserve energy") {
    gen::Rng rng(76);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    const TorqueModel model = SumModel{{scenario::mild_elastic(n), Pressure{0.2}}};
    for (ConstraintKind k : kAllKinds) {
        INFO(std::string(constraint_name(k)));
        const EquationSystem sys = constrained_rhs(k, in, model, g, eta);
        const BodyStateD s0 = scenario::constrained_state(k, rng, g, eta, 0.3);
        // Short enough that no run approaches a collapse of det φ.
        const auto traj = scenario::run(sys, s0, 1e-3, 1000, 100);
        std::vector<double> E;
        for (const auto& s : traj) {
            CHECK(s.phi().determinant() > 0.3);
            const Vec r = sys.constraint_residual(s);
            for (Index i = 0; i < r.size(); ++i) CHECK(std::abs(r(i)) < 1e-10);
            E.push_back(newton_energy(in, model, s, g, eta));
        }
        CHECK(max_drift(E) < 1e-6 * std::max(1.0, std::abs(E.front())));
    }
}

TEST_CASE("gyroscopic motion with a symmetric torque conserves spin") {
    gen::Rng rng(77);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    const TorqueModel model = SumModel{{scenario::mild_elastic(n), Pressure{0.4}}};
    const EquationSystem sys = constrained_rhs(ConstraintKind::Gyroscopic, in, model, g, eta);
    const auto traj = scenario::run(sys, scenario::constrained_state(ConstraintKind::Gyroscopic, rng, g, eta), 1e-3, 2000, 500);
    const Mat S0 = kinematical_momenta(traj.front(), in).S;
    for (const auto& s : traj) CHECK((kinematical_momenta(s, in).S - S0).norm() < 1e-8);
}

TEST_CASE("isochoric flow keeps the determinant fixed") {
    gen::Rng rng(78);
    const Index n = 3;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in(1.0, rng.spd(n));
    const EquationSystem sys = constrained_rhs(ConstraintKind::Isochoric, in, Pressure{1.0}, g, eta);
    const auto traj = scenario::run(sys, scenario::constrained_state(ConstraintKind::Isochoric, rng, g, eta), 1e-3, 1000, 100);
    const double target = std::sqrt(eta.determinant() / g.determinant());
    for (const auto& s : traj) CHECK(std::abs(s.phi().determinant() - target) < 1e-10);
}

TEST_CASE("free dilatational motion is linear in the scale") {
    gen::Rng rng(79);
    const Index n = 2;
    const MetricD g = rng.metric(n), eta = rng.metric(n);
    const InertiaD in = InertiaD::isotropic(1.0, 1.3, eta);
    const EquationSystem sys = constrained_rhs(ConstraintKind::Dilatational, in, TorqueModel{}, g, eta);
    const BodyStateD s0 = scenario::constrained_state(ConstraintKind::Dilatational, rng, g, eta);
    const auto traj = scenario::run(sys, s0, 1e-3, 1000, 100);
    auto scale = [&](const BodyStateD& s) {
        const Mat G = s.phi().transpose() * g.components() * s.phi();
        return std::sqrt((eta.inverse() * G).trace() / double(n));
    };
    const double l0 = scale(s0);
    const double ldot = l0 * (s0.phidot * s0.phi().inverse()).trace() / double(n);
    for (size_t k = 0; k < traj.size(); ++k)
        CHECK(scale(traj[k]) == doctest::Approx(l0 + ldot * 0.1 * double(k)).epsilon(1e-10));
}

TEST_CASE("rotation-free spatial motion is G-symmetric but not eta-symmetric in co-moving form") {
    gen::Rng rng(80);
    const Index n = 3;
    const MetricD g = MetricD::identity(n), eta = MetricD::identity(n);
    const InertiaD in(1.0, rng.spd(n));
    const EquationSystem sys =
        constrained_rhs(ConstraintKind::RotationFreeSpatial, in, scenario::mild_elastic(n), g, eta);
    BodyStateD s0 = scenario::constrained_state(ConstraintKind::RotationFreeSpatial, rng, g, eta);
    const auto traj = scenario::run(sys, s0, 1e-3, 1000, 100);
    for (const auto& s : traj) {
        const Mat Om = s.phidot * s.phi().inverse();
        const Mat Oh = s.phi().inverse() * s.phidot;
        const Mat G = s.phi().transpose() * g.components() * s.phi();
        CHECK((Om - metric_transpose(Om, g)).norm() < 1e-8);
        CHECK((Oh - G.inverse() * Oh.transpose() * G).norm() < 1e-8);
        CHECK((Oh - metric_transpose(Oh, eta)).norm() > 1e-3);
    }
}

TEST_CASE("constraint-free system reports no residual") {
    gen::Rng rng(81);
    const MetricD g = rng.metric(2), eta = rng.metric(2);
    const InertiaD in(1.0, rng.spd(2));
    const EquationSystem sys = constrained_rhs(ConstraintKind::Unconstrained, in, TorqueModel{}, g, eta);
    CHECK(sys.constraint_residual(rng.body(2)).size() == 0);
    CHECK_THROWS_AS(unconstrained_rhs(in, TorqueModel{}, g, eta).rhs(0, BodyStateD{{Vec::Zero(2), Mat::Zero(2, 2)}, Vec::Zero(2), Mat::Zero(2, 2)}),
                    SingularConfiguration);
}
