#include "affine/two_polar_reduction.hpp"

#include <cmath>

namespace affine {
namespace {

constexpr double kDegenerateGap = 1e-10;
constexpr double kCoincidenceGap = 1e-8;

// Partial derivatives of a lattice Hamiltonian; dM, dN hold the upper-triangle entries.
struct LatticeGradient {
    Vec dq, dp;
    Mat dM, dN;
};

// Pair term of a lattice Hamiltonian and its partials in (q_a, q_b, M_ab, N_ab).
struct PairTerm {
    double value = 0.0, dqa = 0.0, dqb = 0.0, dM = 0.0, dN = 0.0;
};

PairTerm hyperbolic_pair(double alpha, double delta, double M, double N) {
    if (std::abs(delta) < kCoincidenceGap)
        throw CoincidentInvariants("stretchings closer than 1e-8");
    const double s = std::sinh(0.5 * delta), c = std::cosh(0.5 * delta);
    const double k = 1.0 / (16.0 * alpha);
    PairTerm t;
    t.value = k * (M * M / (s * s) - N * N / (c * c));
    t.dM = 2.0 * k * M / (s * s);
    t.dN = -2.0 * k * N / (c * c);
    const double dDelta = k * (-M * M * c / (s * s * s) + N * N * s / (c * c * c));
    t.dqa = dDelta;
    t.dqb = -dDelta;
    return t;
}

PairTerm dalembert_pair(double I, double qa, double qb, double M, double N) {
    if (std::abs(qa - qb) < kCoincidenceGap)
        throw CoincidentInvariants("stretchings closer than 1e-8");
    const double Qa = std::exp(qa), Qb = std::exp(qb);
    const double dm = Qa - Qb, dp = Qa + Qb;
    const double k = 1.0 / (4.0 * I);
    PairTerm t;
    t.value = k * (M * M / (dm * dm) + N * N / (dp * dp));
    t.dM = 2.0 * k * M / (dm * dm);
    t.dN = 2.0 * k * N / (dp * dp);
    const double dminus = -2.0 * k * M * M / (dm * dm * dm);
    const double dplus = -2.0 * k * N * N / (dp * dp * dp);
    t.dqa = Qa * (dminus + dplus);
    t.dqb = Qb * (-dminus + dplus);
    return t;
}

PairTerm sutherland_pair(double A, double delta, double M, double N) {
    const double s = std::sin(0.5 * delta), c = std::cos(0.5 * delta);
    if ((std::abs(s) < kCoincidenceGap && M != 0.0) || (std::abs(c) < kCoincidenceGap && N != 0.0))
        throw CoincidentInvariants("angle variables at a singular separation");
    const double k = 1.0 / (16.0 * A);
    PairTerm t;
    const double ms = M == 0.0 ? 0.0 : M * M / (s * s);
    const double nc = N == 0.0 ? 0.0 : N * N / (c * c);
    t.value = k * (ms + nc);
    t.dM = M == 0.0 ? 0.0 : 2.0 * k * M / (s * s);
    t.dN = N == 0.0 ? 0.0 : 2.0 * k * N / (c * c);
    const double dDelta = k * ((M == 0.0 ? 0.0 : -M * M * c / (s * s * s)) +
                               (N == 0.0 ? 0.0 : N * N * s / (c * c * c)));
    t.dqa = dDelta;
    t.dqb = -dDelta;
    return t;
}

double require_nonzero(double v, const char* what) {
    if (v == 0.0) throw NonInvertibleLegendre(std::string(what) + " must be nonzero");
    return v;
}

// Value and gradient of every lattice model in (q, p, M, N).
std::pair<double, LatticeGradient> evaluate(const LatticeModel& model, const TwoPolarState& r) {
    const Index n = r.dim();
    const Vec& q = r.q();
    const Vec& p = r.p;
    const Mat M = r.M(), N = r.N_lat();
    LatticeGradient d{Vec::Zero(n), Vec::Zero(n), Mat::Zero(n, n), Mat::Zero(n, n)};
    double H = 0.0;

    auto add_pairs = [&](auto&& pair_fn) {
        for (Index a = 0; a < n; ++a)
            for (Index b = a + 1; b < n; ++b) {
                const PairTerm t = pair_fn(a, b, M(a, b), N(a, b));
                H += t.value;
                d.dq(a) += t.dqa;
                d.dq(b) += t.dqb;
                d.dM(a, b) = t.dM;
                d.dN(a, b) = t.dN;
            }
    };

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HyperbolicCasimir> || std::is_same_v<T, TwoDimClosed>) {
                double alpha, inv_beta = 0.0;
                if constexpr (std::is_same_v<T, TwoDimClosed>) {
                    if (n != 2) throw DimensionMismatch("two-dimensional lattice model needs n = 2");
                    alpha = require_nonzero(m.A, "A");
                } else {
                    alpha = require_nonzero(m.alpha, "alpha");
                    inv_beta = m.inv_beta;
                }
                const double trace = p.sum();
                H = 0.5 * p.squaredNorm() / alpha + 0.5 * inv_beta * trace * trace;
                d.dp = p / alpha + Vec::Constant(n, inv_beta * trace);
                add_pairs([&](Index a, Index b, double Mab, double Nab) {
                    return hyperbolic_pair(alpha, q(a) - q(b), Mab, Nab);
                });
            } else if constexpr (std::is_same_v<T, DAlembertIsotropic>) {
                const double I = require_nonzero(m.I, "I");
                for (Index a = 0; a < n; ++a) {
                    const double Q2 = std::exp(2.0 * q(a));
                    H += 0.5 * p(a) * p(a) / (I * Q2);
                    d.dp(a) = p(a) / (I * Q2);
                    d.dq(a) = -p(a) * p(a) / (I * Q2);
                }
                add_pairs([&](Index a, Index b, double Mab, double Nab) {
                    return dalembert_pair(I, q(a), q(b), Mab, Nab);
                });
            } else {
                const double A = require_nonzero(m.A, "A");
                H = 0.5 * p.squaredNorm() / A;
                d.dp = p / A;
                add_pairs([&](Index a, Index b, double Mab, double Nab) {
                    return sutherland_pair(A, q(a) - q(b), Mab, Nab);
                });
            }
        },
        model);
    return {H, d};
}

Mat antisymmetric_from_upper(const Mat& U) {
    Mat W = Mat::Zero(U.rows(), U.cols());
    for (Index a = 0; a < U.rows(); ++a)
        for (Index b = a + 1; b < U.cols(); ++b) {
            W(a, b) = U(a, b);
            W(b, a) = -U(a, b);
        }
    return W;
}

}  // namespace

const char* lattice_model_name(const LatticeModel& model) {
    switch (model.index()) {
        case 0: return "hyperbolic_casimir";
        case 1: return "dalembert_isotropic";
        case 2: return "sutherland_compact";
        default: return "two_dim_closed";
    }
}

TwoPolarState reduce(const PhaseState& s, const MetricD& g, const MetricD& eta) {
    const Index n = s.dim();
    TwoPolarState r;
    r.factors = two_polar(s.phi, g, eta);
    for (Index a = 0; a + 1 < n; ++a)
        if (r.factors.q(a) - r.factors.q(a + 1) < kDegenerateGap)
            throw DegenerateReduction("coincident stretchings; reduced coordinates are singular");
    const CanonicalMomenta<double> c = canonical_momenta(s.phi, s.p, s.P, g, eta);
    const Mat Linv = r.factors.L_inverse(g);
    const Mat Rinv = r.factors.R_inverse(eta);
    r.rho_hat = Linv * c.spin * r.factors.L;
    r.tau_hat = -Rinv * c.vorticity * r.factors.R;
    // Exact antisymmetry; the transforms only preserve it to rounding.
    r.rho_hat = 0.5 * (r.rho_hat - r.rho_hat.transpose()).eval();
    r.tau_hat = 0.5 * (r.tau_hat - r.tau_hat.transpose()).eval();
    r.p = (Rinv * c.SigmaHat * r.factors.R).diagonal();
    return r;
}

PhaseState reconstruct(const TwoPolarState& r, const MetricD& eta) {
    const Index n = r.dim();
    Mat X = Mat::Zero(n, n);
    const Vec& q = r.q();
    for (Index a = 0; a < n; ++a) {
        X(a, a) = r.p(a);
        for (Index b = 0; b < n; ++b) {
            if (a == b) continue;
            const double delta = q(a) - q(b);
            if (std::abs(delta) < kDegenerateGap)
                throw DegenerateReduction("coincident stretchings; reduced coordinates are singular");
            X(a, b) = (r.rho_hat(a, b) + std::exp(-delta) * r.tau_hat(a, b)) / (2.0 * std::sinh(delta));
        }
    }
    const Mat& R = r.factors.R;
    const Mat Rinv = r.factors.R_inverse(eta);
    PhaseState s;
    s.phi = r.factors.reconstruct(eta);
    const Mat SigmaHat = R * X * Rinv;
    s.P = SigmaHat * s.phi.inverse();
    s.x = Vec::Zero(n);
    s.p = Vec::Zero(n);
    return s;
}

double lattice_hamiltonian(const LatticeModel& model, const TwoPolarState& r) {
    if (const auto* m = std::get_if<TwoDimClosed>(&model)) {
        if (r.dim() != 2) throw DimensionMismatch("two-dimensional lattice model needs n = 2");
        const double A = require_nonzero(m->A, "A");
        const double x = r.q()(1) - r.q()(0);
        if (std::abs(x) < kCoincidenceGap) {
            if (m_ampl(r) != 0.0) throw CoincidentInvariants("stretchings closer than 1e-8");
        }
        const double p = r.p(0) + r.p(1);
        const double px = 0.5 * (r.p(1) - r.p(0));
        const double mm = m_ampl(r), nu = nu_lat(r);
        const double sh = std::sinh(0.5 * x), ch = std::cosh(0.5 * x);
        const double centrifugal = mm == 0.0 ? 0.0 : mm * mm / (16.0 * A * sh * sh);
        return p * p / (4.0 * A) + px * px / A + centrifugal - nu * nu / (16.0 * A * ch * ch);
    }
    return evaluate(model, r).first;
}

ReducedVelocity lattice_rhs(const LatticeModel& model, const TwoPolarState& r, bool with_legs) {
    const LatticeGradient d = evaluate(model, r).second;
    // M = −ρ̂ − τ̂ and N = ρ̂ − τ̂.
    const Mat dH_drho = -d.dM + d.dN;
    const Mat dH_dtau = -d.dM - d.dN;
    const Mat chi = antisymmetric_from_upper(-dH_drho);
    const Mat theta = antisymmetric_from_upper(-dH_dtau);
    ReducedVelocity v;
    v.qdot = d.dp;
    v.pdot = -d.dq;
    v.rho_dot = commutator(r.rho_hat, chi);
    v.tau_dot = commutator(r.tau_hat, theta);
    if (with_legs) {
        v.Ldot = r.factors.L * chi;
        v.Rdot = r.factors.R * theta;
    }
    return v;
}

Vec pack(const TwoPolarState& r, bool with_legs) {
    const Index n = r.dim();
    const Index m = n * (n - 1) / 2;
    Vec y(2 * n + 2 * m + (with_legs ? 2 * n * n : 0));
    y.head(n) = r.q();
    y.segment(n, n) = r.p;
    Index k = 2 * n;
    for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b) {
            y(k) = r.rho_hat(a, b);
            y(k + m) = r.tau_hat(a, b);
            ++k;
        }
    if (with_legs) {
        const Index base = 2 * n + 2 * m;
        y.segment(base, n * n) = Eigen::Map<const Vec>(r.factors.L.data(), n * n);
        y.segment(base + n * n, n * n) = Eigen::Map<const Vec>(r.factors.R.data(), n * n);
    }
    return y;
}

TwoPolarState unpack_two_polar(const Vec& y, Index n, bool with_legs) {
    const Index m = n * (n - 1) / 2;
    TwoPolarState r;
    r.factors.q = y.head(n);
    r.factors.Q = r.factors.q.array().exp().matrix();
    r.p = y.segment(n, n);
    Mat rho = Mat::Zero(n, n), tau = Mat::Zero(n, n);
    Index k = 2 * n;
    for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b) {
            rho(a, b) = y(k);
            tau(a, b) = y(k + m);
            ++k;
        }
    r.rho_hat = antisymmetric_from_upper(rho);
    r.tau_hat = antisymmetric_from_upper(tau);
    if (with_legs) {
        const Index base = 2 * n + 2 * m;
        r.factors.L = Eigen::Map<const Mat>(y.data() + base, n, n);
        r.factors.R = Eigen::Map<const Mat>(y.data() + base + n * n, n, n);
    } else {
        r.factors.L = Mat::Identity(n, n);
        r.factors.R = Mat::Identity(n, n);
    }
    return r;
}

OdeRhs as_ode(const LatticeModel& model, Index n, bool with_legs) {
    return [model, n, with_legs](double, const Vec& y) {
        const TwoPolarState r = unpack_two_polar(y, n, with_legs);
        const ReducedVelocity v = lattice_rhs(model, r, with_legs);
        TwoPolarState d;
        d.factors.q = v.qdot;
        d.p = v.pdot;
        d.rho_hat = v.rho_dot;
        d.tau_hat = v.tau_dot;
        if (with_legs) {
            d.factors.L = v.Ldot;
            d.factors.R = v.Rdot;
        }
        return pack(d, with_legs);
    };
}

StepHooks lattice_hooks(const LatticeModel& model, Index n) {
    StepHooks hooks;
    hooks.check = [model, n](const Vec& y) {
        // Evaluating the Hamiltonian applies the model's own singularity guard.
        lattice_hamiltonian(model, unpack_two_polar(y, n, false));
    };
    return hooks;
}

Mat exponential_geodesic(const Mat& E, const Mat& phi0, double t, Side side) {
    const Mat Et = E * t;
    return side == Side::Spatial ? Mat(matrix_exponential(Et) * phi0)
                                 : Mat(phi0 * matrix_exponential(Et));
}

bool is_stationary_generator(const Mat& E, const MetricD& metric, Side) {
    return commutator(E, metric_transpose(E, metric)).norm() < 1e-10;
}

double m_ampl(const TwoPolarState& r) {
    if (r.dim() != 2) throw DimensionMismatch("amplitudes are defined for n = 2");
    return r.M()(0, 1);
}

double nu_lat(const TwoPolarState& r) {
    if (r.dim() != 2) throw DimensionMismatch("amplitudes are defined for n = 2");
    return r.N_lat()(0, 1);
}

const char* threshold_name(Threshold t) {
    switch (t) {
        case Threshold::Bounded: return "bounded";
        case Threshold::Unbounded: return "unbounded";
        case Threshold::Critical: return "critical";
    }
    return "unknown";
}

Threshold threshold_classify(const TwoPolarState& r, const TwoDimClosed&) {
    const double m = std::abs(m_ampl(r)), nu = std::abs(nu_lat(r));
    if (std::abs(nu - m) <= 1e-12) return Threshold::Critical;
    return nu > m ? Threshold::Bounded : Threshold::Unbounded;
}

}  // namespace affine
