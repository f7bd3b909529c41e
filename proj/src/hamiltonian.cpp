#include "affine/hamiltonian.hpp"

#include <utility>

namespace affine {
namespace {

double delta(Index a, Index b) { return a == b ? 1.0 : 0.0; }

// Bracket of two gl(n)-type generators X, Y with {X^i_j, Y^k_l} = δ^i_l Z^k_j − δ^k_j Z^i_l.
double gl_pattern(const Generator& a, const Generator& b, const Mat& Z) {
    return delta(a.i, b.j) * Z(b.i, a.j) - delta(b.i, a.j) * Z(a.i, b.j);
}

std::vector<GeneratorTerm> gl_terms(const Generator& a, const Generator& b, GeneratorKind z) {
    std::vector<GeneratorTerm> out;
    if (a.i == b.j) out.push_back({1.0, {z, b.i, a.j}});
    if (b.i == a.j) out.push_back({-1.0, {z, a.i, b.j}});
    return out;
}

int order(GeneratorKind k) { return static_cast<int>(k); }

void check_index(const Generator& a, Index n) {
    const bool bad = a.i < 0 || a.i >= n || (!is_covector(a.kind) && (a.j < 0 || a.j >= n));
    if (bad) throw DimensionMismatch(std::string("generator index out of range for ") +
                                     generator_name(a.kind));
}

}  // namespace

PhaseGradient PhaseGradient::zero(Index n) {
    return {Vec::Zero(n), Mat::Zero(n, n), Vec::Zero(n), Mat::Zero(n, n)};
}

PhaseGradient& PhaseGradient::operator+=(const PhaseGradient& o) {
    dx += o.dx;
    dphi += o.dphi;
    dp += o.dp;
    dP += o.dP;
    return *this;
}

PhaseGradient& PhaseGradient::operator*=(double c) {
    dx *= c;
    dphi *= c;
    dp *= c;
    dP *= c;
    return *this;
}

double canonical_bracket(const PhaseGradient& dF, const PhaseGradient& dG) {
    return dF.dx.dot(dG.dp) - dF.dp.dot(dG.dx) +
           (dF.dphi.array() * dG.dP.transpose().array()).sum() -
           (dF.dP.transpose().array() * dG.dphi.array()).sum();
}

double canonical_bracket(const PhaseFunction& F, const PhaseFunction& G, const PhaseState& s) {
    return canonical_bracket(F.gradient(s), G.gradient(s));
}

GeneratorKind parse_generator(const std::string& name) {
    static const std::vector<std::pair<std::string, GeneratorKind>> names = {
        {"Sigma", GeneratorKind::Sigma},     {"Σ", GeneratorKind::Sigma},
        {"SigmaHat", GeneratorKind::SigmaHat}, {"Σ̂", GeneratorKind::SigmaHat},
        {"p", GeneratorKind::p},             {"pHat", GeneratorKind::pHat},
        {"p̂", GeneratorKind::pHat},          {"Lambda", GeneratorKind::Lambda},
        {"Λ", GeneratorKind::Lambda},        {"J", GeneratorKind::J},
    };
    for (const auto& [key, kind] : names)
        if (key == name) return kind;
    throw UnknownGenerator("'" + name + "'");
}

const char* generator_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Sigma: return "Sigma";
        case GeneratorKind::SigmaHat: return "SigmaHat";
        case GeneratorKind::p: return "p";
        case GeneratorKind::pHat: return "pHat";
        case GeneratorKind::Lambda: return "Lambda";
        case GeneratorKind::J: return "J";
    }
    return "unknown";
}

bool is_covector(GeneratorKind kind) {
    return kind == GeneratorKind::p || kind == GeneratorKind::pHat;
}

double generator_value(const Generator& a, const PhaseState& s) {
    switch (a.kind) {
        case GeneratorKind::Sigma: return s.phi.row(a.i).dot(s.P.col(a.j));
        case GeneratorKind::SigmaHat: return s.P.row(a.i).dot(s.phi.col(a.j));
        case GeneratorKind::p: return s.p(a.i);
        case GeneratorKind::pHat: return s.p.dot(s.phi.col(a.i));
        case GeneratorKind::Lambda: return s.x(a.i) * s.p(a.j);
        case GeneratorKind::J:
            return s.x(a.i) * s.p(a.j) + s.phi.row(a.i).dot(s.P.col(a.j));
    }
    return 0.0;
}

PhaseGradient generator_gradient(const Generator& a, const PhaseState& s) {
    const Index n = s.dim();
    PhaseGradient d = PhaseGradient::zero(n);
    switch (a.kind) {
        case GeneratorKind::Sigma:
            d.dphi.row(a.i) = s.P.col(a.j).transpose();
            d.dP.col(a.j) = s.phi.row(a.i).transpose();
            break;
        case GeneratorKind::SigmaHat:
            d.dphi.col(a.j) = s.P.row(a.i).transpose();
            d.dP.row(a.i) = s.phi.col(a.j).transpose();
            break;
        case GeneratorKind::p:
            d.dp(a.i) = 1.0;
            break;
        case GeneratorKind::pHat:
            d.dp = s.phi.col(a.i);
            d.dphi.col(a.i) = s.p;
            break;
        case GeneratorKind::Lambda:
            d.dx(a.i) = s.p(a.j);
            d.dp(a.j) = s.x(a.i);
            break;
        case GeneratorKind::J:
            d = generator_gradient({GeneratorKind::Lambda, a.i, a.j}, s);
            d += generator_gradient({GeneratorKind::Sigma, a.i, a.j}, s);
            break;
    }
    return d;
}

PhaseFunction generator_function(const Generator& a) {
    return {[a](const PhaseState& s) { return generator_value(a, s); },
            [a](const PhaseState& s) { return generator_gradient(a, s); }};
}

double poisson_bracket_generators(const Generator& a, const Generator& b, const PhaseState& s) {
    const Index n = s.dim();
    check_index(a, n);
    check_index(b, n);
    if (order(a.kind) > order(b.kind)) return -poisson_bracket_generators(b, a, s);
    using K = GeneratorKind;
    const Mat Lambda = s.x * s.p.transpose();
    switch (a.kind) {
        case K::Sigma:
            switch (b.kind) {
                case K::Sigma:
                case K::J: return gl_pattern(a, b, s.Sigma());
                case K::pHat: return -s.p(a.j) * s.phi(a.i, b.i);
                default: return 0.0;
            }
        case K::SigmaHat:
            switch (b.kind) {
                case K::SigmaHat: return gl_pattern(b, a, s.SigmaHat());
                case K::pHat: return -delta(a.i, b.i) * s.p.dot(s.phi.col(a.j));
                default: return 0.0;
            }
        case K::p:
            switch (b.kind) {
                case K::Lambda:
                case K::J: return -delta(a.i, b.i) * s.p(b.j);
                default: return 0.0;
            }
        case K::pHat:
            switch (b.kind) {
                case K::Lambda: return -s.p(b.j) * s.phi(b.i, a.i);
                default: return 0.0;
            }
        case K::Lambda:
            return gl_pattern(a, b, Lambda);
        case K::J:
            return gl_pattern(a, b, Lambda + s.Sigma());
    }
    return 0.0;
}

double poisson_bracket_generators(const std::string& name1, const std::vector<Index>& idx1,
                                  const std::string& name2, const std::vector<Index>& idx2,
                                  const PhaseState& s) {
    auto make = [](const std::string& name, const std::vector<Index>& idx) {
        const GeneratorKind k = parse_generator(name);
        const size_t expected = is_covector(k) ? 1 : 2;
        if (idx.size() != expected)
            throw DimensionMismatch(name + " takes " + std::to_string(expected) + " indices");
        return Generator{k, idx[0], expected == 2 ? idx[1] : 0};
    };
    return poisson_bracket_generators(make(name1, idx1), make(name2, idx2), s);
}

std::optional<std::vector<GeneratorTerm>> bracket_expansion(const Generator& a,
                                                            const Generator& b, Index n) {
    check_index(a, n);
    check_index(b, n);
    if (order(a.kind) > order(b.kind)) {
        auto r = bracket_expansion(b, a, n);
        if (r)
            for (GeneratorTerm& t : *r) t.coeff = -t.coeff;
        return r;
    }
    using K = GeneratorKind;
    using Terms = std::vector<GeneratorTerm>;
    switch (a.kind) {
        case K::Sigma:
            switch (b.kind) {
                case K::Sigma:
                case K::J: return gl_terms(a, b, K::Sigma);
                case K::pHat: return std::nullopt;
                default: return Terms{};
            }
        case K::SigmaHat:
            switch (b.kind) {
                case K::SigmaHat: return gl_terms(b, a, K::SigmaHat);
                case K::pHat:
                    if (a.i == b.i) return Terms{{-1.0, {K::pHat, a.j, 0}}};
                    return Terms{};
                default: return Terms{};
            }
        case K::p:
            switch (b.kind) {
                case K::Lambda:
                case K::J:
                    if (a.i == b.i) return Terms{{-1.0, {K::p, b.j, 0}}};
                    return Terms{};
                default: return Terms{};
            }
        case K::pHat:
            if (b.kind == K::Lambda) return std::nullopt;
            return Terms{};
        case K::Lambda:
            return gl_terms(a, b, K::Lambda);
        case K::J:
            return gl_terms(a, b, K::J);
    }
    return Terms{};
}

PhaseFunction kinetic_hamiltonian_function(const KineticModel& model, const MetricD& g,
                                           const MetricD& eta) {
    check_nondegenerate(model, g.dim());
    PhaseFunction H;
    H.value = [=](const PhaseState& s) { return kinetic_hamiltonian(model, s, g, eta); };
    H.gradient = [=](const PhaseState& s) {
        const BodyStateD b = legendre_inverse(model, s, g, eta);
        PhaseGradient d = PhaseGradient::zero(s.dim());
        d.dp = b.v;
        d.dP = b.phidot.transpose();
        // ∂H/∂φ at fixed momenta is −∂T/∂φ at fixed velocities.
        d.dphi = -kinetic_config_gradient(model, b, g, eta).transpose();
        return d;
    };
    return H;
}

PhaseVelocity hamiltonian_rhs(const PhaseFunction& H, const PhaseState& s) {
    const PhaseGradient d = H.gradient(s);
    return {d.dp, d.dP.transpose(), -d.dx, -d.dphi.transpose()};
}

std::function<PhaseVelocity(const PhaseState&)> forced_hamiltonian_rhs(const KineticModel& model,
                                                                       const TorqueModel& torques,
                                                                       const MetricD& g,
                                                                       const MetricD& eta) {
    const PhaseFunction T = kinetic_hamiltonian_function(model, g, eta);
    return [=](const PhaseState& s) {
        const PhaseGradient d = T.gradient(s);
        BodyStateD b;
        b.config = {s.x, s.phi};
        b.v = d.dp;
        b.phidot = d.dP.transpose();
        const TorqueOutput out = torque(torques, b, g, eta);
        PhaseVelocity r{d.dp, b.phidot, -d.dx, -d.dphi.transpose()};
        r.pdot += g.components() * out.F;
        r.Pdot += s.phi.partialPivLu().solve(out.N * g.components());
        return r;
    };
}

double total_hamiltonian(const KineticModel& model, const TorqueModel& torques,
                         const PhaseState& s, const MetricD& g, const MetricD& eta) {
    const BodyStateD b = legendre_inverse(model, s, g, eta);
    return kinetic_hamiltonian(model, s, g, eta) + potential_energy(torques, b, g, eta);
}

Vec pack(const PhaseState& s) {
    const Index n = s.dim();
    Vec y(2 * n + 2 * n * n);
    y << s.x, Eigen::Map<const Vec>(s.phi.data(), n * n), s.p,
        Eigen::Map<const Vec>(s.P.data(), n * n);
    return y;
}

PhaseState unpack_phase(const Vec& y, Index n) {
    PhaseState s;
    s.x = y.segment(0, n);
    s.phi = Eigen::Map<const Mat>(y.data() + n, n, n);
    s.p = y.segment(n + n * n, n);
    s.P = Eigen::Map<const Mat>(y.data() + 2 * n + n * n, n, n);
    return s;
}

OdeRhs as_ode(std::function<PhaseVelocity(const PhaseState&)> rhs, Index n) {
    return [rhs = std::move(rhs), n](double, const Vec& y) {
        const PhaseVelocity v = rhs(unpack_phase(y, n));
        PhaseState d{v.xdot, v.phidot, v.pdot, v.Pdot};
        return pack(d);
    };
}

}  // namespace affine
