#include "affine/sim/config.hpp"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace affine::sim {
namespace {

class Reader {
public:
    std::vector<Diagnostic> diags;

    void error(const std::string& path, const std::string& msg) {
        diags.push_back({path.empty() ? "/" : path, msg, Severity::Error});
    }
    void warning(const std::string& path, const std::string& msg) {
        diags.push_back({path.empty() ? "/" : path, msg, Severity::Warning});
    }
    bool ok() const {
        for (const Diagnostic& d : diags)
            if (d.severity == Severity::Error) return false;
        return true;
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                                 std::optional<double> fallback = std::nullopt) {
        const std::string p = path + "/" + key;
        if (!obj.is_object() || !obj.contains(key)) {
            if (!fallback) error(p, "missing required number");
            return fallback;
        }
        if (!obj[key].is_number()) {
            error(p, "expected a number");
            return std::nullopt;
        }
        const double v = obj[key].get<double>();
        if (!std::isfinite(v)) {
            error(p, "must be finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<Vec> vector(const json& j, const std::string& path, Index n) {
        if (!j.is_array() || Index(j.size()) != n) {
            error(path, "expected an array of " + std::to_string(n) + " numbers");
            return std::nullopt;
        }
        Vec v(n);
        for (Index i = 0; i < n; ++i) {
            if (!j[i].is_number()) {
                error(path + "/" + std::to_string(i), "expected a number");
                return std::nullopt;
            }
            v(i) = j[i].get<double>();
        }
        return v;
    }

    std::optional<Mat> matrix(const json& j, const std::string& path, Index n) {
        if (!j.is_array() || Index(j.size()) != n) {
            error(path, "expected " + std::to_string(n) + " rows");
            return std::nullopt;
        }
        Mat m(n, n);
        for (Index i = 0; i < n; ++i) {
            const auto row = vector(j[i], path + "/" + std::to_string(i), n);
            if (!row) return std::nullopt;
            m.row(i) = row->transpose();
        }
        return m;
    }

    std::optional<std::vector<double>> flat(const json& j, const std::string& path, size_t size) {
        const auto v = vector(j, path, Index(size));
        if (!v) return std::nullopt;
        return std::vector<double>(v->data(), v->data() + v->size());
    }

    std::optional<MetricD> metric(const json& doc, const std::string& key, Index n) {
        const std::string path = "/" + key;
        if (!doc.contains(key) || (doc[key].is_string() && doc[key] == "identity")) return MetricD::identity(n);
        const auto m = matrix(doc[key], path, n);
        if (!m) return std::nullopt;
        try {
            return MetricD(*m);
        } catch (const Error& e) {
            error(path, e.what());
            return std::nullopt;
        }
    }

    std::string string(const json& obj, const std::string& key, const std::string& path,
                       const std::string& fallback) {
        if (!obj.is_object() || !obj.contains(key)) return fallback;
        if (!obj[key].is_string()) {
            error(path + "/" + key, "expected a string");
            return fallback;
        }
        return obj[key].get<std::string>();
    }

    void non_negative(const std::optional<double>& v, const std::string& path) {
        if (v && *v < 0.0) error(path, "dissipation coefficient must be non-negative");
    }
    void nonzero(const std::optional<double>& v, const std::string& path) {
        if (v && *v == 0.0) error(path, "must be nonzero");
    }
};

std::optional<InertiaD> parse_inertia(Reader& rd, const json& doc, Index n, const MetricD& eta) {
    const json in = doc.value("inertia", json::object());
    const auto mass = rd.number(in, "mass", "/inertia", 1.0);
    if (!mass) return std::nullopt;
    try {
        if (!in.contains("J")) return InertiaD::isotropic(*mass, 1.0, eta);
        if (in["J"].is_string()) {
            const std::string s = in["J"];
            const std::string prefix = "isotropic:";
            if (s.rfind(prefix, 0) != 0) {
                rd.error("/inertia/J", "expected a matrix or \"isotropic:<I>\"");
                return std::nullopt;
            }
            return InertiaD::isotropic(*mass, std::stod(s.substr(prefix.size())), eta);
        }
        const auto J = rd.matrix(in["J"], "/inertia/J", n);
        if (!J) return std::nullopt;
        return InertiaD(*mass, *J);
    } catch (const Error& e) {
        rd.error("/inertia", e.what());
    } catch (const std::logic_error&) {
        rd.error("/inertia/J", "cannot read the isotropic constant");
    }
    return std::nullopt;
}

std::optional<KineticModel> parse_kinetic(Reader& rd, const json& doc, const InertiaD& inertia) {
    if (!doc.contains("kinetic_model")) return KineticModel(dalembert_model(inertia));
    const json& k = doc["kinetic_model"];
    const std::string path = "/kinetic_model";
    const std::string type = rd.string(k, "type", path, "");
    auto num = [&](const char* key, std::optional<double> fb = std::nullopt) {
        return rd.number(k, key, path, fb);
    };
    if (type == "dalembert") return KineticModel(dalembert_model(inertia));
    if (type == "spatial_affine" || type == "material_affine") {
        const auto m = num("m", 0.0), I = num("I"), A = num("A"), B = num("B", 0.0);
        if (!m || !I || !A || !B) return std::nullopt;
        if (type == "spatial_affine") return KineticModel(SpatialAffine{*m, *I, *A, *B});
        return KineticModel(MaterialAffine{*m, *I, *A, *B});
    }
    if (type == "doubly_affine") {
        const auto I = num("I", 0.0), A = num("A"), B = num("B", 0.0);
        if (I && *I != 0.0) rd.error(path + "/I", "the doubly affine model has I = 0");
        if (!A || !B) return std::nullopt;
        return KineticModel(DoublyAffine{*A, *B});
    }
    if (type == "general_eight_param") {
        const char* keys[] = {"m1", "m2", "I1", "I2", "I3", "I4", "A", "B"};
        double v[8];
        for (int i = 0; i < 8; ++i) {
            const auto x = num(keys[i]);
            if (!x) return std::nullopt;
            v[i] = *x;
        }
        return KineticModel(GeneralEightParam{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    rd.error(path + "/type", "unknown kinetic model \"" + type + "\"");
    return std::nullopt;
}

bool pair_symmetric(const std::vector<double>& V, Index n) {
    auto at = [&](Index i, Index j, Index a, Index b) { return V[((i * n + j) * n + a) * n + b]; };
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            for (Index a = 0; a < n; ++a)
                for (Index b = 0; b < n; ++b)
                    if (std::abs(at(i, j, a, b) - at(a, b, i, j)) > 1e-12) return false;
    return true;
}

std::optional<TorqueModel> parse_torques(Reader& rd, const json& doc, Index n, Vec& constant_force) {
    constant_force = Vec::Zero(n);
    if (!doc.contains("torque_models")) return TorqueModel{};
    const json& list = doc["torque_models"];
    if (!list.is_array()) {
        rd.error("/torque_models", "expected an array");
        return std::nullopt;
    }
    SumModel sum;
    bool good = true;
    const size_t n4 = size_t(n * n * n * n);
    for (size_t idx = 0; idx < list.size(); ++idx) {
        const json& t = list[idx];
        const std::string path = "/torque_models/" + std::to_string(idx);
        const std::string type = rd.string(t, "type", path, "");
        auto num = [&](const char* key, std::optional<double> fb = std::nullopt) {
            return rd.number(t, key, path, fb);
        };
        auto sub = [&](const char* key) { return path + "/" + key; };
        if (type == "quadratic_invariant") {
            const auto k = t.contains("k") ? rd.vector(t["k"], sub("k"), n) : std::nullopt;
            if (!t.contains("k")) rd.error(sub("k"), "missing required array");
            if (k) sum.models.push_back(quadratic_invariant_potential(*k));
            else good = false;
        } else if (type == "isotropic_expansion") {
            const auto l = t.contains("l") ? rd.vector(t["l"], sub("l"), n) : std::nullopt;
            if (!t.contains("l")) rd.error(sub("l"), "missing required array");
            if (l) {
                const Vec coeff = *l;
                sum.models.push_back(IsotropicExpansion{[coeff](const Vec&) { return coeff; }});
            } else {
                good = false;
            }
        } else if (type == "hooke_isotropic" || type == "hooke_green_shifted") {
            const auto lambda = num("lambda"), mu = num("mu");
            if (lambda && mu) {
                if (type == "hooke_isotropic") sum.models.push_back(HookeIsotropic{*lambda, *mu});
                else sum.models.push_back(HookeGreenShifted{*lambda, *mu});
            } else {
                good = false;
            }
        } else if (type == "hooke_anisotropic") {
            const auto C = t.contains("C") ? rd.flat(t["C"], sub("C"), n4) : std::nullopt;
            if (!t.contains("C")) rd.error(sub("C"), "missing required array");
            if (C) sum.models.push_back(HookeAnisotropic{*C});
            else good = false;
        } else if (type == "viscous_continuum") {
            const auto e = num("eta"), z = num("zeta"), v = num("vol0", 1.0);
            rd.non_negative(e, sub("eta"));
            rd.non_negative(z, sub("zeta"));
            if (v && !(*v > 0.0)) rd.error(sub("vol0"), "reference volume must be positive");
            if (e && z && v) sum.models.push_back(ViscousContinuum{*e, *z, *v});
            else good = false;
        } else if (type == "viscous_discrete") {
            const auto a = num("alpha"), b = num("beta", 0.0);
            rd.non_negative(a, sub("alpha"));
            rd.non_negative(b, sub("beta"));
            if (a && b) sum.models.push_back(ViscousDiscrete{*a, *b});
            else good = false;
        } else if (type == "external_friction") {
            const auto a = num("alpha"), b = num("beta"), c = num("gamma");
            rd.non_negative(a, sub("alpha"));
            rd.non_negative(b, sub("beta"));
            rd.non_negative(c, sub("gamma"));
            if (a && b && c) sum.models.push_back(ExternalFriction{*a, *b, *c});
            else good = false;
        } else if (type == "linear_friction") {
            const auto V = t.contains("V") ? rd.flat(t["V"], sub("V"), n4) : std::nullopt;
            if (!t.contains("V")) rd.error(sub("V"), "missing required array");
            if (V) {
                if (!pair_symmetric(*V, n))
                    rd.warning(sub("V"), "V is not symmetric under (ij) <-> (ab); dissipation is not guaranteed");
                sum.models.push_back(LinearFriction{*V});
            } else {
                good = false;
            }
        } else if (type == "pressure") {
            const auto p = num("p");
            if (p) sum.models.push_back(Pressure{*p});
            else good = false;
        } else if (type == "constant_force") {
            const auto F = t.contains("F") ? rd.vector(t["F"], sub("F"), n) : std::nullopt;
            if (!t.contains("F")) rd.error(sub("F"), "missing required array");
            if (F) {
                sum.models.push_back(ConstantForce{*F});
                constant_force += *F;
            } else {
                good = false;
            }
        } else {
            rd.error(sub("type"), "unknown torque model \"" + type + "\"");
            good = false;
        }
    }
    if (!good) return std::nullopt;
    return TorqueModel(sum);
}

std::optional<LatticeModel> parse_lattice(Reader& rd, const json& doc, Index n) {
    if (!doc.contains("lattice_model")) {
        rd.error("/lattice_model", "the two_polar formalism needs a lattice model");
        return std::nullopt;
    }
    const json& l = doc["lattice_model"];
    const std::string path = "/lattice_model";
    const std::string type = rd.string(l, "type", path, "");
    auto param = [&](const char* key) {
        const auto v = rd.number(l, key, path);
        rd.nonzero(v, path + "/" + key);
        return v;
    };
    if (type == "hyperbolic_casimir") {
        const auto a = param("alpha"), b = rd.number(l, "inv_beta", path, 0.0);
        if (a && b) return LatticeModel(HyperbolicCasimir{*a, *b});
    } else if (type == "dalembert_isotropic") {
        if (const auto I = param("I")) return LatticeModel(DAlembertIsotropic{*I});
    } else if (type == "sutherland_compact") {
        if (const auto A = param("A")) return LatticeModel(SutherlandCompact{*A});
    } else if (type == "two_dim_closed") {
        if (n != 2) rd.error(path + "/type", "two_dim_closed needs dimension 2");
        if (const auto A = param("A")) return LatticeModel(TwoDimClosed{*A});
    } else {
        rd.error(path + "/type", "unknown lattice model \"" + type + "\"");
    }
    return std::nullopt;
}

// φ = Rg⁻¹(I + εX)Re with the metric Cholesky factors, so that G stays near η.
BodyStateD random_body(std::mt19937_64& rng, Index n, double scale, const MetricD& g, const MetricD& eta) {
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](Index r, Index c) {
        Mat m(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) m(i, j) = normal(rng);
        return m;
    };
    BodyStateD s;
    s.config.x = scale * draw(n, 1);
    s.v = scale * draw(n, 1);
    const Mat base = Mat::Identity(n, n) + 0.5 * scale * draw(n, n);
    s.config.phi = g.cholesky_upper_inverse() * base * eta.cholesky_upper();
    s.phidot = scale * draw(n, n) * s.config.phi;
    return s;
}

struct InitialParts {
    std::optional<BodyStateD> body;
    std::optional<PhaseState> phase;
    std::optional<TwoPolarState> reduced;
};

InitialParts parse_initial(Reader& rd, const json& doc, Index n, const MetricD& g, const MetricD& eta,
                           unsigned long long seed) {
    InitialParts out;
    const std::string path = "/initial_state";
    if (!doc.contains("initial_state") || !doc["initial_state"].is_object()) {
        rd.error(path, "missing initial state object");
        return out;
    }
    const json& s = doc["initial_state"];
    auto vec_or_zero = [&](const char* key) -> std::optional<Vec> {
        if (!s.contains(key)) return Vec(Vec::Zero(n));
        return rd.vector(s[key], path + "/" + key, n);
    };
    auto mat_req = [&](const char* key) -> std::optional<Mat> {
        if (!s.contains(key)) {
            rd.error(path + "/" + key, "missing required matrix");
            return std::nullopt;
        }
        return rd.matrix(s[key], path + "/" + key, n);
    };
    if (s.contains("random")) {
        const json r = s["random"];
        const auto scale = rd.number(r, "scale", path + "/random", 0.3);
        if (!scale) return out;
        std::mt19937_64 rng(seed);
        out.body = random_body(rng, n, *scale, g, eta);
        return out;
    }
    if (s.contains("q")) {
        const auto q = rd.vector(s["q"], path + "/q", n);
        const auto p = vec_or_zero("p");
        const auto rho = s.contains("rho_hat") ? rd.matrix(s["rho_hat"], path + "/rho_hat", n) : Mat(Mat::Zero(n, n));
        const auto tau = s.contains("tau_hat") ? rd.matrix(s["tau_hat"], path + "/tau_hat", n) : Mat(Mat::Zero(n, n));
        if (!q || !p || !rho || !tau) return out;
        for (const auto& [m, key] : {std::pair{*rho, "rho_hat"}, std::pair{*tau, "tau_hat"}})
            if ((m + m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
                rd.error(path + "/" + key, "must be antisymmetric");
        TwoPolarState r;
        r.factors.q = *q;
        r.factors.Q = q->array().exp().matrix();
        r.factors.L = Mat::Identity(n, n);
        r.factors.R = Mat::Identity(n, n);
        for (const char* key : {"L", "R"})
            if (s.contains(key)) {
                const auto m = rd.matrix(s[key], path + "/" + key, n);
                if (m) (std::string(key) == "L" ? r.factors.L : r.factors.R) = *m;
            }
        r.p = *p;
        r.rho_hat = *rho;
        r.tau_hat = *tau;
        out.reduced = r;
        return out;
    }
    const auto x = vec_or_zero("x");
    const auto phi = mat_req("phi");
    if (!x || !phi) return out;
    try {
        require_invertible(*phi);
    } catch (const Error& e) {
        rd.error(path + "/phi", e.what());
        return out;
    }
    if (s.contains("P") || s.contains("p")) {
        const auto p = vec_or_zero("p");
        const auto P = s.contains("P") ? rd.matrix(s["P"], path + "/P", n) : Mat(Mat::Zero(n, n));
        if (p && P) out.phase = PhaseState{*x, *phi, *p, *P};
        return out;
    }
    const auto v = vec_or_zero("v");
    const auto phidot = s.contains("phidot") ? rd.matrix(s["phidot"], path + "/phidot", n) : Mat(Mat::Zero(n, n));
    if (v && phidot) out.body = BodyStateD{{*x, *phi}, *v, *phidot};
    return out;
}

bool monitor_available(const std::string& name, const RunConfig& c, std::string& why) {
    if (name == "m_ampl" || name == "nu_lat") {
        why = "needs the two_polar formalism with dimension 2";
        return c.formalism == Formalism::TwoPolar && c.n == 2;
    }
    if (name == "kappa" || name == "xi" || name == "power") {
        why = "needs the d'Alembert model in the newton or hamiltonian formalism";
        return c.formalism != Formalism::TwoPolar && std::holds_alternative<DAlembert>(c.kinetic);
    }
    if (name == "constraint_residual" || name == "velocity_residual") {
        why = "needs the newton formalism";
        return c.formalism == Formalism::Newton;
    }
    return true;
}

std::vector<std::string> default_monitors(const RunConfig& c) {
    std::vector<std::string> m = {"energy", "C1", "C2", "spin_norm", "vorticity_norm", "det_phi"};
    if (c.formalism == Formalism::Newton && c.constraint != ConstraintKind::Unconstrained) {
        m.push_back("constraint_residual");
        m.push_back("velocity_residual");
    }
    if (c.formalism == Formalism::TwoPolar && c.n == 2) {
        m.push_back("m_ampl");
        m.push_back("nu_lat");
    }
    if (c.formalism != Formalism::TwoPolar && c.constant_force.size() && c.constant_force.norm() > 0 &&
        std::holds_alternative<DAlembert>(c.kinetic)) {
        m.push_back("kappa");
        m.push_back("xi");
    }
    return m;
}

}  // namespace

std::string to_string(const Diagnostic& d) {
    return std::string(d.severity == Severity::Error ? "error" : "warning") + " at " + d.path + ": " +
           d.message;
}

const std::vector<std::string>& known_monitors() {
    static const std::vector<std::string> names = {
        "energy", "C1", "C2", "spin_norm", "vorticity_norm", "det_phi", "constraint_residual",
        "velocity_residual", "kappa", "xi", "power", "m_ampl", "nu_lat"};
    return names;
}

ParseResult parse_config(const json& doc, unsigned long long seed) {
    Reader rd;
    ParseResult result;
    if (!doc.is_object()) {
        rd.error("/", "config must be a JSON object");
        result.diagnostics = rd.diags;
        return result;
    }
    if (!doc.contains("schema_version") || doc["schema_version"] != 1)
        rd.error("/schema_version", "expected schema_version 1");

    RunConfig c;
    c.run_id = rd.string(doc, "run_id", "", "run");
    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer() || doc["dimension"].get<long>() < 1 ||
        doc["dimension"].get<long>() > 16) {
        rd.error("/dimension", "expected an integer dimension between 1 and 16");
        result.diagnostics = rd.diags;
        return result;
    }
    c.n = doc["dimension"].get<Index>();
    const Index n = c.n;
    const auto g = rd.metric(doc, "metric_g", n), eta = rd.metric(doc, "metric_eta", n);
    if (!g || !eta) {
        result.diagnostics = rd.diags;
        return result;
    }
    c.g = *g;
    c.eta = *eta;

    const auto inertia = parse_inertia(rd, doc, n, c.eta);
    if (inertia) c.inertia = *inertia;
    const auto kinetic = inertia ? parse_kinetic(rd, doc, *inertia) : std::nullopt;
    if (kinetic) {
        c.kinetic = *kinetic;
        try {
            check_nondegenerate(c.kinetic, n);
        } catch (const Error& e) {
            rd.error("/kinetic_model", e.what());
        }
    }
    const auto torques = parse_torques(rd, doc, n, c.constant_force);
    if (torques) c.torques = *torques;

    const std::string constraint = rd.string(doc, "constraint", "", "unconstrained");
    if (const auto k = parse_constraint(constraint)) c.constraint = *k;
    else rd.error("/constraint", "unknown constraint \"" + constraint + "\"");

    const std::string formalism = rd.string(doc, "formalism", "", "newton");
    if (formalism == "newton") c.formalism = Formalism::Newton;
    else if (formalism == "hamiltonian") c.formalism = Formalism::Hamiltonian;
    else if (formalism == "two_polar") c.formalism = Formalism::TwoPolar;
    else rd.error("/formalism", "expected newton, hamiltonian or two_polar");

    c.reconstruct_legs = doc.value("reconstruct_legs", false);
    c.stabilize = doc.value("stabilize", true);

    // Integrator.
    const json integ = doc.value("integrator", json::object());
    const std::string method = rd.string(integ, "method", "/integrator", "rk4");
    if (method == "rk4") c.scheme = Scheme::RK4;
    else if (method == "rkf45") c.scheme = Scheme::RKF45;
    else if (method == "exact_exponential") c.scheme = Scheme::ExactExponential;
    else rd.error("/integrator/method", "expected rk4, rkf45 or exact_exponential");
    c.integrator.method = c.scheme == Scheme::RKF45 ? affine::Method::RKF45 : affine::Method::RK4;
    const auto dt = rd.number(integ, "dt", "/integrator", 1e-3);
    const auto t_end = rd.number(integ, "t_end", "/integrator", 1.0);
    if (dt && !(*dt > 0)) rd.error("/integrator/dt", "must be positive");
    if (t_end && !(*t_end > 0)) rd.error("/integrator/t_end", "must be positive");
    if (dt) c.integrator.dt = *dt;
    if (t_end) c.integrator.t_end = *t_end;
    const json tol = integ.value("tolerances", json::object());
    if (const auto r = rd.number(tol, "rtol", "/integrator/tolerances", c.integrator.rtol)) c.integrator.rtol = *r;
    if (const auto a = rd.number(tol, "atol", "/integrator/tolerances", c.integrator.atol)) c.integrator.atol = *a;
    if (!(c.integrator.rtol > 0) || !(c.integrator.atol > 0))
        rd.error("/integrator/tolerances", "tolerances must be positive");

    // Outputs.
    const json outputs = doc.value("outputs", json::object());
    c.output_path = rd.string(outputs, "path", "/outputs", c.run_id + ".csv");
    const std::string format = rd.string(outputs, "format", "/outputs", "csv");
    if (format == "csv") c.format = OutputFormat::Csv;
    else if (format == "json") c.format = OutputFormat::Json;
    else rd.error("/outputs/format", "expected csv or json");
    if (outputs.contains("stride")) {
        if (!outputs["stride"].is_number_integer() || outputs["stride"].get<long>() < 1)
            rd.error("/outputs/stride", "expected a positive integer");
        else c.integrator.stride = outputs["stride"].get<int>();
    }

    // Cross-field rules.
    const bool dalembert = std::holds_alternative<DAlembert>(c.kinetic);
    if (c.formalism == Formalism::Newton && !dalembert)
        rd.error("/kinetic_model", "the newton formalism integrates the d'Alembert model; use hamiltonian");
    if (c.formalism != Formalism::Newton && c.constraint != ConstraintKind::Unconstrained)
        rd.error("/constraint", "constraints are supported in the newton formalism only");
    if (c.formalism == Formalism::TwoPolar) {
        if (doc.contains("torque_models") && doc["torque_models"].is_array() && !doc["torque_models"].empty())
            rd.error("/torque_models", "two_polar runs are geodetic; torques are not reduced");
        if (n < 2) rd.error("/dimension", "two_polar needs dimension >= 2");
        c.lattice = parse_lattice(rd, doc, n);
    }
    if (c.scheme == Scheme::ExactExponential) {
        if (c.formalism != Formalism::Hamiltonian || !std::holds_alternative<DoublyAffine>(c.kinetic))
            rd.error("/integrator/method", "exact_exponential needs the hamiltonian formalism with the I = 0 doubly affine model");
        if (doc.contains("torque_models") && doc["torque_models"].is_array() && !doc["torque_models"].empty())
            rd.error("/torque_models", "exact_exponential is the geodetic propagator; remove torques");
    }

    // Initial state, converted to the formalism's native form.
    InitialParts init = parse_initial(rd, doc, n, c.g, c.eta, seed);
    const bool random = doc.contains("initial_state") && doc["initial_state"].is_object() &&
                        doc["initial_state"].contains("random");
    try {
        if (rd.ok()) {
            switch (c.formalism) {
                case Formalism::Newton:
                    c.initial_form = InitialForm::Body;
                    if (init.phase) init.body = legendre_inverse(c.kinetic, *init.phase, c.g, c.eta);
                    if (init.reduced) rd.error("/initial_state/q", "reduced states need the two_polar formalism");
                    if (init.body) {
                        if (random) stabilize(c.constraint, *init.body, c.g, c.eta);
                        c.body = *init.body;
                        try {
                            require_constraint(c.constraint, c.body, c.g, c.eta, 1e-9);
                        } catch (const ConstraintViolation& e) {
                            rd.error("/initial_state", e.what());
                        }
                    }
                    break;
                case Formalism::Hamiltonian:
                    c.initial_form = InitialForm::Phase;
                    if (init.body) init.phase = legendre(c.kinetic, *init.body, c.g, c.eta);
                    if (init.reduced) rd.error("/initial_state/q", "reduced states need the two_polar formalism");
                    if (init.phase) c.phase = *init.phase;
                    break;
                case Formalism::TwoPolar:
                    c.initial_form = InitialForm::Reduced;
                    if (init.body) init.phase = legendre(c.kinetic, *init.body, c.g, c.eta);
                    if (init.phase) {
                        try {
                            init.reduced = reduce(*init.phase, c.g, c.eta);
                        } catch (const DegenerateReduction& e) {
                            rd.error("/initial_state/phi", e.what());
                        }
                    }
                    if (init.reduced) c.reduced = *init.reduced;
                    break;
            }
        }
    } catch (const Error& e) {
        rd.error("/initial_state", e.what());
    }

    // Monitors.
    if (outputs.contains("monitors")) {
        if (!outputs["monitors"].is_array()) {
            rd.error("/outputs/monitors", "expected an array of names");
        } else {
            const std::set<std::string> known(known_monitors().begin(), known_monitors().end());
            for (size_t i = 0; i < outputs["monitors"].size(); ++i) {
                const json& m = outputs["monitors"][i];
                const std::string path = "/outputs/monitors/" + std::to_string(i);
                std::string why;
                if (!m.is_string() || !known.count(m.get<std::string>()))
                    rd.error(path, "unknown monitor " + m.dump());
                else if (!monitor_available(m.get<std::string>(), c, why))
                    rd.error(path, m.get<std::string>() + " " + why);
                else
                    c.monitors.push_back(m.get<std::string>());
            }
        }
    } else {
        c.monitors = default_monitors(c);
    }

    result.diagnostics = rd.diags;
    if (rd.ok()) result.config = c;
    return result;
}

std::vector<Diagnostic> validate(const json& doc, unsigned long long seed) {
    return parse_config(doc, seed).diagnostics;
}

std::vector<json> expand_sweep(const json& doc) {
    if (!doc.is_object() || !doc.contains("sweep")) return {doc};
    const json& sweep = doc["sweep"];
    if (!sweep.is_object()) throw std::invalid_argument("sweep must map JSON pointers to value arrays");
    std::vector<std::pair<json::json_pointer, json>> axes;
    for (const auto& [key, values] : sweep.items()) {
        if (!values.is_array() || values.empty())
            throw std::invalid_argument("sweep entry " + key + " must be a non-empty array");
        axes.emplace_back(json::json_pointer(key), values);
    }
    json base = doc;
    base.erase("sweep");
    const std::string run_id = base.value("run_id", std::string("run"));
    std::string path = run_id + ".csv";
    if (base.contains("outputs") && base["outputs"].contains("path")) path = base["outputs"]["path"];
    const auto dot = path.find_last_of('.');
    const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);

    size_t total = 1;
    for (const auto& a : axes) total *= a.second.size();
    std::vector<json> out;
    for (size_t k = 0; k < total; ++k) {
        json cfg = base;
        size_t rem = k;
        for (size_t a = axes.size(); a-- > 0;) {
            const size_t m = axes[a].second.size();
            cfg[axes[a].first] = axes[a].second[rem % m];
            rem /= m;
        }
        const std::string suffix = "_" + std::to_string(k);
        cfg["run_id"] = run_id + suffix;
        cfg["outputs"]["path"] = stem + suffix + ext;
        out.push_back(std::move(cfg));
    }
    return out;
}

}  // namespace affine::sim
