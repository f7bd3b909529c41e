#include "affine/sim/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace affine::sim {
namespace {

constexpr double kOracleTolerance = 1e-8;

// Invariant quantities shared by every formalism's monitors.
struct View {
    double t = 0.0;
    double energy = 0.0;
    Mat SigmaHat, spin, vorticity;
    double C1 = 0.0, C2 = 0.0, det_phi = 0.0;
    std::optional<BodyStateD> body;
    std::optional<TwoPolarState> reduced;
};

struct Driver {
    OdeRhs f;
    Vec y0;
    StepHooks hooks;
    std::vector<std::string> state_columns;
    std::function<View(double t, const Vec& y)> view;
};

double norm_of(const Mat& antisym) { return std::sqrt(std::max(0.0, antisymmetric_norm_sq(antisym))); }

std::vector<std::string> matrix_columns(const std::string& name, Index n) {
    std::vector<std::string> c;
    for (Index col = 0; col < n; ++col)
        for (Index row = 0; row < n; ++row)
            c.push_back(name + "_" + std::to_string(row) + "_" + std::to_string(col));
    return c;
}

std::vector<std::string> vector_columns(const std::string& name, Index n) {
    std::vector<std::string> c;
    for (Index i = 0; i < n; ++i) c.push_back(name + "_" + std::to_string(i));
    return c;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); }

void fill_momenta(View& v, const CanonicalMomenta<double>& c) {
    v.SigmaHat = c.SigmaHat;
    v.spin = c.spin;
    v.vorticity = c.vorticity;
    v.C1 = c.SigmaHat.trace();
    v.C2 = casimir(c.SigmaHat, 2);
}

Driver newton_driver(const RunConfig& c) {
    const Index n = c.n;
    const EquationSystem sys = constrained_rhs(c.constraint, c.inertia, c.torques, c.g, c.eta);
    Driver d;
    d.f = as_ode(sys, n);
    d.y0 = pack(c.body);
    d.hooks = stabilization_hooks(sys, n);
    if (!c.stabilize) d.hooks.project = nullptr;
    append(d.state_columns, vector_columns("x", n));
    append(d.state_columns, vector_columns("v", n));
    append(d.state_columns, matrix_columns("phi", n));
    append(d.state_columns, matrix_columns("phidot", n));
    d.view = [c, n](double t, const Vec& y) {
        View v;
        v.t = t;
        const BodyStateD s = unpack_body(y, n);
        v.energy = newton_energy(c.inertia, c.torques, s, c.g, c.eta);
        fill_momenta(v, canonical_from_kinematical(s, c.inertia, c.g, c.eta));
        v.det_phi = s.phi().determinant();
        v.body = s;
        return v;
    };
    return d;
}

Driver hamiltonian_driver(const RunConfig& c) {
    const Index n = c.n;
    Driver d;
    d.f = as_ode(forced_hamiltonian_rhs(c.kinetic, c.torques, c.g, c.eta), n);
    d.y0 = pack(c.phase);
    d.hooks.check = [n](const Vec& y) { require_invertible(unpack_phase(y, n).phi); };
    append(d.state_columns, vector_columns("x", n));
    append(d.state_columns, matrix_columns("phi", n));
    append(d.state_columns, vector_columns("p", n));
    append(d.state_columns, matrix_columns("P", n));
    const bool dalembert = std::holds_alternative<DAlembert>(c.kinetic);
    d.view = [c, n, dalembert](double t, const Vec& y) {
        View v;
        v.t = t;
        const PhaseState s = unpack_phase(y, n);
        v.energy = total_hamiltonian(c.kinetic, c.torques, s, c.g, c.eta);
        fill_momenta(v, canonical_momenta(s.phi, s.p, s.P, c.g, c.eta));
        v.det_phi = s.phi.determinant();
        if (dalembert) v.body = legendre_inverse(c.kinetic, s, c.g, c.eta);
        return v;
    };
    return d;
}

Driver two_polar_driver(const RunConfig& c) {
    const Index n = c.n;
    const bool legs = c.reconstruct_legs;
    Driver d;
    d.f = as_ode(*c.lattice, n, legs);
    d.y0 = pack(c.reduced, legs);
    d.hooks = lattice_hooks(*c.lattice, n);
    append(d.state_columns, vector_columns("q", n));
    append(d.state_columns, vector_columns("p", n));
    for (const char* name : {"rho", "tau"})
        for (Index a = 0; a < n; ++a)
            for (Index b = a + 1; b < n; ++b)
                d.state_columns.push_back(std::string(name) + "_" + std::to_string(a) + "_" + std::to_string(b));
    if (legs) {
        append(d.state_columns, matrix_columns("L", n));
        append(d.state_columns, matrix_columns("R", n));
    }
    const double det_scale = std::sqrt(c.eta.determinant() / c.g.determinant());
    d.view = [c, n, legs, det_scale](double t, const Vec& y) {
        View v;
        v.t = t;
        const TwoPolarState r = unpack_two_polar(y, n, legs);
        v.energy = lattice_hamiltonian(*c.lattice, r);
        v.spin = r.rho_hat;
        v.vorticity = -r.tau_hat;
        v.C1 = r.p.sum();
        // C(2) is the Casimir lattice Hamiltonian with 2α = 1.
        v.C2 = lattice_hamiltonian(HyperbolicCasimir{0.5}, r);
        v.det_phi = r.factors.Q.prod() * det_scale;
        v.reduced = r;
        return v;
    };
    return d;
}

Driver make_driver(const RunConfig& c) {
    switch (c.formalism) {
        case Formalism::Newton: return newton_driver(c);
        case Formalism::Hamiltonian: return hamiltonian_driver(c);
        case Formalism::TwoPolar: break;
    }
    return two_polar_driver(c);
}

double monitor_value(const std::string& name, const View& v, const RunConfig& c) {
    if (name == "energy") return v.energy;
    if (name == "C1") return v.C1;
    if (name == "C2") return v.C2;
    if (name == "spin_norm") return norm_of(v.spin);
    if (name == "vorticity_norm") return norm_of(v.vorticity);
    if (name == "det_phi") return v.det_phi;
    if (name == "constraint_residual" || name == "velocity_residual") {
        const Vec r = constraint_residual(c.constraint, *v.body, c.g, c.eta);
        if (r.size() == 0) return 0.0;
        if (name == "velocity_residual") return r(r.size() - 1);
        return r.size() == 2 ? r(0) : 0.0;
    }
    if (name == "kappa" || name == "xi") {
        // ϰ = m v − F t and ξ = x − v t + F t²/2m are constant under a constant force.
        const BodyStateD& s = *v.body;
        const double m = c.inertia.mass();
        const Vec& F = c.constant_force;
        if (name == "kappa") return (m * s.v - F * v.t).norm();
        return (s.x() - s.v * v.t + F * (v.t * v.t / (2 * m))).norm();
    }
    if (name == "power") return power(*v.body, torque(c.torques, *v.body, c.g, c.eta), c.g);
    if (name == "m_ampl") return m_ampl(*v.reduced);
    return nu_lat(*v.reduced);
}

void record(Trajectory& traj, double t, const Vec& y, const std::vector<double>& mons,
            std::vector<std::vector<double>>& mon_hist) {
    std::vector<double> row;
    row.reserve(1 + y.size() + mons.size());
    row.push_back(t);
    row.insert(row.end(), y.data(), y.data() + y.size());
    row.insert(row.end(), mons.begin(), mons.end());
    traj.rows.push_back(std::move(row));
    mon_hist.push_back(mons);
}

// φ(t) = exp(Et)φ₀ with E = φ̇₀φ₀⁻¹; Σ is constant and P = φ⁻¹Σ.
std::vector<Sample> exponential_samples(const RunConfig& c) {
    const BodyStateD b0 = legendre_inverse(c.kinetic, c.phase, c.g, c.eta);
    const Mat E = b0.phidot * b0.phi().inverse();
    const Mat Sigma = c.phase.Sigma();
    std::vector<Sample> out;
    const double dt = c.integrator.dt * c.integrator.stride;
    const long count = long(std::floor(c.integrator.t_end / dt * (1.0 + 1e-12)));
    for (long k = 0; k <= count; ++k) {
        const double t = double(k) * dt;
        PhaseState s = c.phase;
        s.phi = exponential_geodesic(E, c.phase.phi, t, Side::Spatial);
        s.P = s.phi.partialPivLu().solve(Sigma);
        out.push_back({t, pack(s)});
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunResult run(const RunConfig& c) {
    RunResult res;
    json oracle_checks = json::array();
    try {
        const Driver d = make_driver(c);
        std::vector<Sample> samples;
        if (c.scheme == Scheme::ExactExponential) {
            samples = exponential_samples(c);
            IntegratorOptions opt = c.integrator;
            opt.method = affine::Method::RK4;
            const std::vector<Sample> rk = integrate(d.f, d.y0, opt, d.hooks);
            double worst = 0.0;
            const Index n = c.n;
            for (size_t k = 0; k < samples.size() && k < rk.size(); ++k) {
                const Mat a = unpack_phase(samples[k].y, n).phi, b = unpack_phase(rk[k].y, n).phi;
                worst = std::max(worst, (a - b).norm() / a.norm());
            }
            const bool pass = rk.size() == samples.size() && worst < kOracleTolerance;
            oracle_checks.push_back({{"name", "exponential_geodesic"},
                                     {"status", pass ? "PASS" : "FAIL"},
                                     {"max_relative_error", worst}});
        } else {
            samples = integrate(d.f, d.y0, c.integrator, d.hooks);
        }

        res.trajectory.columns = {"t"};
        append(res.trajectory.columns, d.state_columns);
        append(res.trajectory.columns, c.monitors);
        std::vector<std::vector<double>> mon_hist;
        for (const Sample& s : samples) {
            const View v = d.view(s.t, s.y);
            std::vector<double> mons;
            for (const std::string& m : c.monitors) mons.push_back(monitor_value(m, v, c));
            record(res.trajectory, s.t, s.y, mons, mon_hist);
        }

        json monitors = json::object();
        for (size_t j = 0; j < c.monitors.size(); ++j) {
            double drift = 0.0;
            for (const auto& row : mon_hist) drift = std::max(drift, std::abs(row[j] - mon_hist.front()[j]));
            monitors[c.monitors[j]] = {{"initial", mon_hist.front()[j]},
                                       {"final", mon_hist.back()[j]},
                                       {"max_drift", drift}};
        }
        json final_state = json::object();
        const auto& last = res.trajectory.rows.back();
        for (size_t j = 0; j < 1 + d.state_columns.size(); ++j) final_state[res.trajectory.columns[j]] = last[j];

        res.summary = {{"run_id", c.run_id},
                       {"rows", res.trajectory.rows.size()},
                       {"monitors", monitors},
                       {"final_state", final_state},
                       {"oracle_checks", oracle_checks}};
        if (c.formalism == Formalism::TwoPolar && c.n == 2)
            res.summary["classification"] = threshold_name(threshold_classify(c.reduced, TwoDimClosed{1.0}));
    } catch (const Error& e) {
        res.exit_code = kIntegrationFailure;
        res.error = e.what();
        res.summary = {{"run_id", c.run_id}, {"error", e.what()}, {"oracle_checks", oracle_checks}};
    }
    return res;
}

void write_csv(const Trajectory& t, std::ostream& os) {
    for (size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << "\n";
    for (const auto& row : t.rows) {
        for (size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_double(row[j]);
        os << "\n";
    }
}

void write_json(const Trajectory& t, std::ostream& os) {
    // Rows are emitted by hand so the numbers keep the CSV's 17-digit form.
    os << "{\"schema_version\":1,\"columns\":" << json(t.columns).dump() << ",\"rows\":[";
    for (size_t r = 0; r < t.rows.size(); ++r) {
        os << (r ? "," : "") << "[";
        for (size_t j = 0; j < t.rows[r].size(); ++j) os << (j ? "," : "") << format_double(t.rows[r][j]);
        os << "]";
    }
    os << "]}\n";
}

int run_file(const std::string& config_path, const std::string& out_dir, bool validate_only,
             unsigned long long seed, std::ostream& log) {
    json doc;
    {
        std::ifstream in(config_path);
        if (!in) {
            log << "error at /: cannot open " << config_path << "\n";
            return kValidationError;
        }
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            log << "error at /: " << config_path << " is not valid JSON: " << e.what() << "\n";
            return kValidationError;
        }
    }
    std::vector<json> runs;
    try {
        runs = expand_sweep(doc);
    } catch (const std::exception& e) {
        log << "error at /sweep: " << e.what() << "\n";
        return kValidationError;
    }

    std::vector<RunConfig> configs;
    bool failed = false;
    for (const json& r : runs) {
        const ParseResult p = parse_config(r, seed);
        const std::string id = r.value("run_id", std::string("run"));
        for (const Diagnostic& d : p.diagnostics) log << config_path << " [" << id << "] " << to_string(d) << "\n";
        if (!p.config) failed = true;
        else configs.push_back(*p.config);
    }
    if (failed) return kValidationError;
    if (validate_only) {
        log << config_path << ": " << configs.size() << " run(s) valid\n";
        return kOk;
    }

    std::filesystem::create_directories(out_dir);
    int code = kOk;
    for (const RunConfig& c : configs) {
        const RunResult r = run(c);
        const std::filesystem::path traj_path = std::filesystem::path(out_dir) / c.output_path;
        if (traj_path.has_parent_path()) std::filesystem::create_directories(traj_path.parent_path());
        if (r.exit_code == kOk) {
            std::ofstream os(traj_path);
            if (c.format == OutputFormat::Csv) write_csv(r.trajectory, os);
            else write_json(r.trajectory, os);
        }
        std::ofstream(std::filesystem::path(out_dir) / (c.run_id + "_summary.json")) << r.summary.dump(2) << "\n";
        if (r.exit_code != kOk) {
            log << "run " << c.run_id << ": integration failed: " << r.error << "\n";
        } else {
            log << "run " << c.run_id << ": " << r.trajectory.rows.size() << " rows -> " << traj_path.string() << "\n";
            for (const auto& [name, m] : r.summary["monitors"].items())
                log << "  " << name << " max_drift " << format_double(m["max_drift"].get<double>()) << "\n";
            if (r.summary.contains("classification"))
                log << "  classification: " << r.summary["classification"].get<std::string>() << "\n";
            for (const auto& chk : r.summary["oracle_checks"])
                log << "  oracle match: " << chk["status"].get<std::string>() << "\n";
        }
        code = std::max(code, r.exit_code);
    }
    return code;
}

}  // namespace affine::sim
