#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "affine/dynamics_engine.hpp"
#include "affine/hamiltonian.hpp"
#include "affine/kinetic_model.hpp"
#include "affine/two_polar_reduction.hpp"

namespace affine::sim {

using nlohmann::json;

enum class Severity { Error, Warning };

struct Diagnostic {
    std::string path;  // JSON pointer into the config, e.g. /torque_models/0/alpha
    std::string message;
    Severity severity = Severity::Error;
};

std::string to_string(const Diagnostic& d);

enum class Formalism { Newton, Hamiltonian, TwoPolar };
enum class Scheme { RK4, RKF45, ExactExponential };
enum class OutputFormat { Csv, Json };
enum class InitialForm { Body, Phase, Reduced };

struct RunConfig {
    std::string run_id = "run";
    Index n = 1;
    MetricD g = MetricD::identity(1);
    MetricD eta = MetricD::identity(1);
    InertiaD inertia{1.0, Mat::Identity(1, 1)};
    KineticModel kinetic = DAlembert{1.0, Mat::Identity(1, 1)};
    TorqueModel torques;
    Vec constant_force;  // sum of all constant_force terms, for the ϰ and ξ monitors
    ConstraintKind constraint = ConstraintKind::Unconstrained;
    Formalism formalism = Formalism::Newton;
    std::optional<LatticeModel> lattice;
    bool reconstruct_legs = false;
    bool stabilize = true;

    Scheme scheme = Scheme::RK4;
    IntegratorOptions integrator;

    InitialForm initial_form = InitialForm::Body;
    BodyStateD body;
    PhaseState phase;
    TwoPolarState reduced;

    std::string output_path = "trajectory.csv";
    OutputFormat format = OutputFormat::Csv;
    std::vector<std::string> monitors;
};

// Monitor names accepted in outputs.monitors.
const std::vector<std::string>& known_monitors();

struct ParseResult {
    std::optional<RunConfig> config;  // set iff diagnostics has no errors
    std::vector<Diagnostic> diagnostics;
};

// Parses one (already sweep-expanded) config; seed drives "random" initial states only.
ParseResult parse_config(const json& doc, unsigned long long seed = 0);

// Empty iff the run would start.
std::vector<Diagnostic> validate(const json& doc, unsigned long long seed = 0);

// Cross product of the "sweep" entries, keyed by JSON pointer; the last key varies fastest.
// Each expansion gets run_id "<run_id>_<k>" and an output path with the same suffix.
std::vector<json> expand_sweep(const json& doc);

}  // namespace affine::sim
