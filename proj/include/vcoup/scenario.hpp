// scenario.hpp — configuration parsing, validation and scenario execution
// for the CLI.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcoup/core.hpp"
#include "vcoup/direct.hpp"
#include "vcoup/greens.hpp"
#include "vcoup/mediator.hpp"
#include "vcoup/oracle.hpp"

namespace vcoup {

inline constexpr const char* library_version = "0.1.0";

enum class ScenarioKind {
    direct_free_space,
    direct_layered,
    truncation_study,
    mediator_sweep,
    traceout_validation,
};

std::string to_string(ScenarioKind k);

struct ScenarioConfig {
    ScenarioKind kind{ScenarioKind::direct_free_space};
    UnitSystem units{};
    EmitterRoster emitters;
    std::optional<LayerStack> stack;
    std::vector<Mediator> mediators;
    std::optional<DiscreteModeSet> modes;
    std::vector<double> rho_over_lambda; // direct_free_space grid
    std::vector<double> omega_grid;      // truncation / mediator sweep
    std::vector<double> eps_over_omega;  // traceout grid
    double omega_ref{1.0};
    int n_max{30};
    std::string output_dir{"out"};

    nlohmann::json canonical; // canonicalized echo of the input
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationResult {
    bool ok{false};
    std::vector<ValidationIssue> issues;
    std::optional<ScenarioConfig> config;
};

// Parse + validate without running anything. Parse errors and schema
// violations are collected as field-level issues.
ValidationResult validate_config(const std::filesystem::path& path);
ValidationResult validate_config_text(const std::string& text);

struct OutputFile {
    std::string name;
    std::string checksum; // fnv1a-64 hex of the file bytes
};

struct RunReport {
    std::string config_hash;
    nlohmann::json config_echo;
    std::vector<OutputFile> outputs;
    double wall_clock_seconds{0.0};
    std::string version{library_version};
    bool converged{true};
    std::string convergence_message;

    nlohmann::json to_json() const;
};

// Execute a validated scenario. Throws ValidationFailure-free: call after
// validate_config succeeded. ConvergenceError is caught internally, partial
// outputs are kept and the report is flagged (exit code 3 at the CLI).
RunReport run_scenario(const ScenarioConfig& cfg,
                       const std::filesystem::path& output_dir, int threads);

std::string fnv1a_hex(const std::string& bytes);

} // namespace vcoup
