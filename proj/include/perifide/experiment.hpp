#pragma once

#include "perifide/contin.hpp"
#include "perifide/trivial.hpp"

#include <json.hpp>
#include <optional>
#include <string>

namespace perifide {

enum class Task { trivial_branch, continuation, classify, fold_hunt, table };
Task parse_task(const std::string& s);
std::string to_string(Task t);

struct ExperimentConfig {
    std::string name;
    Task task = Task::trivial_branch;
    ModelSpec model;
    double L = 2.0; // Ω = [−L/2, L/2]

    // task parameters
    int modes = 5;
    double alpha_min = -1e300;
    double alpha_max = 1e300;
    double alpha = 0.0;                  // seed / classification parameter
    std::optional<double> seed_value;    // constant initial state
    std::optional<int> from_mode;        // start on the branch bifurcating at α_i⁰
    double switch_eps = 1e-2;
    int direction = 1;
    double step = 0.05;
    int k_max = 400;
    std::string output_dir = "out";
};

// validation errors carry the TOML line of the offending field
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");

Model build_model(const ExperimentConfig& c);

// dispatches the task, writes the artifacts into dir and returns report.json's content
nlohmann::json run_experiment(const ExperimentConfig& c, const std::string& dir);

// spectrum rows: i, lambda_i, alpha_i0, parity, g20, kind
nlohmann::json spectrum_table(const Model& m, int count, double aL = 0.0);

struct VerifyEntry {
    std::string path;
    double expected = 0.0;
    double measured = 0.0;
    double tol = 0.0;
    std::string mode; // "rel" | "abs" | "equals"
    std::string expected_text, measured_text;
    bool pass = false;
};

// compares a report against an expectation file (list of {path, value|equals, rel|abs})
std::vector<VerifyEntry> check_expectations(const nlohmann::json& report, const nlohmann::json& expect);

inline constexpr int report_schema_version = 1;

} // namespace perifide
