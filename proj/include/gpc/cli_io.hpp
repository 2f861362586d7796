#pragma once

#include "gpc/analysis.hpp"
#include "gpc/error.hpp"
#include "gpc/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gpc {

inline constexpr int kSchemaVersion = 1;
std::string_view tool_version();

enum class Task { Surface, Log, Measure, Verify, Counterexample };

std::string_view task_name(Task task);

/// Parsed and validated problem file (schema 1, JSON). See README for the
/// field reference.
struct ProblemFile {
    Task task = Task::Surface;
    int dimension = 0;
    Mat generators;
    Mat normals;
    std::optional<Vec> ref_dir;
    Mat omega;                        // may be empty for counterexample
    std::vector<double> mu;
    SolveOptions solver;
    MCConfig mc;
    std::uint64_t seed = 1;

    std::vector<double> h;            // measure, verify
    std::optional<std::vector<double>> h_other;  // verify: second shape
    std::optional<std::vector<double>> f;        // verify: perturbation
    std::optional<std::vector<double>> steps;    // verify: difference steps
    double t = 0.5;                   // verify: interpolation parameter
    std::optional<Vec> b;             // counterexample, scan
    MeasureKind kind = MeasureKind::Surface;
    double rho = 0.3;
    double scan_min = 0.05;
    double scan_max = 5.0;
    int scan_count = 100;

    ConvexCone cone() const;
    DirectionSet directions() const;
    /// MCConfig with the problem seed applied.
    MCConfig sampling() const;
};

/// Throws ParseError ("line L, field F: ...") or ValidationError.
ProblemFile parse_problem_text(std::string_view text);
ProblemFile parse_problem(const std::filesystem::path& path);

/// Applies `key = value` (dotted path, JSON value; bare words become
/// strings) to the problem and revalidates.
ProblemFile override_field(const ProblemFile& problem, std::string_view key, std::string_view value);

/// Canonical JSON of the effective problem; its hash names the run.
std::string canonical_json(const ProblemFile& problem);
std::string problem_digest(const ProblemFile& problem);

struct RunRecord {
    std::string digest;
    std::filesystem::path directory;
    std::string report_json;  // contents of report.json
    int exit_code = 0;
    bool reused = false;      // another writer created the directory first
};

/// Root for run directories: GPC_RUN_ROOT, else ./runs.
std::filesystem::path default_run_root();

/// Executes the problem and persists report.json, run.json and CSV traces
/// under root/<digest>. The directory appears atomically or not at all.
RunRecord run(const ProblemFile& problem, const std::filesystem::path& root);

/// Process exit status for a library error: 2 not converged, 3 infeasible,
/// 4 invalid input, 1 anything else.
int exit_code_for(ErrorCode code);

/// Single-facet scan t ↦ (g, h, S, C) for the shape [(C, {b}, t)]; g and h
/// come from the section profile, S and C from hyperplane sampling.
std::string emit_scan(const ConvexCone& cone, const Vec& b, const std::vector<double>& t_grid, const MCConfig& mc);

std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace gpc
