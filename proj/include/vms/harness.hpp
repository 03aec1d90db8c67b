#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vms/analysis.hpp"
#include "vms/solvers.hpp"

namespace vms {

inline constexpr const char* library_version = "1.0.0";

enum class ProblemKind { stationary, evolutive, tau_table };
enum class StudyKind { solution, convergence };
enum class ReferencePolicy { none, exact, exact_rothe, fine_galerkin, converged_spectral };
enum class SweepKind { none, h, k, M };

// Raised for malformed config text; carries the 1-based line number.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

// Raised when a config is well formed but invalid; names the offending field.
class ConfigValidationError : public std::runtime_error {
public:
    ConfigValidationError(const std::string& field, const std::string& what);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    std::string name = "custom";
    ProblemKind kind = ProblemKind::stationary;
    StudyKind study = StudyKind::solution;

    double gamma = 0.0;
    double c = 0.0;
    double mu = 1.0;
    int n_elements = 0;

    double k = 0.0;
    double T = 0.0;
    int steps = 0;           // if > 0, T = steps * k
    double cfl_ratio = 0.0;  // if > 0, k is chosen so that CFL = cfl_ratio * CFL_bound

    // galerkin | spectral-vms:M | spectral-vms (M from the sweep) | tau-vms:M | tau-vms:exact
    std::vector<std::string> modes;

    double source_constant = 0.0;
    double source_slope = 0.0;
    double left = 0.0;
    double right = 1.0;
    InitialKind initial = InitialKind::box;

    ReferencePolicy reference = ReferencePolicy::none;
    int reference_m = 0;
    std::vector<Comparison> comparisons;

    SweepKind sweep = SweepKind::none;
    std::vector<double> sweep_values;

    std::vector<double> peclet_values;
    std::vector<double> asymptotic_k;

    void validate() const;
    double time_step() const;
    double final_time() const;
    StationaryProblem stationary_problem() const;
    EvolutiveProblem evolutive_problem(double k_override = 0.0) const;

    bool operator==(const RunConfig&) const = default;
};

// Canonical key = value text; parse(serialize(c)) == c.
std::string serialize(const RunConfig& c);
std::string serialize(const std::vector<RunConfig>& configs);
std::vector<RunConfig> parse_config(const std::string& text);
std::vector<RunConfig> load_config(const std::string& path);

SolverMode parse_mode(const std::string& token, std::optional<int> sweep_m = std::nullopt);

std::vector<std::string> preset_names();
std::vector<RunConfig> preset_configs(const std::string& name);

class UnknownPreset : public std::invalid_argument {
public:
    explicit UnknownPreset(const std::string& name) : std::invalid_argument("unknown preset '" + name + "'") {}
};

struct CsvArtifact {
    std::string filename;
    std::vector<std::string> provenance;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render() const;
    void write(const std::string& dir) const;
};

std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> column(const std::string& name) const;
};
CsvTable parse_csv(const std::string& text);

struct CurveData {
    std::string label;
    std::vector<std::vector<double>> levels;
    std::vector<double> overshoot;        // per level
    std::vector<double> error_nodal_max;  // per level, empty without a reference
    double dense_max_error = 0.0;         // stationary with exact reference only
};

struct SolutionData {
    std::vector<double> x;
    std::vector<double> times;
    std::optional<CurveData> reference;
    std::vector<CurveData> curves;

    const CurveData& curve(const std::string& label) const;
};

struct ConvergenceData {
    std::string mode;
    std::vector<Comparison> comparisons;
    std::vector<ConvergenceStudy> studies;  // one per comparison

    const ConvergenceStudy& study(Comparison c) const;
};

struct TauRow {
    double peclet, c;
    int M;
    double tau_exact, tau_truncated;
};
struct TauAsymptoticRow {
    double k, tau_exact, asymptote;
};

struct TauTableData {
    std::vector<TauRow> rows;
    std::vector<TauAsymptoticRow> asymptotic;
    std::vector<ConvergenceStudy> truncation;  // per peclet, parameter M
    std::optional<ConvergenceStudy> asymptotic_study;
};

struct RunResult {
    RunConfig config;
    std::optional<SolutionData> solution;
    std::optional<ConvergenceData> convergence;
    std::optional<TauTableData> tau;
    std::vector<CsvArtifact> artifacts;
};

RunResult execute(const RunConfig& config);
std::vector<RunResult> run_preset(const std::string& name);
std::vector<RunResult> run_config(const std::string& path);

}  // namespace vms
