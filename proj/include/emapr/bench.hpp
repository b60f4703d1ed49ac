#pragma once

#include "emapr/problems.hpp"
#include "emapr/timeloop.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace emapr {

enum class ProblemKind { PotentialFlow, Gresho, LatticeVortex, Manufactured };

std::string_view problem_name(ProblemKind kind);
ProblemKind parse_problem(std::string_view name);

struct BenchmarkConfig {
    ProblemKind problem = ProblemKind::PotentialFlow;
    ElementKind element = ElementKind::BernardiRaugel;
    double alpha = 0.0;
    double nu = 5e-4;
    double dt = 1e-3;
    double T = 0.1;

    int n = 8;               ///< cells per side of the coarsest uniform mesh
    int levels = 1;          ///< uniform refinements for convergence studies
    std::string mesh_file;   ///< replaces the uniform mesh when set
    double perturb = 0.0;    ///< interior vertex jitter relative to the local mesh size
    std::uint64_t seed = 1;

    ConvectionForm form = ConvectionForm::Emapr;
    TimeScheme scheme = TimeScheme::BDF2;
    NonlinearSettings nonlinear{NonlinearMethod::Extrapolated, 1e-6, 50};
    double gradient_amplitude = 0.0;  ///< f = amplitude * grad chi for the potential flow
    InitialCondition initial = InitialCondition::Interpolation;
    int record_every = 1;
    std::string output_dir = ".";
};

/// Parameters of the published runs for each problem.
BenchmarkConfig default_config(ProblemKind problem);

/// Throws std::invalid_argument on alpha < 0, dt <= 0, T < dt and similar.
void validate(const BenchmarkConfig& config);

/// EMAPR_OUTPUT_DIR overrides config.output_dir.
std::string resolve_output_dir(const BenchmarkConfig& config);

ExactSolution exact_solution(const BenchmarkConfig& config);
BoundaryMode boundary_mode(ProblemKind problem);

/// Mesh of refinement level `level` (0 = coarsest).
Mesh make_mesh(const BenchmarkConfig& config, int level = 0);

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    std::vector<StepLog> steps;
    int num_cells = 0;
    int velocity_dofs = 0;
    int pressure_dofs = 0;
    double h = 0.0;
    double seconds = 0.0;
};

using RecordCallback = std::function<void(const DiagnosticsRecord&)>;

/// Records at t = 0, every record_every steps and at the final step.
RunResult run_simulation(const BenchmarkConfig& config, std::shared_ptr<const Mesh> mesh,
                         const RecordCallback& on_record = {});

struct ConvergenceStudy {
    std::vector<RunResult> levels;
    std::vector<std::optional<double>> eoc_L2_u, eoc_L2_Pu, eoc_H1_u, eoc_L2_p;
};

/// Runs levels 0..levels-1 and computes rates from the final-time errors.
ConvergenceStudy run_convergence(const BenchmarkConfig& config);

/// Example 1: potential flow convergence study.
ConvergenceStudy run_potential_flow(const BenchmarkConfig& config);
/// Example 2: Gresho vortex conservation time series.
RunResult run_gresho(const BenchmarkConfig& config);
/// Example 3: lattice vortex error growth.
RunResult run_lattice_vortex(const BenchmarkConfig& config);

void write_records_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);
void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study);

/// Key/value view of a config; keys as in the config file.
std::map<std::string, std::string> config_to_map(const BenchmarkConfig& config);
/// Throws std::invalid_argument on an unknown key or a malformed value.
void apply_setting(BenchmarkConfig& config, const std::string& key, const std::string& value);
/// "key = value" lines, '#' starts a comment. Throws on syntax errors and duplicate keys.
std::map<std::string, std::string> read_config_file(const std::string& path);
/// Starts from default_config of settings["problem"] (potential_flow if absent) and applies the rest.
BenchmarkConfig make_config(const std::map<std::string, std::string>& settings);

}  // namespace emapr
