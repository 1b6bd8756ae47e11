#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lorenz/fixed_point.hpp"

namespace lorenz::cli {

inline constexpr const char* output_dir_env = "LORENZ_FP_OUTPUT_DIR";
inline constexpr int result_schema_version = 1;

enum ExitCode : int {
    exit_ok = 0,
    exit_other = 1,
    exit_config = 2,
    exit_bracket = 3,
    exit_convergence = 4,
    exit_verification = 5,
};

int exit_code_for(ErrorKind kind);

struct RunConfig {
    double rho = 2.0;
    int degree = FuncRep::default_degree;
    double iterate_tol = default_iterate_tol;
    double tol_r = default_tol_r;
    double bracket_lo = working_r_lo;
    double bracket_hi = working_r_hi;
    int max_iter = 200;
    int grid_out = 200;
    std::filesystem::path output_dir = ".";
    std::set<std::string> emit = {"json"};
    bool trace = false;
    bool strict_class = false;

    /// Throws ErrorKind::config naming the offending field.
    void validate() const;
    FixedPointOptions options() const;
};

/// flag (if given) > environment > ".".
std::filesystem::path resolve_output_dir(const std::string& flag_value);

/// Shortest decimal that parses back to the same double; empty for NaN.
std::string format_real(double x);

/// Full result document (schema v1). wall_time is the only nondeterministic field.
std::string result_json(const RunConfig& cfg, const SolveResult& s, const std::vector<Check>& checks,
                        double wall_time_s);
std::string error_json(const RunConfig& cfg, const Error& e);

/// Rows x, f, g, U, V, N_Z, N_W on grid_out points of [-1, r]; empty cells where undefined.
std::string fixed_point_csv(const SolveResult& s, int grid_out);

struct SweepCell {
    double rho = 0.0;
    GapSample sample;
};

/// Header `rho,r,lambda,mu,gap,error` then one row per cell in input order.
std::string sweep_csv(const std::vector<SweepCell>& cells);

/// Evaluate every (rho, r) cell; failures are recorded in the cell. Rows keep
/// the rho-major input order whatever the completion order.
std::vector<SweepCell> run_sweep(const std::vector<double>& rhos, const std::vector<double>& rs,
                                 const FixedPointOptions& opt, int jobs);

struct StoredResult {
    RunConfig config;
    EpsteinPair pair;
    double r_star = 0.0;
    double lambda_star = 0.0;
};

/// Parse a result.json; throws ErrorKind::parse on malformed or schema-invalid input.
StoredResult parse_result(const std::string& text);

int cmd_solve(const RunConfig& cfg);
/// Re-derive scalings, residuals and invariant checks from the stored samples.
/// tol_r overrides the stored matching tolerance when given.
int cmd_verify(const std::filesystem::path& result_path, const std::filesystem::path& output_dir,
               std::optional<double> tol_r, bool strict_class);
int cmd_sweep(const std::vector<double>& rhos, const std::vector<double>& rs, const RunConfig& cfg, int jobs);

/// Entry point used by the lorenz_fp tool.
int run(int argc, char** argv);

}  // namespace lorenz::cli
