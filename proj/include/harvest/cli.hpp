#pragma once

// Command implementations behind the `harvest` executable. Each returns a
// process exit code:
//   0 success          1 config/usage error     2 pull-in refusal
//   3 numerical failure 4 scenario expectation failed
//   5 fit non-convergence 6 empty feasible set

#include <string>

namespace harvest::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int pull_in = 2;
inline constexpr int numerical = 3;
inline constexpr int expectation = 4;
inline constexpr int fit = 5;
inline constexpr int infeasible = 6;
}  // namespace exit_code

/// Run the configured transient simulation; writes the series CSV to
/// out_path and key=value summary lines to out_path + ".summary".
int cmd_simulate(const std::string& config_path, const std::string& out_path);

/// Materialize a preset scenario into out_dir, run it, and check its
/// expectations; one PASS/FAIL line per expected quantity.
int cmd_scenario(const std::string& name, const std::string& out_dir);

/// One simulation per grid point of a numeric config key; grid_spec is
/// "lin:min:max:count" or "log:min:max:count". Per-row failures land in the
/// error column and the sweep continues.
int cmd_sweep(const std::string& config_path, const std::string& sweep_key,
              const std::string& grid_spec, const std::string& out_path, int threads);

/// Fit a periodic profile to a measurement CSV (header z_m,c_f); writes the
/// parameters to out_path and the model curve to out_path + ".curve.csv".
int cmd_capfit(const std::string& measurement_csv, const std::string& kind,
               const std::string& out_path);

/// Grid-search optimizer; writes the ranked candidate table to out_path and
/// the best design as a runnable config to out_path + ".best.cfg".
int cmd_optimize(const std::string& config_path, const std::string& constraints_path,
                 const std::string& out_path);

}  // namespace harvest::cli
