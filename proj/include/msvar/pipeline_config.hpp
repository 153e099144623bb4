#pragma once

#include "msvar/consumption.hpp"
#include "msvar/data_model.hpp"
#include "msvar/estimation.hpp"
#include "msvar/test_report.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace msvar {

/// Documented configuration key. Keys use underscores in files and dashes
/// on the command line (out_dir <-> --out-dir).
struct ConfigKey {
    std::string name;
    std::string default_value;
    std::string help;
    bool is_flag = false;  ///< boolean; a bare command-line flag means true
};

[[nodiscard]] const std::vector<ConfigKey>& config_keys();

using ConfigMap = std::map<std::string, std::string>;

/// "key = value" lines; '#' starts a comment; blank lines ignored. Dashes in
/// keys are normalised to underscores. Throws Configuration naming the line
/// on syntax errors and unknown keys.
[[nodiscard]] ConfigMap parse_config_text(const std::string& text);
[[nodiscard]] ConfigMap load_config_file(const std::filesystem::path& path);

struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path out_dir = "out";
    CsvSchema schema;

    // Variable roles.
    std::string consumption = "HC";
    std::string income = "HDI";
    std::string rate = "RATE";
    std::string mpc_name = "MPC";
    std::string impc_name = "IMPC";
    BetaFormula beta_formula = BetaFormula::standard;
    std::vector<std::string> variables{"HC", "HDI", "IMPC", "MPC", "CGD", "EXP", "REV", "SUB"};
    std::vector<std::string> entities;  ///< empty = every entity in the panel

    // Tests.
    DeterministicSpec test_deterministic = DeterministicSpec::constant;
    int test_max_lag = -1;  ///< -1 = automatic Schwarz bound
    std::vector<std::string> eg_regressors;  ///< empty = every other VAR variable
    DeterministicSpec eg_deterministic = DeterministicSpec::constant;

    // Model and fit.
    MsVarSpec model;  ///< n_vars follows `variables`
    bool use_covid = true;
    FitOptions fit;

    // Dynamics.
    int horizons = 24;
    std::optional<int> regime;  ///< 0-based; empty = ergodic-weighted covariance
    std::vector<std::string> ordering;  ///< empty = `variables`
    bool allow_unstable = false;

    // Comparison tables.
    std::vector<std::string> compare_rows;  ///< empty = first four variables
    std::vector<std::string> fiscal_vars;   ///< empty = remaining variables

    // Simulation.
    std::filesystem::path sim_params;  ///< saved fit JSON used as the truth
    std::string sim_preset = "recovery";
    int sim_T = 400;
    int sim_burn_in = 100;
    int sim_replications = 0;
    std::string sim_exog = "none";
    int sim_entities = 1;
    Period sim_start{2000, 1};
};

/// Applies defaults for absent keys. Throws Configuration on bad values.
[[nodiscard]] PipelineConfig make_config(const ConfigMap& values);

/// Inline "1100;0110;..." (rows separated by ';', lags by '|') or a file
/// with one row per line and blank lines between lags.
[[nodiscard]] std::vector<Eigen::MatrixXi> parse_lag_mask(const std::string& value, int n_vars);

[[nodiscard]] std::vector<std::string> split_list(const std::string& value);

}  // namespace msvar
