#pragma once

#include "msvar/pipeline_config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace msvar {

/// Result of one CLI command. Warnings never change the exit code.
struct CommandOutcome {
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
    std::vector<std::filesystem::path> files;  ///< written, in write order

    [[nodiscard]] int exit_code() const noexcept { return errors.empty() ? 0 : 1; }
};

/// Loads `config.input`, restricts it to the configured entities, and adds
/// the MPC / IMPC series wherever they are absent but derivable.
[[nodiscard]] PanelDataset prepare_panel(const PipelineConfig& config, std::vector<std::string>& warnings);

/// Augmented dataset with freshly derived MPC and IMPC: <out>/derived.csv.
CommandOutcome cmd_derive(const PipelineConfig& config);
/// Unit-root tables for levels and first differences plus Engle-Granger
/// tables, per entity and combined.
CommandOutcome cmd_test(const PipelineConfig& config);
/// Per entity: fit.json, fit_table.csv, fit_table.txt, regime_probs.csv.
CommandOutcome cmd_fit(const PipelineConfig& config);
/// Per entity: fevd.csv/.txt, irf.csv, irf_<shock>.svg, dynamics.json.
/// Reuses <out>/<entity>/fit.json when present, otherwise fits first.
CommandOutcome cmd_analyze(const PipelineConfig& config);
/// Cross-entity COVID-loading and fiscal-coefficient comparison tables.
CommandOutcome cmd_compare(const PipelineConfig& config);
/// Simulated panel (and recovery report when sim_replications > 0).
CommandOutcome cmd_simulate(const PipelineConfig& config);

}  // namespace msvar
