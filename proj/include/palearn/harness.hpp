#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "palearn/datagen.hpp"
#include "palearn/model.hpp"
#include "palearn/patient_aware.hpp"

namespace palearn {

struct ExperimentConfig {
    // dataset source: exactly one of the two
    std::optional<CohortSpec> generate;
    std::string train_csv, test_csv;

    StrategyKind strategy = StrategyKind::Random;
    bool patient_aware = false;
    PatientPick patient_pick = PatientPick::Informed;
    bool warm_start = false;  // keep weights across rounds instead of re-initializing
    std::size_t initial_budget = 128;
    std::size_t per_round_k = 128;
    std::size_t num_rounds = 0;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    ModelConfig model;
    std::string out_dir;
};

// Flat key=value config file ('#' comments). Unknown keys are errors; keys
// are documented in the README. Throws ConfigError with the line number.
ExperimentConfig parse_experiment_config(const std::string& path);

// Same format, unprefixed CohortSpec keys (num_classes = 3, ...).
CohortSpec parse_cohort_spec_file(const std::string& path);

// Generates or loads the configured train/test pair.
Cohort resolve_datasets(const ExperimentConfig& cfg);

struct RoundRecord {
    std::size_t round = 0;
    std::size_t labeled_count = 0;  // b0 + round * k
    double test_accuracy = 0.0;
    std::size_t epochs_run = 0;
    bool threshold_reached = false;
    std::vector<int> selected_ids;  // chosen at this round; empty for the final record
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<RoundRecord> rounds;
    std::string error;  // empty = success

    bool ok() const { return error.empty(); }
};

// Runs the full acquisition loop for every seed: seed the initial pool, then
// per round train-to-threshold, evaluate, select, label; one final
// train+evaluate closes the curve (num_rounds + 1 records). Per-seed rng
// streams are split by purpose so selection options never perturb model
// initialization. A failing seed records its error instead of aborting the
// grid. Throws ConfigError when the config is invalid against the datasets.
std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                    const Dataset& test);

struct SummaryRow {
    std::size_t round = 0;
    std::size_t labeled_count = 0;
    double mean_acc = 0.0;
    double std_error = 0.0;  // sample std / sqrt(num seeds); 0 for one seed
};

// Per-round mean and standard error across seeds. Throws ShapeError when the
// curves are ragged or disagree on labeled counts.
std::vector<SummaryRow> summarize(const std::vector<std::vector<RoundRecord>>& per_seed);

// Writes curve_seed<seed>.csv and selections_seed<seed>.csv per successful
// seed, summary.csv across them, and failures.csv when any seed failed.
// All numeric output is full-precision decimal with LF endings.
void write_experiment_outputs(const ExperimentConfig& cfg, const Dataset& train,
                              const std::vector<SeedRun>& runs, const std::string& out_dir);

struct NamedCurve {
    std::uint64_t seed = 0;
    std::vector<RoundRecord> rounds;
};

// Reads every curve_seed<seed>.csv in a directory, ascending by seed.
std::vector<NamedCurve> load_curves(const std::string& dir);

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

}  // namespace palearn
