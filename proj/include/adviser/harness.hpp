#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adviser/model.hpp"
#include "adviser/selection.hpp"

namespace adviser {

/// Accuracy threshold: errors below 30 degrees (pi/6) count as correct.
inline constexpr double kAccuracyThresholdDeg = 30.0;

struct Cell {
    bool present = false;
    double acc = 0.0;     // percent
    double median = 0.0;  // degrees
    double acc_std = 0.0;
    double median_std = 0.0;
};

struct TableRow {
    std::string name;
    bool external = false;  // literal reference constants, not evaluated policies
    std::array<Cell, kNumClasses> per_class{};
    Cell mean;
};

struct ResultsTable {
    std::string title;
    bool has_std = false;
    std::vector<TableRow> rows;
};

struct ClassStats {
    std::array<Cell, kNumClasses> per_class{};
    Cell mean;
};

/// Per-record score provider for the adviser policies (masked probabilities,
/// or predicted errors in regression mode).
using ScoreFn = std::function<std::vector<double>(const AdviseeRecord&)>;

ScoreFn make_net_scorer(AdviserNet net, TrainMode mode, const KeypointTaxonomy& tax);

/// Per-class accuracy and median of the chosen keypoint's true error; each
/// record contributes exactly one error. The expected policy contributes the
/// record's mean error and mean below-threshold indicator instead. Classes
/// with no test records are reported absent. The mean cell is the unweighted
/// mean over present classes.
ClassStats evaluate_policy(const Policy& policy, std::span<const AdviseeRecord> test_records,
                           const KeypointTaxonomy& tax, const ScoreFn* scorer = nullptr);

struct PolicyRowSpec {
    std::string name;
    Policy policy;
    ScoreFn scorer;  // adviser rows only
};

/// Evaluates every row on the same records and emits a table (external
/// reference rows first when requested). Verifies the oracle sandwich.
ResultsTable build_table(std::string title, std::span<const AdviseeRecord> test_records,
                         const KeypointTaxonomy& tax, const std::vector<PolicyRowSpec>& rows,
                         bool include_external_rows);

/// Throws std::logic_error if any evaluated policy row escapes the
/// [oracle_upper, oracle_lower] envelope on accuracy or median error.
void verify_oracle_sandwich(const ResultsTable& table);

std::string render_text(const ResultsTable& table);
std::string render_csv(const ResultsTable& table);

struct HarnessOptions {
    LabelConfig label;
    TrainConfig train;
    bool include_external_rows = true;  // full-table shape only
};

/// The standard policy rows for one record set: lower bound, expected, both
/// priors (built from the test records), optional adviser rows, upper bound.
std::vector<PolicyRowSpec> standard_rows(std::span<const AdviseeRecord> test_records,
                                         const KeypointTaxonomy& tax);

struct FullExperimentResult {
    ResultsTable table;
    AdviserNet net;
    std::vector<double> epoch_loss;
};

/// Trains the adviser on the training records, evaluates every policy on the
/// test records (priors are built from the test records).
FullExperimentResult run_full_experiment(std::span<const AdviseeRecord> train_records,
                                         std::span<const AdviseeRecord> test_records,
                                         const HarnessOptions& options,
                                         const KeypointTaxonomy& tax);

/// Repeated seeded split fraction/(1-fraction) experiments over one record
/// set; per-cell mean and population standard deviation across repetitions.
ResultsTable run_small_protocol(std::span<const AdviseeRecord> records,
                                const HarnessOptions& options, int repetitions,
                                double split_fraction, std::uint64_t seed,
                                const KeypointTaxonomy& tax);

/// Classification vs regression-degrees vs regression-radians advisers with
/// identical seeds and splits, evaluated identically.
ResultsTable compare_classification_regression(std::span<const AdviseeRecord> train_records,
                                               std::span<const AdviseeRecord> test_records,
                                               const HarnessOptions& options,
                                               const KeypointTaxonomy& tax);

/// One adviser row per temperature, shared baselines, splits and seed.
ResultsTable temperature_sweep(std::span<const AdviseeRecord> train_records,
                               std::span<const AdviseeRecord> test_records,
                               const HarnessOptions& options, std::span<const double> temperatures,
                               const KeypointTaxonomy& tax);

}  // namespace adviser
