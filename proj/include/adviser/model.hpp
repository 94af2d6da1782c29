#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adviser/labels.hpp"
#include "adviser/taxonomy.hpp"

namespace adviser {

/// Feed-forward ReLU network over instance features; output layer is linear
/// with exactly 34 logits.
struct AdviserNet {
    std::vector<int> widths;                   // [input, hidden..., 34]
    std::vector<std::vector<double>> weights;  // per layer, row-major (out x in)
    std::vector<std::vector<double>> biases;   // per layer

    /// Fan-in-scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for both
    /// weights and biases, deterministic in the seed.
    static AdviserNet init(const std::vector<int>& widths, std::uint64_t seed);
    static AdviserNet zeros(const std::vector<int>& widths);

    int input_dim() const { return widths.front(); }
    int output_dim() const { return widths.back(); }
    int num_layers() const { return static_cast<int>(weights.size()); }
};

enum class LossKind { masked_mse, masked_cross_entropy };
enum class TrainMode { classification, regression_degrees, regression_radians };

LossKind loss_kind_from_string(std::string_view s);
TrainMode train_mode_from_string(std::string_view s);
std::string_view to_string(LossKind k);
std::string_view to_string(TrainMode m);

/// Raw logits; no masking. Throws on feature-dimension mismatch.
std::vector<double> forward(const AdviserNet& net, std::span<const double> features);

/// Softmax restricted to the class slice; entries outside the slice are
/// exactly 0, slice entries sum to 1.
std::vector<double> class_masked_probabilities(std::span<const double> logits, ObjectClass cls,
                                               const KeypointTaxonomy& tax);

/// One training example: features plus the target for the configured mode
/// (soft label for classification, per-keypoint errors for regression).
struct Example {
    std::vector<double> features;
    ObjectClass cls = ObjectClass::bus;
    std::vector<double> target;          // size 34
    std::vector<std::uint8_t> visible;   // size 34
};

std::vector<Example> make_examples(std::span<const AdviseeRecord> records,
                                   const KeypointTaxonomy& tax, const LabelConfig& label_config,
                                   TrainMode mode);

/// Per-example loss on raw logits.
///   classification + masked_mse: mean over the class slice of
///     (masked probability - soft label)^2
///   classification + masked_cross_entropy: -sum over visible entries of
///     label * log(masked probability), evaluated via log-sum-exp
///   regression (either kind field): mean over visible entries of
///     (logit - error target)^2
double loss(std::span<const double> net_output, std::span<const double> target, ObjectClass cls,
            std::span<const std::uint8_t> visible, LossKind kind, TrainMode mode,
            const KeypointTaxonomy& tax);

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const AdviserNet& net);
    void add(const Gradients& other);
    void scale(double s);
};

/// Analytic gradient of the mean batch loss. Examples are processed in fixed
/// blocks whose partial sums are reduced in block order, so the result is
/// bitwise independent of thread count; batch_gradients runs the blocks under
/// OpenMP, batch_gradients_serial is the same arithmetic without it.
Gradients batch_gradients(const AdviserNet& net, std::span<const Example> batch, LossKind kind,
                          TrainMode mode, const KeypointTaxonomy& tax,
                          double* mean_loss = nullptr);
Gradients batch_gradients_serial(const AdviserNet& net, std::span<const Example> batch,
                                 LossKind kind, TrainMode mode, const KeypointTaxonomy& tax,
                                 double* mean_loss = nullptr);

struct TrainConfig {
    double learning_rate = 1e-2;
    double momentum = 0.9;
    double weight_decay = 5e-4;   // weights only, never biases
    double lr_decay = 0.95;
    int lr_decay_every = 5;       // epochs
    int batch_size = 256;
    int epochs = 100;
    LossKind loss = LossKind::masked_mse;
    TrainMode mode = TrainMode::classification;
    std::uint64_t seed = 0;
    std::vector<int> hidden = {128, 64};

    void validate() const;
};

/// lr for a 0-indexed epoch: learning_rate * lr_decay^(epoch / lr_decay_every).
double lr_at_epoch(const TrainConfig& config, int epoch);

struct TrainResult {
    AdviserNet net;
    std::vector<double> epoch_loss;  // mean batch loss per epoch
};

/// SGD with momentum: v <- momentum*v - lr*(g + weight_decay*w); w <- w + v.
/// Batches come from a seeded shuffle each epoch; all epochs run (no early
/// stopping). Throws naming the epoch if the loss goes non-finite.
TrainResult train(AdviserNet net, std::span<const Example> dataset, const TrainConfig& config,
                  const KeypointTaxonomy& tax);

// ---- checkpointing ----------------------------------------------------------

struct Checkpoint {
    AdviserNet net;
    TrainMode mode = TrainMode::classification;
};

/// Text format with hexfloat parameters: round-trips bitwise.
void save_checkpoint(const std::string& path, const AdviserNet& net, TrainMode mode);
std::string checkpoint_to_string(const AdviserNet& net, TrainMode mode);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace adviser
