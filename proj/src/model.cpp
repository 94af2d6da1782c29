#include "adviser/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "adviser/rng.hpp"

namespace adviser {

namespace {

constexpr std::uint64_t kTagInit = 0x10;
constexpr std::uint64_t kTagShuffle = 0x11;

// fixed block size for the ordered gradient reduction; results must not
// depend on thread count
constexpr std::size_t kGradBlock = 16;

void check_widths(const std::vector<int>& widths) {
    if (widths.size() < 2) throw std::invalid_argument("net needs at least input and output widths");
    for (int w : widths)
        if (w < 1) throw std::invalid_argument("net widths must be positive");
    if (widths.back() != kNumKeypoints)
        throw std::invalid_argument("net output width must be " + std::to_string(kNumKeypoints));
}

struct ForwardTrace {
    // acts[0] = input, acts[l+1] = post-activation output of layer l
    // (hidden layers ReLU, final layer linear)
    std::vector<std::vector<double>> acts;
};

ForwardTrace forward_trace(const AdviserNet& net, std::span<const double> features) {
    if (static_cast<int>(features.size()) != net.input_dim())
        throw std::invalid_argument("feature dimension mismatch: net expects " +
                                    std::to_string(net.input_dim()) + ", got " +
                                    std::to_string(features.size()));
    ForwardTrace t;
    t.acts.resize(static_cast<std::size_t>(net.num_layers()) + 1);
    t.acts[0].assign(features.begin(), features.end());
    for (int l = 0; l < net.num_layers(); ++l) {
        const int in = net.widths[static_cast<std::size_t>(l)];
        const int out = net.widths[static_cast<std::size_t>(l) + 1];
        const auto& W = net.weights[static_cast<std::size_t>(l)];
        const auto& b = net.biases[static_cast<std::size_t>(l)];
        const auto& x = t.acts[static_cast<std::size_t>(l)];
        auto& y = t.acts[static_cast<std::size_t>(l) + 1];
        y.assign(static_cast<std::size_t>(out), 0.0);
        for (int o = 0; o < out; ++o) {
            double s = b[static_cast<std::size_t>(o)];
            const double* row = &W[static_cast<std::size_t>(o) * static_cast<std::size_t>(in)];
            for (int i = 0; i < in; ++i) s += row[i] * x[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(o)] = (l + 1 < net.num_layers()) ? std::max(0.0, s) : s;
        }
    }
    return t;
}

// dL/dlogits for one example; also returns the loss
std::vector<double> logit_gradient(std::span<const double> logits, const Example& ex,
                                   LossKind kind, TrainMode mode, const KeypointTaxonomy& tax,
                                   double* loss_out) {
    std::vector<double> g(static_cast<std::size_t>(kNumKeypoints), 0.0);
    const IndexRange slice = tax.class_slice(ex.cls);

    if (mode != TrainMode::classification) {
        // MSE on raw logits over the visible entries
        int n_vis = 0;
        for (int k = 0; k < kNumKeypoints; ++k)
            if (ex.visible[static_cast<std::size_t>(k)]) ++n_vis;
        double L = 0.0;
        for (int k = 0; k < kNumKeypoints; ++k) {
            if (!ex.visible[static_cast<std::size_t>(k)]) continue;
            const double d = logits[static_cast<std::size_t>(k)] - ex.target[static_cast<std::size_t>(k)];
            L += d * d;
            g[static_cast<std::size_t>(k)] = 2.0 * d / n_vis;
        }
        if (loss_out) *loss_out = L / n_vis;
        return g;
    }

    // class-masked softmax
    std::vector<double> p = class_masked_probabilities(logits, ex.cls, tax);

    if (kind == LossKind::masked_mse) {
        const int m = slice.size();
        double L = 0.0;
        // dL/dp then the softmax Jacobian restricted to the slice
        std::vector<double> dp(static_cast<std::size_t>(m), 0.0);
        double dot = 0.0;
        for (int j = 0; j < m; ++j) {
            const int k = slice.begin + j;
            const double d = p[static_cast<std::size_t>(k)] - ex.target[static_cast<std::size_t>(k)];
            L += d * d;
            dp[static_cast<std::size_t>(j)] = 2.0 * d / m;
            dot += dp[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(k)];
        }
        for (int j = 0; j < m; ++j) {
            const int k = slice.begin + j;
            g[static_cast<std::size_t>(k)] =
                p[static_cast<std::size_t>(k)] * (dp[static_cast<std::size_t>(j)] - dot);
        }
        if (loss_out) *loss_out = L / m;
        return g;
    }

    // cross-entropy over visible entries, via log-sum-exp for stability
    double max_z = -std::numeric_limits<double>::infinity();
    for (int k = slice.begin; k < slice.end; ++k)
        max_z = std::max(max_z, logits[static_cast<std::size_t>(k)]);
    double lse = 0.0;
    for (int k = slice.begin; k < slice.end; ++k)
        lse += std::exp(logits[static_cast<std::size_t>(k)] - max_z);
    lse = max_z + std::log(lse);

    double L = 0.0;
    for (int k = slice.begin; k < slice.end; ++k) {
        const double y = ex.target[static_cast<std::size_t>(k)];
        if (ex.visible[static_cast<std::size_t>(k)] && y > 0.0)
            L -= y * (logits[static_cast<std::size_t>(k)] - lse);
        // dL/dz = p - y on the slice (y is 0 on invisible slice entries)
        g[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)] - y;
    }
    if (loss_out) *loss_out = L;
    return g;
}

// backprop one example into acc (adds, does not scale)
double accumulate_example(const AdviserNet& net, const Example& ex, LossKind kind, TrainMode mode,
                          const KeypointTaxonomy& tax, Gradients& acc) {
    const ForwardTrace trace = forward_trace(net, ex.features);
    double loss_value = 0.0;
    std::vector<double> delta =
        logit_gradient(trace.acts.back(), ex, kind, mode, tax, &loss_value);

    for (int l = net.num_layers() - 1; l >= 0; --l) {
        const int in = net.widths[static_cast<std::size_t>(l)];
        const int out = net.widths[static_cast<std::size_t>(l) + 1];
        const auto& x = trace.acts[static_cast<std::size_t>(l)];
        auto& dW = acc.weights[static_cast<std::size_t>(l)];
        auto& db = acc.biases[static_cast<std::size_t>(l)];
        for (int o = 0; o < out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            db[static_cast<std::size_t>(o)] += d;
            double* row = &dW[static_cast<std::size_t>(o) * static_cast<std::size_t>(in)];
            for (int i = 0; i < in; ++i) row[i] += d * x[static_cast<std::size_t>(i)];
        }
        if (l > 0) {
            const auto& W = net.weights[static_cast<std::size_t>(l)];
            std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
            for (int i = 0; i < in; ++i) {
                if (x[static_cast<std::size_t>(i)] <= 0.0) continue;  // ReLU gate
                double s = 0.0;
                for (int o = 0; o < out; ++o)
                    s += W[static_cast<std::size_t>(o) * static_cast<std::size_t>(in) +
                           static_cast<std::size_t>(i)] *
                         delta[static_cast<std::size_t>(o)];
                prev[static_cast<std::size_t>(i)] = s;
            }
            delta = std::move(prev);
        }
    }
    return loss_value;
}

Gradients batch_gradients_blocked(const AdviserNet& net, std::span<const Example> batch,
                                  LossKind kind, TrainMode mode, const KeypointTaxonomy& tax,
                                  double* mean_loss, bool parallel) {
    if (batch.empty()) throw std::invalid_argument("gradient batch must be nonempty");
    const std::size_t n = batch.size();
    const std::size_t n_blocks = (n + kGradBlock - 1) / kGradBlock;

    std::vector<Gradients> partial(n_blocks);
    std::vector<double> partial_loss(n_blocks, 0.0);

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
        Gradients g = Gradients::zeros_like(net);
        double loss_sum = 0.0;
        const std::size_t lo = static_cast<std::size_t>(b) * kGradBlock;
        const std::size_t hi = std::min(lo + kGradBlock, n);
        for (std::size_t i = lo; i < hi; ++i)
            loss_sum += accumulate_example(net, batch[i], kind, mode, tax, g);
        partial[static_cast<std::size_t>(b)] = std::move(g);
        partial_loss[static_cast<std::size_t>(b)] = loss_sum;
    }

    Gradients total = std::move(partial[0]);
    double loss_sum = partial_loss[0];
    for (std::size_t b = 1; b < n_blocks; ++b) {
        total.add(partial[b]);
        loss_sum += partial_loss[b];
    }
    total.scale(1.0 / static_cast<double>(n));
    if (mean_loss) *mean_loss = loss_sum / static_cast<double>(n);
    return total;
}

}  // namespace

LossKind loss_kind_from_string(std::string_view s) {
    if (s == "masked-mse" || s == "mse") return LossKind::masked_mse;
    if (s == "masked-cross-entropy" || s == "cross-entropy" || s == "ce")
        return LossKind::masked_cross_entropy;
    throw std::invalid_argument("unknown loss kind: " + std::string(s));
}

TrainMode train_mode_from_string(std::string_view s) {
    if (s == "classification") return TrainMode::classification;
    if (s == "regression-degrees") return TrainMode::regression_degrees;
    if (s == "regression-radians") return TrainMode::regression_radians;
    throw std::invalid_argument("unknown train mode: " + std::string(s));
}

std::string_view to_string(LossKind k) {
    return k == LossKind::masked_mse ? "masked-mse" : "masked-cross-entropy";
}

std::string_view to_string(TrainMode m) {
    switch (m) {
        case TrainMode::classification: return "classification";
        case TrainMode::regression_degrees: return "regression-degrees";
        case TrainMode::regression_radians: return "regression-radians";
    }
    throw std::logic_error("unreachable train mode");
}

AdviserNet AdviserNet::init(const std::vector<int>& widths, std::uint64_t seed) {
    check_widths(widths);
    AdviserNet net = zeros(widths);
    Rng rng(substream_seed(seed, kTagInit));
    for (int l = 0; l < net.num_layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths[static_cast<std::size_t>(l)]));
        for (double& w : net.weights[static_cast<std::size_t>(l)]) w = rng.uniform(-bound, bound);
        for (double& b : net.biases[static_cast<std::size_t>(l)]) b = rng.uniform(-bound, bound);
    }
    return net;
}

AdviserNet AdviserNet::zeros(const std::vector<int>& widths) {
    check_widths(widths);
    AdviserNet net;
    net.widths = widths;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        net.weights.emplace_back(static_cast<std::size_t>(widths[l]) * static_cast<std::size_t>(widths[l + 1]), 0.0);
        net.biases.emplace_back(static_cast<std::size_t>(widths[l + 1]), 0.0);
    }
    return net;
}

std::vector<double> forward(const AdviserNet& net, std::span<const double> features) {
    return forward_trace(net, features).acts.back();
}

std::vector<double> class_masked_probabilities(std::span<const double> logits, ObjectClass cls,
                                               const KeypointTaxonomy& tax) {
    if (static_cast<int>(logits.size()) != kNumKeypoints)
        throw std::invalid_argument("expected 34 logits");
    const IndexRange slice = tax.class_slice(cls);
    std::vector<double> p(static_cast<std::size_t>(kNumKeypoints), 0.0);
    double max_z = -std::numeric_limits<double>::infinity();
    for (int k = slice.begin; k < slice.end; ++k)
        max_z = std::max(max_z, logits[static_cast<std::size_t>(k)]);
    double denom = 0.0;
    for (int k = slice.begin; k < slice.end; ++k) {
        const double e = std::exp(logits[static_cast<std::size_t>(k)] - max_z);
        p[static_cast<std::size_t>(k)] = e;
        denom += e;
    }
    for (int k = slice.begin; k < slice.end; ++k) p[static_cast<std::size_t>(k)] /= denom;
    return p;
}

std::vector<Example> make_examples(std::span<const AdviseeRecord> records,
                                   const KeypointTaxonomy& tax, const LabelConfig& label_config,
                                   TrainMode mode) {
    std::vector<Example> out;
    out.reserve(records.size());
    for (const AdviseeRecord& rec : records) {
        if (rec.features.empty())
            throw std::runtime_error("record " + rec.instance_id +
                                     " has no features; cannot build training examples");
        Example ex;
        ex.features = rec.features;
        ex.cls = rec.cls;
        ex.visible.assign(static_cast<std::size_t>(kNumKeypoints), 0);
        for (const auto& [k, e] : rec.errors) ex.visible[static_cast<std::size_t>(k)] = 1;
        switch (mode) {
            case TrainMode::classification:
                ex.target = soft_label(rec, label_config).p;
                break;
            case TrainMode::regression_degrees:
                ex.target = regression_targets(rec, ErrorUnits::degrees).target;
                break;
            case TrainMode::regression_radians:
                ex.target = regression_targets(rec, ErrorUnits::radians).target;
                break;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

double loss(std::span<const double> net_output, std::span<const double> target, ObjectClass cls,
            std::span<const std::uint8_t> visible, LossKind kind, TrainMode mode,
            const KeypointTaxonomy& tax) {
    if (static_cast<int>(net_output.size()) != kNumKeypoints ||
        static_cast<int>(target.size()) != kNumKeypoints ||
        static_cast<int>(visible.size()) != kNumKeypoints)
        throw std::invalid_argument("loss: expected 34-wide output, target and mask");
    Example ex;
    ex.cls = cls;
    ex.target.assign(target.begin(), target.end());
    ex.visible.assign(visible.begin(), visible.end());
    if (mode == TrainMode::classification) {
        // target must be a valid soft label: zero off the visible support
        for (int k = 0; k < kNumKeypoints; ++k)
            if (!visible[static_cast<std::size_t>(k)] && target[static_cast<std::size_t>(k)] != 0.0)
                throw std::invalid_argument("loss: soft label has mass outside the visible set");
    }
    double value = 0.0;
    (void)logit_gradient(net_output, ex, kind, mode, tax, &value);
    return value;
}

Gradients Gradients::zeros_like(const AdviserNet& net) {
    Gradients g;
    for (const auto& w : net.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void Gradients::add(const Gradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
        for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
    }
}

void Gradients::scale(double s) {
    for (auto& w : weights)
        for (double& v : w) v *= s;
    for (auto& b : biases)
        for (double& v : b) v *= s;
}

Gradients batch_gradients(const AdviserNet& net, std::span<const Example> batch, LossKind kind,
                          TrainMode mode, const KeypointTaxonomy& tax, double* mean_loss) {
    return batch_gradients_blocked(net, batch, kind, mode, tax, mean_loss, true);
}

Gradients batch_gradients_serial(const AdviserNet& net, std::span<const Example> batch,
                                 LossKind kind, TrainMode mode, const KeypointTaxonomy& tax,
                                 double* mean_loss) {
    return batch_gradients_blocked(net, batch, kind, mode, tax, mean_loss, false);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::runtime_error("config error: learning_rate must be > 0");
    if (!(momentum >= 0.0)) throw std::runtime_error("config error: momentum must be >= 0");
    if (!(weight_decay >= 0.0)) throw std::runtime_error("config error: weight_decay must be >= 0");
    if (!(lr_decay > 0.0)) throw std::runtime_error("config error: lr_decay must be > 0");
    if (lr_decay_every < 1) throw std::runtime_error("config error: lr_decay_every must be >= 1");
    if (batch_size < 1) throw std::runtime_error("config error: batch_size must be >= 1");
    if (epochs < 1) throw std::runtime_error("config error: epochs must be >= 1");
}

double lr_at_epoch(const TrainConfig& config, int epoch) {
    double lr = config.learning_rate;
    for (int k = 0; k < epoch / config.lr_decay_every; ++k) lr *= config.lr_decay;
    return lr;
}

TrainResult train(AdviserNet net, std::span<const Example> dataset, const TrainConfig& config,
                  const KeypointTaxonomy& tax) {
    config.validate();
    if (dataset.empty()) throw std::invalid_argument("training dataset must be nonempty");
    for (const Example& ex : dataset)
        if (static_cast<int>(ex.features.size()) != net.input_dim())
            throw std::invalid_argument("feature dimension mismatch in training set");

    Gradients velocity = Gradients::zeros_like(net);
    TrainResult result;
    result.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<Example> batch;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = lr_at_epoch(config, epoch);
        Rng shuffle_rng(substream_seed(config.seed, kTagShuffle, {}, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double epoch_loss_sum = 0.0;
        int n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(dataset[order[i]]);

            double batch_loss = 0.0;
            Gradients grad = batch_gradients(net, batch, config.loss, config.mode, tax, &batch_loss);
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch));
            epoch_loss_sum += batch_loss;
            ++n_batches;

            for (int l = 0; l < net.num_layers(); ++l) {
                auto& W = net.weights[static_cast<std::size_t>(l)];
                auto& vW = velocity.weights[static_cast<std::size_t>(l)];
                const auto& gW = grad.weights[static_cast<std::size_t>(l)];
                for (std::size_t i = 0; i < W.size(); ++i) {
                    vW[i] = config.momentum * vW[i] - lr * (gW[i] + config.weight_decay * W[i]);
                    W[i] += vW[i];
                }
                auto& b = net.biases[static_cast<std::size_t>(l)];
                auto& vb = velocity.biases[static_cast<std::size_t>(l)];
                const auto& gb = grad.biases[static_cast<std::size_t>(l)];
                for (std::size_t i = 0; i < b.size(); ++i) {
                    vb[i] = config.momentum * vb[i] - lr * gb[i];
                    b[i] += vb[i];
                }
            }
        }
        result.epoch_loss.push_back(epoch_loss_sum / n_batches);
    }
    result.net = std::move(net);
    return result;
}

std::string checkpoint_to_string(const AdviserNet& net, TrainMode mode) {
    std::ostringstream out;
    out << "adviser-checkpoint v1\n";
    out << "mode " << to_string(mode) << "\n";
    out << "widths";
    for (int w : net.widths) out << ' ' << w;
    out << '\n';
    char buf[40];
    for (int l = 0; l < net.num_layers(); ++l) {
        for (int part = 0; part < 2; ++part) {
            const auto& vals = part == 0 ? net.weights[static_cast<std::size_t>(l)]
                                         : net.biases[static_cast<std::size_t>(l)];
            out << (part == 0 ? 'W' : 'b') << l;
            for (double v : vals) {
                std::snprintf(buf, sizeof buf, " %a", v);  // hexfloat: bitwise round-trip
                out << buf;
            }
            out << '\n';
        }
    }
    return out.str();
}

void save_checkpoint(const std::string& path, const AdviserNet& net, TrainMode mode) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << checkpoint_to_string(net, mode);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "adviser-checkpoint v1")
        throw std::runtime_error("unrecognized checkpoint header in " + path);

    Checkpoint ckpt;
    if (!std::getline(in, line) || line.rfind("mode ", 0) != 0)
        throw std::runtime_error("checkpoint missing mode line");
    ckpt.mode = train_mode_from_string(line.substr(5));

    if (!std::getline(in, line) || line.rfind("widths", 0) != 0)
        throw std::runtime_error("checkpoint missing widths line");
    std::vector<int> widths;
    {
        std::istringstream ws(line.substr(6));
        int w;
        while (ws >> w) widths.push_back(w);
    }
    ckpt.net = AdviserNet::zeros(widths);

    for (int l = 0; l < ckpt.net.num_layers(); ++l) {
        for (int part = 0; part < 2; ++part) {
            auto& vals = part == 0 ? ckpt.net.weights[static_cast<std::size_t>(l)]
                                   : ckpt.net.biases[static_cast<std::size_t>(l)];
            const std::string tag = std::string(1, part == 0 ? 'W' : 'b') + std::to_string(l);
            if (!std::getline(in, line) || line.rfind(tag + " ", 0) != 0)
                throw std::runtime_error("checkpoint missing section " + tag);
            const char* s = line.c_str() + tag.size();
            char* end = nullptr;
            for (double& v : vals) {
                v = std::strtod(s, &end);
                if (end == s) throw std::runtime_error("checkpoint section " + tag + " truncated");
                s = end;
            }
        }
    }
    return ckpt;
}

}  // namespace adviser
