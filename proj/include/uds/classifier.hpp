#pragma once

// Fully connected softmax classifier trained by mini-batch SGD on a
// (optionally class-weighted) cross-entropy loss.
//
// Hidden layers use tanh; the output layer is a softmax over the classes.
// Inputs are standardized with per-feature statistics fitted on the training
// split and stored alongside the weights.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uds/error.hpp"

namespace uds {

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;     // outputs

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out) : inputs(in), outputs(out), weights(in * out, 0.0), bias(out, 0.0) {}

    [[nodiscard]] double& w(std::size_t o, std::size_t i) { return weights[o * inputs + i]; }
    [[nodiscard]] double w(std::size_t o, std::size_t i) const { return weights[o * inputs + i]; }
};

/// Numerically stable in-place softmax.
inline void softmax(std::span<double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

class Mlp {
public:
    Mlp() = default;

    /// Layer sizes including input and output, e.g. {17, 64, 32, 5}.
    /// Weights use Glorot-uniform initialization from `rng`.
    Mlp(const std::vector<std::size_t>& sizes, std::mt19937_64& rng) {
        if (sizes.size() < 2) throw Error(ErrorCode::InvalidInput, "network needs at least two layer sizes");
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            DenseLayer layer(sizes[l], sizes[l + 1]);
            const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
            std::uniform_real_distribution<double> u(-limit, limit);
            for (double& w : layer.weights) w = u(rng);
            layers_.push_back(std::move(layer));
        }
    }

    explicit Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
        for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
            if (layers_[l].outputs != layers_[l + 1].inputs) {
                throw Error(ErrorCode::InvalidInput, "inconsistent layer sizes");
            }
        }
        for (const auto& layer : layers_) {
            if (layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs) {
                throw Error(ErrorCode::InvalidInput, "layer weight count does not match its shape");
            }
        }
    }

    [[nodiscard]] std::size_t input_size() const { return layers_.front().inputs; }
    [[nodiscard]] std::size_t output_size() const { return layers_.back().outputs; }
    [[nodiscard]] const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::vector<DenseLayer>& layers() noexcept { return layers_; }

    [[nodiscard]] std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s{layers_.front().inputs};
        for (const auto& layer : layers_) s.push_back(layer.outputs);
        return s;
    }

    /// Class probabilities for one (already standardized) input.
    [[nodiscard]] std::vector<double> forward(std::span<const double> x) const {
        std::vector<std::vector<double>> acts;
        forward_cached(x, acts);
        return acts.back();
    }

    /// Forward pass keeping every layer's activation; acts[0] is the input,
    /// acts.back() the softmax output.
    void forward_cached(std::span<const double> x, std::vector<std::vector<double>>& acts) const {
        if (x.size() != input_size()) throw Error(ErrorCode::InvalidInput, "input size mismatch");
        acts.resize(layers_.size() + 1);
        acts[0].assign(x.begin(), x.end());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& layer = layers_[l];
            auto& out = acts[l + 1];
            out.assign(layer.bias.begin(), layer.bias.end());
            const auto& in = acts[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double* row = &layer.weights[o * layer.inputs];
                double s = 0.0;
                for (std::size_t i = 0; i < layer.inputs; ++i) s += row[i] * in[i];
                out[o] += s;
            }
            if (l + 1 < layers_.size()) {
                for (double& v : out) v = std::tanh(v);
            } else {
                softmax(out);
            }
        }
    }

    /// Weighted mean cross-entropy over a batch and its gradient.
    /// `grads` is resized to match the layers and overwritten.
    double loss_and_gradient(std::span<const std::vector<double>> inputs, std::span<const int> labels,
                             std::span<const double> sample_weights, std::vector<DenseLayer>& grads) const {
        grads.clear();
        for (const auto& layer : layers_) grads.emplace_back(layer.inputs, layer.outputs);

        double total_weight = 0.0;
        for (double w : sample_weights) total_weight += w;
        if (!(total_weight > 0.0)) throw Error(ErrorCode::InvalidInput, "empty batch");

        double loss = 0.0;
        std::vector<std::vector<double>> acts;
        std::vector<double> delta, next_delta;
        for (std::size_t n = 0; n < inputs.size(); ++n) {
            forward_cached(inputs[n], acts);
            const double scale = sample_weights[n] / total_weight;
            const auto label = static_cast<std::size_t>(labels[n]);
            const auto& probs = acts.back();
            loss -= scale * std::log(std::max(probs[label], 1e-300));

            // dL/dz at the softmax input.
            delta.assign(probs.begin(), probs.end());
            delta[label] -= 1.0;
            for (double& d : delta) d *= scale;

            for (std::size_t l = layers_.size(); l-- > 0;) {
                const auto& layer = layers_[l];
                auto& g = grads[l];
                const auto& in = acts[l];
                for (std::size_t o = 0; o < layer.outputs; ++o) {
                    g.bias[o] += delta[o];
                    double* grow = &g.weights[o * layer.inputs];
                    for (std::size_t i = 0; i < layer.inputs; ++i) grow[i] += delta[o] * in[i];
                }
                if (l == 0) break;
                next_delta.assign(layer.inputs, 0.0);
                for (std::size_t o = 0; o < layer.outputs; ++o) {
                    const double* row = &layer.weights[o * layer.inputs];
                    for (std::size_t i = 0; i < layer.inputs; ++i) next_delta[i] += row[i] * delta[o];
                }
                for (std::size_t i = 0; i < layer.inputs; ++i) next_delta[i] *= 1.0 - in[i] * in[i];  // tanh'
                delta.swap(next_delta);
            }
        }
        return loss;
    }

private:
    std::vector<DenseLayer> layers_;
};

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    static Standardizer fit(std::span<const std::vector<double>> rows) {
        if (rows.empty()) throw Error(ErrorCode::InvalidInput, "cannot fit standardizer on no rows");
        const std::size_t d = rows.front().size();
        Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
        for (const auto& r : rows)
            for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
        for (double& m : s.mean) m /= static_cast<double>(rows.size());
        for (const auto& r : rows)
            for (std::size_t j = 0; j < d; ++j) s.stddev[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
        for (double& v : s.stddev) {
            v = std::sqrt(v / static_cast<double>(rows.size()));
            if (!(v > 1e-12)) v = 1.0;  // constant feature
        }
        return s;
    }

    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> z(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean[j]) / stddev[j];
        return z;
    }
};

struct ClassifierModel {
    Mlp network;
    Standardizer normalization;

    /// Standardize raw features, then run the network.
    [[nodiscard]] std::vector<double> predict_proba(std::span<const double> raw) const {
        return network.forward(normalization.apply(raw));
    }
};

struct TrainConfig {
    std::vector<std::size_t> hidden{64, 32};
    double learning_rate = 1e-3;
    double momentum = 0.9;
    std::size_t batch_size = 32;
    std::size_t epochs = 60;
    bool class_weighting = true;
    double train_fraction = 0.65;
    double validation_fraction = 0.22;
    std::uint64_t seed = 1;
};

struct SplitMetrics {
    std::size_t size = 0;
    double accuracy = 0.0;
    double loss = 0.0;
};

struct TrainReport {
    SplitMetrics train, validation, test;
};

struct TrainResult {
    ClassifierModel model;
    TrainReport report;
    std::vector<std::size_t> test_indices;  // into the dataset passed to train_classifier
};

/// Index of the largest probability; ties go to the lowest index.
[[nodiscard]] inline std::size_t argmax(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return best;
}

/// Unweighted accuracy and mean cross-entropy of `model` on a subset.
[[nodiscard]] inline SplitMetrics evaluate_classifier(const ClassifierModel& model,
                                                      std::span<const std::vector<double>> features,
                                                      std::span<const int> labels,
                                                      std::span<const std::size_t> subset) {
    SplitMetrics m;
    m.size = subset.size();
    if (subset.empty()) return m;
    std::size_t correct = 0;
    for (std::size_t idx : subset) {
        const auto p = model.predict_proba(features[idx]);
        const auto label = static_cast<std::size_t>(labels[idx]);
        if (argmax(p) == label) ++correct;
        m.loss -= std::log(std::max(p[label], 1e-300));
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(subset.size());
    m.loss /= static_cast<double>(subset.size());
    return m;
}

/// Shuffle (seeded), split train/validation/test, standardize on the train
/// split and fit by mini-batch SGD with momentum. Every class in
/// [0, num_classes) must occur in the train split.
[[nodiscard]] inline TrainResult train_classifier(std::span<const std::vector<double>> features,
                                                  std::span<const int> labels, std::size_t num_classes,
                                                  const TrainConfig& config) {
    if (features.size() != labels.size() || features.empty()) {
        throw Error(ErrorCode::InvalidInput, "features and labels must be non-empty and equal length");
    }
    const std::size_t n = features.size();
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train + n_val > n) throw Error(ErrorCode::InvalidInput, "invalid split fractions");
    const std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                                           order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    const std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                                            order.end());

    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t i : train_idx) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) throw Error(ErrorCode::InvalidInput, "label out of range");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (counts[c] == 0) {
            throw Error(ErrorCode::ClassCoverage, "class " + std::to_string(c) + " missing from the train split");
        }
    }

    std::vector<double> class_weight(num_classes, 1.0);
    if (config.class_weighting) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            class_weight[c] = static_cast<double>(n_train) / (static_cast<double>(num_classes * counts[c]));
        }
    }

    std::vector<std::vector<double>> train_rows;
    train_rows.reserve(n_train);
    for (std::size_t i : train_idx) train_rows.push_back(features[i]);

    ClassifierModel model;
    model.normalization = Standardizer::fit(train_rows);
    std::vector<std::size_t> sizes{features.front().size()};
    sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
    sizes.push_back(num_classes);
    model.network = Mlp(sizes, rng);

    std::vector<std::vector<double>> z;
    z.reserve(n_train);
    std::vector<int> y;
    std::vector<double> w;
    for (std::size_t k = 0; k < n_train; ++k) {
        z.push_back(model.normalization.apply(train_rows[k]));
        y.push_back(labels[train_idx[k]]);
        w.push_back(class_weight[static_cast<std::size_t>(y.back())]);
    }

    std::vector<DenseLayer> velocity;
    for (const auto& layer : model.network.layers()) velocity.emplace_back(layer.inputs, layer.outputs);
    std::vector<DenseLayer> grads;
    std::vector<std::size_t> perm(n_train);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::vector<double>> bx;
    std::vector<int> by;
    std::vector<double> bw;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t start = 0; start < n_train; start += config.batch_size) {
            const std::size_t end = std::min(n_train, start + config.batch_size);
            bx.clear();
            by.clear();
            bw.clear();
            for (std::size_t k = start; k < end; ++k) {
                bx.push_back(z[perm[k]]);
                by.push_back(y[perm[k]]);
                bw.push_back(w[perm[k]]);
            }
            (void)model.network.loss_and_gradient(bx, by, bw, grads);
            auto& layers = model.network.layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                for (std::size_t j = 0; j < layers[l].weights.size(); ++j) {
                    double& v = velocity[l].weights[j];
                    v = config.momentum * v - config.learning_rate * grads[l].weights[j];
                    layers[l].weights[j] += v;
                }
                for (std::size_t j = 0; j < layers[l].bias.size(); ++j) {
                    double& v = velocity[l].bias[j];
                    v = config.momentum * v - config.learning_rate * grads[l].bias[j];
                    layers[l].bias[j] += v;
                }
            }
        }
    }

    TrainResult result{std::move(model), {}, test_idx};
    result.report.train = evaluate_classifier(result.model, features, labels, train_idx);
    result.report.validation = evaluate_classifier(result.model, features, labels, val_idx);
    result.report.test = evaluate_classifier(result.model, features, labels, test_idx);
    return result;
}

}  // namespace uds
