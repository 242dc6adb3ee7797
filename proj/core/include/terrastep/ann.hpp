#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "terrastep/matrix.hpp"

namespace terrastep {

/// Adam with bias correction. Owns the moment buffers for one flat
/// parameter vector.
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t n_params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    void set_learning_rate(double lr) { lr_ = lr; }
    double learning_rate() const { return lr_; }
    long steps() const { return t_; }

    void step(std::span<double> params, std::span<const double> grads);

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

struct AnnParams {
    std::vector<int> hidden = {50, 100};
    int batch_size = 32;
    int max_epochs = 200;
    double initial_lr = 1e-3;
    // "adaptive" learning rate: divide by 5 when the epoch loss fails to
    // improve by plateau_delta for plateau_epochs consecutive epochs; stop
    // after max_lr_reductions reductions.
    double plateau_delta = 1e-4;
    int plateau_epochs = 2;
    int max_lr_reductions = 3;
};

/// Fully connected ReLU network with a softmax cross-entropy head,
/// trained with Adam on shuffled mini-batches. Deterministic given the
/// seed. Throws ConvergenceError if the loss turns non-finite.
class NeuralNet {
public:
    /// Zero-initialized network of the given layer sizes (input first,
    /// logits last). Exposed for tests; training uses fit().
    explicit NeuralNet(std::vector<int> layer_sizes);

    static NeuralNet fit(const Matrix& x, const std::vector<int>& y, int n_classes,
                         const AnnParams& params, std::uint64_t seed,
                         std::vector<double>* epoch_loss = nullptr);

    int predict(std::span<const double> query) const;
    std::vector<double> logits(std::span<const double> query) const;
    std::vector<double> softmax(std::span<const double> query) const;

    /// Mean cross-entropy over a batch plus the gradient w.r.t. every
    /// parameter. Batch rows pair with labels. Used by training and by the
    /// finite-difference tests.
    double loss_and_gradient(const Matrix& x, std::span<const int> y,
                             std::span<const std::size_t> rows, std::vector<double>& grad) const;
    double batch_loss(const Matrix& x, std::span<const int> y,
                      std::span<const std::size_t> rows) const;

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }
    const std::vector<int>& layer_sizes() const { return sizes_; }

    void he_initialize(std::uint64_t seed);

    nlohmann::json to_json() const;
    static NeuralNet from_json(const nlohmann::json& j);

private:
    std::vector<int> sizes_;
    std::vector<double> params_;  // per layer: weights row-major [out][in], then biases
    std::vector<std::size_t> weight_offset_, bias_offset_;

    void forward(std::span<const double> input, std::vector<std::vector<double>>& activations) const;
};

}  // namespace terrastep
