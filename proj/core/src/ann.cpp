#include "terrastep/ann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "terrastep/rng.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

using nlohmann::json;

AdamOptimizer::AdamOptimizer(std::size_t n_params, double lr, double beta1, double beta2,
                             double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("adam: parameter size mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

NeuralNet::NeuralNet(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("ann: need at least input and output layers");
    std::size_t total = 0;
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        weight_offset_.push_back(total);
        total += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l - 1]);
        bias_offset_.push_back(total);
        total += static_cast<std::size_t>(sizes_[l]);
    }
    params_.assign(total, 0.0);
}

void NeuralNet::he_initialize(std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        const double scale = std::sqrt(2.0 / static_cast<double>(sizes_[l - 1]));
        const std::size_t w0 = weight_offset_[l - 1];
        const std::size_t n_w = static_cast<std::size_t>(sizes_[l]) * sizes_[l - 1];
        for (std::size_t i = 0; i < n_w; ++i) params_[w0 + i] = scale * rng.next_gaussian();
        // biases stay zero
    }
}

void NeuralNet::forward(std::span<const double> input,
                        std::vector<std::vector<double>>& activations) const {
    activations.resize(sizes_.size());
    activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        const int n_out = sizes_[l], n_in = sizes_[l - 1];
        const double* w = params_.data() + weight_offset_[l - 1];
        const double* b = params_.data() + bias_offset_[l - 1];
        auto& out = activations[l];
        out.assign(static_cast<std::size_t>(n_out), 0.0);
        const auto& in = activations[l - 1];
        for (int o = 0; o < n_out; ++o) {
            double acc = b[o];
            const double* wrow = w + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) acc += wrow[i] * in[i];
            out[o] = (l + 1 < sizes_.size()) ? std::max(0.0, acc) : acc;  // ReLU, linear logits
        }
    }
}

std::vector<double> NeuralNet::logits(std::span<const double> query) const {
    if (query.size() != static_cast<std::size_t>(sizes_.front()))
        throw SchemaError("ann: input width mismatch");
    std::vector<std::vector<double>> acts;
    forward(query, acts);
    return acts.back();
}

std::vector<double> NeuralNet::softmax(std::span<const double> query) const {
    std::vector<double> z = logits(query);
    const double mx = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        total += v;
    }
    for (double& v : z) v /= total;
    return z;
}

int NeuralNet::predict(std::span<const double> query) const {
    const std::vector<double> z = logits(query);
    std::size_t best = 0;
    for (std::size_t i = 1; i < z.size(); ++i)
        if (z[i] > z[best]) best = i;
    return static_cast<int>(best);
}

double NeuralNet::loss_and_gradient(const Matrix& x, std::span<const int> y,
                                    std::span<const std::size_t> rows,
                                    std::vector<double>& grad) const {
    grad.assign(params_.size(), 0.0);
    if (rows.empty()) return 0.0;

    const std::size_t n_layers = sizes_.size();
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> delta(n_layers);
    double loss = 0.0;

    for (std::size_t r : rows) {
        forward(x.row(r), acts);
        auto& out = acts.back();

        // softmax cross-entropy; delta at the logits is (p - onehot)
        const double mx = *std::max_element(out.begin(), out.end());
        double total = 0.0;
        for (double v : out) total += std::exp(v - mx);
        const int label = y[r];
        loss -= out[label] - mx - std::log(total);

        auto& dl = delta[n_layers - 1];
        dl.resize(out.size());
        for (std::size_t o = 0; o < out.size(); ++o)
            dl[o] = std::exp(out[o] - mx) / total - (static_cast<int>(o) == label ? 1.0 : 0.0);

        for (std::size_t l = n_layers - 1; l >= 1; --l) {
            const int n_out = sizes_[l], n_in = sizes_[l - 1];
            const double* w = params_.data() + weight_offset_[l - 1];
            double* gw = grad.data() + weight_offset_[l - 1];
            double* gb = grad.data() + bias_offset_[l - 1];
            const auto& in = acts[l - 1];
            const auto& dl_out = delta[l];

            for (int o = 0; o < n_out; ++o) {
                const double d = dl_out[o];
                gb[o] += d;
                double* gr = gw + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) gr[i] += d * in[i];
            }
            if (l == 1) break;
            auto& dl_in = delta[l - 1];
            dl_in.assign(static_cast<std::size_t>(n_in), 0.0);
            for (int o = 0; o < n_out; ++o) {
                const double d = dl_out[o];
                const double* wrow = w + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) dl_in[i] += d * wrow[i];
            }
            for (int i = 0; i < n_in; ++i)
                if (acts[l - 1][i] <= 0.0) dl_in[i] = 0.0;  // ReLU gate
        }
    }

    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (double& g : grad) g *= inv_n;
    return loss * inv_n;
}

double NeuralNet::batch_loss(const Matrix& x, std::span<const int> y,
                             std::span<const std::size_t> rows) const {
    double loss = 0.0;
    std::vector<std::vector<double>> acts;
    for (std::size_t r : rows) {
        forward(x.row(r), acts);
        const auto& out = acts.back();
        const double mx = *std::max_element(out.begin(), out.end());
        double total = 0.0;
        for (double v : out) total += std::exp(v - mx);
        loss -= out[y[r]] - mx - std::log(total);
    }
    return loss / static_cast<double>(rows.size());
}

NeuralNet NeuralNet::fit(const Matrix& x, const std::vector<int>& y, int n_classes,
                         const AnnParams& params, std::uint64_t seed,
                         std::vector<double>* epoch_loss) {
    if (x.rows == 0) throw std::invalid_argument("ann: empty training set");
    if (x.rows != y.size()) throw std::invalid_argument("ann: row/label count mismatch");

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(x.cols));
    for (int h : params.hidden) sizes.push_back(h);
    sizes.push_back(n_classes);

    NeuralNet net(sizes);
    net.he_initialize(Rng::child_seed(seed, "ann.init"));

    AdamOptimizer adam(net.params_.size(), params.initial_lr);
    Rng shuffle_rng(Rng::child_seed(seed, "ann.shuffle"));

    std::vector<std::size_t> order(x.rows);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad;

    double best_loss = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;
    int reductions = 0;

    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.next_below(i + 1)]);

        double epoch_total = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(params.batch_size)) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(params.batch_size), order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, count);
            const double loss = net.loss_and_gradient(x, y, batch, grad);
            if (!std::isfinite(loss)) throw ConvergenceError("ann: training loss diverged");
            adam.step(net.params_, grad);
            epoch_total += loss * static_cast<double>(count);
            seen += count;
        }
        const double mean_loss = epoch_total / static_cast<double>(seen);
        if (epoch_loss) epoch_loss->push_back(mean_loss);

        // adaptive rule: lr /= 5 after plateau_epochs epochs without a
        // plateau_delta improvement; stop once max_lr_reductions are spent
        if (mean_loss < best_loss - params.plateau_delta) {
            best_loss = mean_loss;
            stale_epochs = 0;
        } else {
            if (++stale_epochs >= params.plateau_epochs) {
                if (reductions >= params.max_lr_reductions) break;
                adam.set_learning_rate(adam.learning_rate() / 5.0);
                ++reductions;
                stale_epochs = 0;
            }
        }
        if (mean_loss < best_loss) best_loss = mean_loss;
    }
    return net;
}

json NeuralNet::to_json() const {
    return json{{"layer_sizes", sizes_}, {"params", params_}};
}

NeuralNet NeuralNet::from_json(const json& j) {
    NeuralNet net(j.at("layer_sizes").get<std::vector<int>>());
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != net.params_.size()) throw SchemaError("ann payload: parameter count mismatch");
    net.params_ = std::move(params);
    return net;
}

}  // namespace terrastep
