#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tsfs/linalg.hpp"

namespace tsfs {

enum class OutputActivation { identity, softmax };

/// One fully connected layer: out = in * w + b, w is (in x out).
struct Layer {
    Matrix w;
    Vector b;
};

/// Feed-forward network with ReLU hidden layers.
///
/// Every mutable access to the parameters bumps generation(), which lets
/// backward() reject caches produced before the last update.
class DenseNet {
public:
    DenseNet() = default;
    /// sizes = {input, hidden..., output}. Weights are Glorot-uniform from `seed`, biases zero.
    DenseNet(std::vector<std::size_t> sizes, OutputActivation output, std::uint64_t seed);
    DenseNet(std::vector<Layer> layers, OutputActivation output);

    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t input_size() const noexcept { return layers_.front().w.rows(); }
    std::size_t output_size() const noexcept { return layers_.back().w.cols(); }
    std::size_t parameter_count() const noexcept;
    OutputActivation output_activation() const noexcept { return output_; }

    const Layer& layer(std::size_t i) const noexcept { return layers_[i]; }
    Layer& mutable_layer(std::size_t i) noexcept {
        ++generation_;
        return layers_[i];
    }
    /// Flat views over every parameter block in layer order (w then b).
    std::vector<std::span<double>> parameter_spans();

    std::uint64_t generation() const noexcept { return generation_; }
    bool all_finite() const noexcept;

private:
    std::vector<Layer> layers_;
    OutputActivation output_ = OutputActivation::identity;
    std::uint64_t generation_ = 0;
};

struct ForwardCache {
    const DenseNet* net = nullptr;
    std::uint64_t generation = 0;
    std::vector<Matrix> inputs;  // input to each layer (inputs[0] = X)
    std::vector<Matrix> pre;     // pre-activation of each layer
    Matrix output;               // after the output activation
};

struct Gradients {
    std::vector<Matrix> dw;
    std::vector<Vector> db;

    static Gradients zeros_like(const DenseNet& net);
    std::vector<std::span<const double>> spans() const;
};

ForwardCache forward(const DenseNet& net, const Matrix& x);
/// Convenience: forward(net, x).output.
Matrix predict(const DenseNet& net, const Matrix& x);

/// Backpropagates `grad_at_logits`, the loss gradient with respect to the last
/// layer's pre-activation (for an identity output this is the gradient at the output).
Gradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& grad_at_logits);

enum class Loss {
    squared_error,  // (1/2n) * ||out - target||_F^2
    softmax_ce,     // -(1/n) * sum log softmax(logits)[target], target one-hot
};

struct LossValue {
    double value = 0.0;
    Matrix grad;  // with respect to the logits
};

LossValue evaluate_loss(Loss loss, const Matrix& logits, const Matrix& target);

/// Adds its own gradient to `grads` when non-null and returns the penalty value.
using Regularizer = std::function<double(const DenseNet&, Gradients*)>;

/// Data term on (x, target) plus the regularizer, if any.
double objective(const DenseNet& net, const Matrix& x, const Matrix& target, Loss loss, const Regularizer& reg);

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamState {
public:
    explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

    /// One bias-corrected Adam update of every block in `params`.
    void step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads);

    std::uint64_t t() const noexcept { return t_; }
    const AdamConfig& config() const noexcept { return cfg_; }
    const std::vector<Vector>& first_moment() const noexcept { return m_; }
    const std::vector<Vector>& second_moment() const noexcept { return v_; }

private:
    AdamConfig cfg_;
    std::vector<Vector> m_;
    std::vector<Vector> v_;
    std::uint64_t t_ = 0;
};

void adam_step(AdamState& state, DenseNet& net, const Gradients& grads);

struct TrainConfig {
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    bool shuffle = true;
};

/// Mini-batch Adam training in place. Returns the full-data objective after each epoch.
std::vector<double> train(DenseNet& net, const Matrix& x, const Matrix& target, Loss loss, const Regularizer& reg,
                          const TrainConfig& cfg);

/// Largest relative error between backprop and central finite differences over all
/// parameters; relative error is |a - f| / max(|a|, |f|, 1e-8).
double check_gradients(const DenseNet& net, const Matrix& x, const Matrix& target, Loss loss, const Regularizer& reg,
                       double epsilon = 1e-5);

/// One-hot encoding of integer labels (n x classes).
Matrix one_hot(std::span<const int> labels, std::size_t classes);
/// Row-wise argmax.
std::vector<int> argmax_rows(const Matrix& m);

/// Plain-text layout: a "tsfs-net 1" header, layer sizes, output activation,
/// then each weight matrix row by row followed by its bias.
void save_net(std::ostream& out, const DenseNet& net);
DenseNet load_net(std::istream& in);

}  // namespace tsfs
