#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "tsfs/errors.hpp"
#include "tsfs/neural.hpp"
#include "tsfs/student.hpp"

using namespace tsfs;
using test::random_matrix;

namespace {

DenseNet tiny_net() {
    std::vector<Layer> layers(2);
    layers[0].w = Matrix{{2.0}};
    layers[0].b = {0.0};
    layers[1].w = Matrix{{3.0}};
    layers[1].b = {1.0};
    return DenseNet(std::move(layers), OutputActivation::identity);
}

}  // namespace

TEST(Forward, ZeroNetGivesZeroOutput) {
    std::vector<Layer> layers(2);
    layers[0].w = Matrix(3, 4, 0.0);
    layers[0].b = Vector(4, 0.0);
    layers[1].w = Matrix(4, 2, 0.0);
    layers[1].b = Vector(2, 0.0);
    const Matrix out = predict(DenseNet(std::move(layers), OutputActivation::identity), random_matrix(5, 3, 1));
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, HandEvaluation) {
    const DenseNet net = tiny_net();
    EXPECT_EQ(predict(net, Matrix{{1.0}})(0, 0), 7.0);
    EXPECT_EQ(predict(net, Matrix{{-1.0}})(0, 0), 1.0);
}

TEST(Forward, SoftmaxRowsSumToOne) {
    const DenseNet net({3, 5, 4}, OutputActivation::softmax, 2);
    const Matrix out = predict(net, random_matrix(6, 3, 2, 10.0));
    for (std::size_t i = 0; i < 6; ++i) {
        double s = 0.0;
        for (double v : out.row(i)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Forward, DimensionMismatch) {
    const DenseNet net({3, 2}, OutputActivation::identity, 0);
    EXPECT_THROW(forward(net, Matrix(2, 4)), InvalidInput);
}

TEST(Backward, ZeroLossGradientGivesZeroGradients) {
    const DenseNet net({4, 3, 2}, OutputActivation::identity, 1);
    const Matrix x = random_matrix(5, 4, 1);
    const auto g = backward(net, forward(net, x), Matrix(5, 2, 0.0));
    for (const auto& s : g.spans())
        for (double v : s) EXPECT_EQ(v, 0.0);
}

TEST(Backward, LinearLayerMatchesClosedForm) {
    const DenseNet net({3, 2}, OutputActivation::identity, 4);
    const Matrix x = random_matrix(7, 3, 2), y = random_matrix(7, 2, 3);
    const auto cache = forward(net, x);
    const auto loss = evaluate_loss(Loss::squared_error, cache.output, y);
    const auto g = backward(net, cache, loss.grad);
    Matrix resid = cache.output;
    for (std::size_t k = 0; k < resid.size(); ++k) resid.values()[k] -= y.values()[k];
    const Matrix want = matmul_tn(x, resid);
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(g.dw[0].values()[k], want.values()[k] / 7.0, 1e-12);
}

TEST(Backward, StaleCacheRejected) {
    DenseNet net({3, 2, 1}, OutputActivation::identity, 0);
    const Matrix x = random_matrix(4, 3, 0);
    const auto cache = forward(net, x);
    net.mutable_layer(0).b[0] += 1.0;
    EXPECT_THROW(backward(net, cache, Matrix(4, 1, 1.0)), InvalidInput);
}

TEST(CheckGradients, SquaredErrorSmallNet) {
    const DenseNet net({5, 4, 3}, OutputActivation::identity, 9);
    EXPECT_LT(check_gradients(net, random_matrix(6, 5, 1), random_matrix(6, 3, 2), Loss::squared_error, {}), 1e-4);
}

TEST(CheckGradients, SoftmaxCrossEntropy) {
    const DenseNet net({4, 6, 3}, OutputActivation::softmax, 3);
    const std::vector<int> labels{0, 1, 2, 1, 0};
    EXPECT_LT(check_gradients(net, random_matrix(5, 4, 7), one_hot(labels, 3), Loss::softmax_ce, {}), 1e-4);
}

TEST(CheckGradients, WithSmoothedL21) {
    const DenseNet net({5, 4, 3}, OutputActivation::identity, 10);
    EXPECT_LT(check_gradients(net, random_matrix(6, 5, 4), random_matrix(6, 3, 5), Loss::squared_error,
                              l21_regularizer(0.1, 1e-8)),
              1e-4);
}

TEST(CheckGradients, ZeroNetZeroData) {
    std::vector<Layer> layers(2);
    layers[0].w = Matrix(2, 2, 0.0);
    layers[0].b = Vector(2, 0.0);
    layers[1].w = Matrix(2, 1, 0.0);
    layers[1].b = Vector(1, 0.0);
    const DenseNet net(std::move(layers), OutputActivation::identity);
    EXPECT_EQ(check_gradients(net, Matrix(3, 2, 0.0), Matrix(3, 1, 0.0), Loss::squared_error, {}), 0.0);
}

TEST(Adam, FirstStepHandEvaluation) {
    AdamState state;
    std::vector<double> p{0.0};
    const std::vector<double> g{1.0};
    const std::vector<std::span<double>> params{p};
    const std::vector<std::span<const double>> grads{g};
    state.step(params, grads);
    EXPECT_NEAR(p[0], -0.001 / (1.0 + 1e-8), 1e-15);
    EXPECT_EQ(state.t(), 1u);
}

TEST(Adam, ZeroGradientNeverMoves) {
    AdamState state;
    std::vector<double> p{0.3, -1.2};
    const std::vector<double> g{0.0, 0.0};
    const std::vector<std::span<double>> params{p};
    const std::vector<std::span<const double>> grads{g};
    for (int i = 0; i < 50; ++i) state.step(params, grads);
    EXPECT_EQ(p[0], 0.3);
    EXPECT_EQ(p[1], -1.2);
}

TEST(Adam, OddSymmetry) {
    AdamState a, b;
    std::vector<double> pa{0.0, 0.0, 0.0}, pb{0.0, 0.0, 0.0};
    const std::vector<std::span<double>> sa{pa}, sb{pb};
    for (int it = 0; it < 5; ++it) {
        const std::vector<double> g{0.5 + it, -2.0, 1e-3 * it}, ng{-g[0], -g[1], -g[2]};
        const std::vector<std::span<const double>> ga{g}, gb{ng};
        a.step(sa, ga);
        b.step(sb, gb);
    }
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(pa[k], -pb[k]);
}

TEST(Train, ZeroEpochsLeavesNetUnchanged) {
    DenseNet net({2, 3, 1}, OutputActivation::identity, 1);
    const DenseNet before = net;
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto hist = train(net, random_matrix(10, 2, 1), random_matrix(10, 1, 2), Loss::squared_error, {}, cfg);
    EXPECT_TRUE(hist.empty());
    for (std::size_t l = 0; l < 2; ++l) {
        EXPECT_EQ(net.layer(l).w, before.layer(l).w);
        EXPECT_EQ(net.layer(l).b, before.layer(l).b);
    }
}

TEST(Train, LearnsSlopeOfLinearRegression) {
    const Matrix x = random_matrix(64, 1, 5);
    Matrix y(64, 1);
    for (std::size_t i = 0; i < 64; ++i) y(i, 0) = 2.0 * x(i, 0);
    DenseNet net({1, 1}, OutputActivation::identity, 3);
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    train(net, x, y, Loss::squared_error, {}, cfg);
    EXPECT_NEAR(net.layer(0).w(0, 0), 2.0, 0.05);
}

TEST(Train, DeterministicHistory) {
    const Matrix x = random_matrix(40, 3, 1), y = random_matrix(40, 2, 2);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 4;
    DenseNet a({3, 5, 2}, OutputActivation::identity, 6), b({3, 5, 2}, OutputActivation::identity, 6);
    EXPECT_EQ(train(a, x, y, Loss::squared_error, {}, cfg), train(b, x, y, Loss::squared_error, {}, cfg));
}

TEST(Train, NonFiniteLossAborts) {
    const Matrix x = random_matrix(16, 2, 1, 1e200), y = random_matrix(16, 1, 2, 1e200);
    DenseNet net({2, 4, 1}, OutputActivation::identity, 0);
    TrainConfig cfg;
    cfg.epochs = 3;
    EXPECT_THROW(train(net, x, y, Loss::squared_error, {}, cfg), NumericalError);
}

TEST(Helpers, OneHotAndArgmax) {
    const std::vector<int> labels{2, 0, 1};
    const Matrix m = one_hot(labels, 3);
    EXPECT_EQ(m(0, 2), 1.0);
    EXPECT_EQ(m(1, 0), 1.0);
    EXPECT_EQ(argmax_rows(m), labels);
}

TEST(Serialization, SaveLoadRoundTrip) {
    const DenseNet net({3, 4, 2}, OutputActivation::softmax, 8);
    std::stringstream s;
    save_net(s, net);
    const DenseNet back = load_net(s);
    EXPECT_EQ(back.output_activation(), OutputActivation::softmax);
    for (std::size_t l = 0; l < 2; ++l) {
        EXPECT_EQ(back.layer(l).w, net.layer(l).w);
        EXPECT_EQ(back.layer(l).b, net.layer(l).b);
    }
}
