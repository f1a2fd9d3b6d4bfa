#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "railgate/types.hpp"

namespace railgate {

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

/// Multinomial logistic regression: l = W x + b.
struct LogisticRegression {
    Matrix weights;  // num_classes x input_dim
    std::vector<double> bias;

    bool operator==(const LogisticRegression&) const = default;
};

/// Two-layer perceptron: l = W2 relu(W1 x + b1) + b2.
struct Mlp2 {
    Matrix w1;  // hidden x input_dim
    std::vector<double> b1;
    Matrix w2;  // num_classes x hidden
    std::vector<double> b2;

    bool operator==(const Mlp2&) const = default;
};

enum class ModelKind { logistic_regression, mlp2 };

std::string_view to_string(ModelKind kind) noexcept;

/// An analytic model with exact input gradients. Read-only after
/// construction; safe to share between threads.
class BuiltinModel {
public:
    explicit BuiltinModel(LogisticRegression lr);
    explicit BuiltinModel(Mlp2 mlp);

    ModelKind kind() const noexcept;
    std::size_t input_dim() const noexcept;
    std::size_t num_classes() const noexcept;

    Logits predict(std::span<const double> x) const;

    /// d cross-entropy(softmax(f(x)), y) / dx. ReLU subgradient at 0 is 0.
    std::vector<double> loss_gradient(std::span<const double> x, std::size_t y) const;

    const std::variant<LogisticRegression, Mlp2>& params() const noexcept { return params_; }

    bool operator==(const BuiltinModel&) const = default;

private:
    void check_input(std::span<const double> x) const;

    std::variant<LogisticRegression, Mlp2> params_;
};

struct FitOptions {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;
};

struct FitResult {
    BuiltinModel model;
    std::vector<double> loss_history;  // mean cross-entropy before each epoch, then final
};

/// Full-batch gradient descent on mean cross-entropy from zero-initialised
/// weights. Classes are 0..max(label); at least two must be present.
FitResult fit_logistic(const Dataset& data, const FitOptions& options);

double mean_cross_entropy(const BuiltinModel& model, const Dataset& data);
double accuracy(const BuiltinModel& model, const Dataset& data);

}  // namespace railgate
