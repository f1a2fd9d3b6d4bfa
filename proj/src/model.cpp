#include "railgate/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/numeric.hpp"

namespace railgate {

std::string_view to_string(ModelKind kind) noexcept {
    return kind == ModelKind::logistic_regression ? "logistic_regression" : "mlp2";
}

namespace {

void check_params(const Matrix& m, std::span<const double> b, std::string_view what) {
    if (m.rows == 0 || m.cols == 0 || m.data.size() != m.rows * m.cols) {
        throw FormatError(fmt::format("{}: malformed weight matrix", what));
    }
    if (b.size() != m.rows) {
        throw FormatError(fmt::format("{}: bias has {} entries for {} rows", what, b.size(), m.rows));
    }
    if (!all_finite(m.data) || !all_finite(b)) {
        throw FormatError(fmt::format("{}: non-finite weight", what));
    }
}

void affine(const Matrix& w, std::span<const double> b, std::span<const double> x, std::vector<double>& out) {
    out.assign(b.begin(), b.end());
    for (std::size_t r = 0; r < w.rows; ++r) {
        const auto row = w.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        out[r] += acc;
    }
}

// out = W^T v
std::vector<double> transpose_times(const Matrix& w, std::span<const double> v) {
    std::vector<double> out(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const auto row = w.row(r);
        for (std::size_t c = 0; c < w.cols; ++c) out[c] += row[c] * v[r];
    }
    return out;
}

std::vector<double> softmax_minus_onehot(const std::vector<double>& logits, std::size_t y) {
    auto p = softmax(Logits{logits}).values;
    p[y] -= 1.0;
    return p;
}

}  // namespace

BuiltinModel::BuiltinModel(LogisticRegression lr) : params_(std::move(lr)) {
    const auto& p = std::get<LogisticRegression>(params_);
    check_params(p.weights, p.bias, "logistic_regression");
}

BuiltinModel::BuiltinModel(Mlp2 mlp) : params_(std::move(mlp)) {
    const auto& p = std::get<Mlp2>(params_);
    check_params(p.w1, p.b1, "mlp2 layer 1");
    check_params(p.w2, p.b2, "mlp2 layer 2");
    if (p.w2.cols != p.w1.rows) {
        throw FormatError(fmt::format("mlp2: layer 2 expects {} inputs, layer 1 has {} units", p.w2.cols, p.w1.rows));
    }
}

ModelKind BuiltinModel::kind() const noexcept {
    return std::holds_alternative<LogisticRegression>(params_) ? ModelKind::logistic_regression : ModelKind::mlp2;
}

std::size_t BuiltinModel::input_dim() const noexcept {
    if (const auto* lr = std::get_if<LogisticRegression>(&params_)) return lr->weights.cols;
    return std::get<Mlp2>(params_).w1.cols;
}

std::size_t BuiltinModel::num_classes() const noexcept {
    if (const auto* lr = std::get_if<LogisticRegression>(&params_)) return lr->weights.rows;
    return std::get<Mlp2>(params_).w2.rows;
}

void BuiltinModel::check_input(std::span<const double> x) const {
    if (x.size() != input_dim()) {
        throw PreconditionError(fmt::format("model expects {} features, got {}", input_dim(), x.size()));
    }
}

Logits BuiltinModel::predict(std::span<const double> x) const {
    check_input(x);
    Logits out;
    if (const auto* lr = std::get_if<LogisticRegression>(&params_)) {
        affine(lr->weights, lr->bias, x, out.values);
        return out;
    }
    const auto& m = std::get<Mlp2>(params_);
    std::vector<double> hidden;
    affine(m.w1, m.b1, x, hidden);
    for (double& h : hidden) h = h > 0.0 ? h : 0.0;
    affine(m.w2, m.b2, hidden, out.values);
    return out;
}

std::vector<double> BuiltinModel::loss_gradient(std::span<const double> x, std::size_t y) const {
    check_input(x);
    if (y >= num_classes()) {
        throw PreconditionError(fmt::format("class index {} out of range for {} classes", y, num_classes()));
    }
    if (const auto* lr = std::get_if<LogisticRegression>(&params_)) {
        std::vector<double> logits;
        affine(lr->weights, lr->bias, x, logits);
        return transpose_times(lr->weights, softmax_minus_onehot(logits, y));
    }
    const auto& m = std::get<Mlp2>(params_);
    std::vector<double> pre;
    affine(m.w1, m.b1, x, pre);
    std::vector<double> hidden(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) hidden[i] = pre[i] > 0.0 ? pre[i] : 0.0;
    std::vector<double> logits;
    affine(m.w2, m.b2, hidden, logits);
    auto d_hidden = transpose_times(m.w2, softmax_minus_onehot(logits, y));
    for (std::size_t i = 0; i < pre.size(); ++i) {
        if (!(pre[i] > 0.0)) d_hidden[i] = 0.0;
    }
    return transpose_times(m.w1, d_hidden);
}

double mean_cross_entropy(const BuiltinModel& model, const Dataset& data) {
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto logits = model.predict(data.features[i]);
        total += log_sum_exp(logits.values) - logits.values[data.labels[i]];
    }
    return total / static_cast<double>(data.size());
}

double accuracy(const BuiltinModel& model, const Dataset& data) {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (argmax(model.predict(data.features[i]).values) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

FitResult fit_logistic(const Dataset& data, const FitOptions& options) {
    if (data.empty()) {
        throw ConfigError("cannot fit on an empty dataset");
    }
    const std::size_t dim = data.dim();
    const std::set<std::size_t> present(data.labels.begin(), data.labels.end());
    if (present.size() < 2) {
        throw ConfigError("dataset must contain at least two classes");
    }
    for (const auto& row : data.features) {
        if (row.size() != dim || !all_finite(row)) {
            throw ConfigError("dataset rows must be finite and of equal length");
        }
    }
    if (!(options.learning_rate > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    const std::size_t classes = *present.rbegin() + 1;
    const double n = static_cast<double>(data.size());

    // The seed does not enter the update: initialisation is zero and every
    // epoch visits rows in file order.
    LogisticRegression params{Matrix(classes, dim), std::vector<double>(classes, 0.0)};
    std::vector<double> loss_history;
    loss_history.reserve(options.epochs + 1);

    Matrix grad_w(classes, dim);
    std::vector<double> grad_b(classes);
    std::vector<double> logits;
    for (std::size_t epoch = 0; epoch <= options.epochs; ++epoch) {
        std::fill(grad_w.data.begin(), grad_w.data.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& x = data.features[i];
            affine(params.weights, params.bias, x, logits);
            loss += log_sum_exp(logits) - logits[data.labels[i]];
            const auto delta = softmax_minus_onehot(logits, data.labels[i]);
            for (std::size_t k = 0; k < classes; ++k) {
                grad_b[k] += delta[k];
                for (std::size_t j = 0; j < dim; ++j) grad_w(k, j) += delta[k] * x[j];
            }
        }
        loss_history.push_back(loss / n);
        if (epoch == options.epochs) break;
        const double step = options.learning_rate / n;
        for (std::size_t k = 0; k < classes; ++k) {
            params.bias[k] -= step * grad_b[k];
            for (std::size_t j = 0; j < dim; ++j) params.weights(k, j) -= step * grad_w(k, j);
        }
    }
    return FitResult{BuiltinModel(std::move(params)), std::move(loss_history)};
}

}  // namespace railgate
