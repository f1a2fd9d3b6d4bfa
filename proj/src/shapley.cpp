#include "railgate/shapley.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/numeric.hpp"

namespace railgate {

namespace {

void check_inputs(std::span<const double> x, const Background& background) {
    if (x.empty()) throw PreconditionError("cannot explain an empty input");
    if (background.rows.empty()) throw PreconditionError("background must be non-empty");
    for (const auto& row : background.rows) {
        if (row.size() != x.size()) {
            throw PreconditionError(fmt::format("background row has {} features, input has {}", row.size(), x.size()));
        }
        if (!all_finite(row)) throw PreconditionError("background rows must be finite");
    }
}

double value_of_mask(const ModelFn& model, std::span<const double> x, const Background& background,
                     std::uint64_t mask, std::size_t target_class) {
    std::vector<double> composite(x.size());
    double total = 0.0;
    for (const auto& row : background.rows) {
        for (std::size_t i = 0; i < x.size(); ++i) composite[i] = (mask >> i) & 1U ? x[i] : row[i];
        const auto logits = model(composite);
        if (target_class >= logits.size()) {
            throw PreconditionError(fmt::format("target class {} out of range", target_class));
        }
        total += logits.values[target_class];
    }
    return total / static_cast<double>(background.rows.size());
}

// Multiplicative form over min(k, n-k): exact while C(n, k) < 2^53 and
// symmetric in k <-> n-k.
double binomial(std::size_t n, std::size_t k) {
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

}  // namespace

double coalition_value(const ModelFn& model, std::span<const double> x, const Background& background,
                       const std::vector<bool>& in_coalition, std::size_t target_class) {
    check_inputs(x, background);
    if (in_coalition.size() != x.size()) throw PreconditionError("coalition mask length differs from input");
    if (x.size() > 63) throw PreconditionError("coalitions over more than 63 features are not supported");
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < in_coalition.size(); ++i) {
        if (in_coalition[i]) mask |= std::uint64_t{1} << i;
    }
    return value_of_mask(model, x, background, mask, target_class);
}

Explanation exact_shapley(const ModelFn& model, std::span<const double> x, const Background& background,
                          std::size_t target_class) {
    check_inputs(x, background);
    const std::size_t M = x.size();
    if (M > kMaxExactFeatures) {
        throw PreconditionError(
            fmt::format("exact Shapley enumeration supports at most {} features, got {}; use kernel_shap",
                        kMaxExactFeatures, M));
    }
    const std::uint64_t count = std::uint64_t{1} << M;
    std::vector<double> v(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) v[mask] = value_of_mask(model, x, background, mask, target_class);

    // weight[s] = s! (M - s - 1)! / M!
    std::vector<double> weight(M);
    for (std::size_t s = 0; s < M; ++s) {
        weight[s] = std::exp(std::lgamma(static_cast<double>(s) + 1.0) +
                             std::lgamma(static_cast<double>(M - s - 1) + 1.0) -
                             std::lgamma(static_cast<double>(M) + 1.0));
    }

    Explanation out;
    out.target_class = target_class;
    out.base_value = v[0];
    out.phi.assign(M, 0.0);
    out.diagnostics.full_enumeration = true;
    out.diagnostics.coalitions = count;
    for (std::size_t i = 0; i < M; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        double phi = 0.0;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            if (mask & bit) continue;
            phi += weight[static_cast<std::size_t>(std::popcount(mask))] * (v[mask | bit] - v[mask]);
        }
        out.phi[i] = phi;
    }
    return out;
}

double shap_kernel_weight(std::size_t M, std::size_t k) {
    if (k == 0 || k >= M) {
        throw PreconditionError(fmt::format("kernel weight needs 0 < k < M (k={}, M={})", k, M));
    }
    return static_cast<double>(M - 1) / (binomial(M, k) * static_cast<double>(k) * static_cast<double>(M - k));
}

Explanation kernel_shap(const ModelFn& model, std::span<const double> x, const Background& background,
                        std::size_t target_class, std::size_t n_samples, std::uint64_t seed) {
    check_inputs(x, background);
    const std::size_t M = x.size();
    if (n_samples < kernel_shap_min_samples(M)) {
        throw PreconditionError(
            fmt::format("kernel_shap needs at least {} samples for {} features, got {}", kernel_shap_min_samples(M), M,
                        n_samples));
    }
    if (M > 63) throw PreconditionError("kernel_shap supports at most 63 features");

    Explanation out;
    out.target_class = target_class;
    out.base_value = value_of_mask(model, x, background, 0, target_class);
    const std::uint64_t full = (std::uint64_t{1} << M) - 1;
    const double fx = value_of_mask(model, x, background, full, target_class);
    const double total = fx - out.base_value;
    if (M == 1) {
        out.phi = {total};
        out.diagnostics.full_enumeration = true;
        return out;
    }

    // Coalition mask -> accumulated regression weight.
    std::map<std::uint64_t, double> coalitions;
    const bool enumerate = M < 63 && static_cast<double>(n_samples) >= std::ldexp(1.0, static_cast<int>(M)) - 2.0;
    if (enumerate) {
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            coalitions[mask] = shap_kernel_weight(M, static_cast<std::size_t>(std::popcount(mask)));
        }
    } else {
        // Size k is drawn with probability proportional to C(M,k) * pi(M,k),
        // then a uniform subset of that size; each draw carries unit weight.
        std::vector<double> size_weights(M - 1);
        for (std::size_t k = 1; k < M; ++k) size_weights[k - 1] = binomial(M, k) * shap_kernel_weight(M, k);
        std::mt19937_64 rng(seed);
        std::discrete_distribution<std::size_t> pick_size(size_weights.begin(), size_weights.end());
        std::vector<std::size_t> order(M);
        for (std::size_t s = 0; s < n_samples; ++s) {
            const std::size_t k = pick_size(rng) + 1;
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::uint64_t mask = 0;
            for (std::size_t t = 0; t < k; ++t) {
                std::uniform_int_distribution<std::size_t> pick(t, M - 1);
                std::swap(order[t], order[pick(rng)]);
                mask |= std::uint64_t{1} << order[t];
            }
            coalitions[mask] += 1.0;
        }
    }
    out.diagnostics.full_enumeration = enumerate;
    out.diagnostics.coalitions = coalitions.size();

    // Regress y(z) - z_last * total on (z_i - z_last) for i < M-1, then
    // recover phi_last from the efficiency constraint.
    const std::size_t P = M - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P));
    Eigen::VectorXd row(static_cast<Eigen::Index>(P));
    for (const auto& [mask, w] : coalitions) {
        const double z_last = (mask >> P) & 1U ? 1.0 : 0.0;
        const double y = value_of_mask(model, x, background, mask, target_class) - out.base_value - z_last * total;
        for (std::size_t i = 0; i < P; ++i) {
            row[static_cast<Eigen::Index>(i)] = ((mask >> i) & 1U ? 1.0 : 0.0) - z_last;
        }
        A.noalias() += w * row * row.transpose();
        rhs.noalias() += w * y * row;
    }

    Eigen::VectorXd phi;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    const double scale = A.diagonal().cwiseAbs().maxCoeff();
    const auto& d = ldlt.vectorD();
    const bool singular = ldlt.info() != Eigen::Success || scale <= 0.0 ||
                          d.minCoeff() <= 1e-12 * scale;
    if (!singular) {
        phi = ldlt.solve(rhs);
    } else {
        constexpr double kRidge = 1e-8;
        out.diagnostics.ridge_used = true;
        Eigen::MatrixXd reg = A;
        reg.diagonal().array() += kRidge;
        phi = reg.ldlt().solve(rhs);
    }

    out.phi.assign(M, 0.0);
    double assigned = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        out.phi[i] = phi[static_cast<Eigen::Index>(i)];
        assigned += out.phi[i];
    }
    out.phi[P] = total - assigned;
    return out;
}

}  // namespace railgate
