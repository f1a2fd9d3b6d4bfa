#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "railgate/commands.hpp"
#include "railgate/adversarial.hpp"

namespace railgate::testing {

using big = boost::multiprecision::cpp_bin_float_50;

Dataset two_gaussians(double mean, double sigma, std::size_t n_per_class, std::uint64_t seed, std::size_t dim) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Dataset out;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t label = 0; label < 2; ++label) {
            const double m = label == 0 ? -mean : mean;
            std::vector<double> row(dim);
            for (auto& v : row) v = m + noise(rng);
            out.push_back(std::move(row), label);
        }
    }
    return out;
}

Dataset gaussian_blob(double center, double sigma, std::size_t n, std::uint64_t seed, std::size_t dim) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Dataset out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(dim);
        for (auto& v : row) v = center + noise(rng);
        out.push_back(std::move(row), 0);
    }
    return out;
}

Dataset bounded_signal_task(std::size_t n_per_class, std::uint64_t seed, std::size_t background) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.15);
    std::uniform_real_distribution<double> bg(0.0, 0.05);
    Dataset out;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t label = 0; label < 2; ++label) {
            const double m = label == 0 ? 0.35 : 0.65;
            std::vector<double> row;
            for (int s = 0; s < 2; ++s) row.push_back(std::clamp(m + noise(rng), 0.0, 1.0));
            for (std::size_t b = 0; b < background; ++b) row.push_back(bg(rng));
            out.push_back(std::move(row), label);
        }
    }
    return out;
}

std::vector<double> random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

BuiltinModel random_logreg(std::size_t dim, std::size_t classes, std::mt19937_64& rng, double scale) {
    LogisticRegression p{Matrix(classes, dim), random_vector(classes, -scale, scale, rng)};
    p.weights.data = random_vector(classes * dim, -scale, scale, rng);
    return BuiltinModel(std::move(p));
}

BuiltinModel random_mlp(std::size_t dim, std::size_t hidden, std::size_t classes, std::mt19937_64& rng,
                        double scale) {
    Mlp2 p{Matrix(hidden, dim), random_vector(hidden, -scale, scale, rng), Matrix(classes, hidden),
           random_vector(classes, -scale, scale, rng)};
    p.w1.data = random_vector(hidden * dim, -scale, scale, rng);
    p.w2.data = random_vector(classes * hidden, -scale, scale, rng);
    return BuiltinModel(std::move(p));
}

TempDir::TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / fmt::format("railgate-test-{:08x}{:08x}", rd(), rd());
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

GatewayFixture make_gateway_fixture(std::uint64_t seed, std::size_t window) {
    GatewayFixture fx;
    fx.train = two_gaussians(3.0, 0.5, 200, seed);
    auto fit = fit_logistic(fx.train, FitOptions{0.1, 300, seed});
    fx.model = std::make_shared<const BuiltinModel>(fit.model);

    cli::CalibrateArgs cal;
    cal.window = window;
    cal.seed = seed;
    auto summary = cli::calibrate_reference(*fx.model, fx.train, cal);

    auto det = train_detector(*fx.model, fx.train, DetectorTrainingOptions{0.5, std::nullopt, 0.9, 0.5, 500, seed});

    ModelConfig cfg;
    cfg.contract.model_id = "demo";
    cfg.contract.input_dim = 2;
    cfg.contract.num_classes = 2;
    cfg.contract.class_labels = {"neg", "pos"};
    cfg.backend = fx.model;
    cfg.detector = det.detector;
    cfg.reference = summary.stats;
    cfg.ood = summary.stats.thresholds;
    fx.config = std::move(cfg);
    return fx;
}

std::vector<double> softmax_reference(std::span<const double> logits, double temperature) {
    std::vector<big> e;
    big total = 0;
    for (double l : logits) {
        e.push_back(boost::multiprecision::exp(big(l) / big(temperature)));
        total += e.back();
    }
    std::vector<double> out;
    for (const auto& v : e) out.push_back(static_cast<double>(v / total));
    return out;
}

double log_sum_exp_reference(std::span<const double> logits, double temperature) {
    big total = 0;
    for (double l : logits) total += boost::multiprecision::exp(big(l) / big(temperature));
    return static_cast<double>(big(temperature) * boost::multiprecision::log(total));
}

double hellinger_reference(std::span<const double> p, std::span<const double> q) {
    big ss = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const big d = boost::multiprecision::sqrt(big(p[i])) - boost::multiprecision::sqrt(big(q[i]));
        ss += d * d;
    }
    return static_cast<double>(boost::multiprecision::sqrt(ss / 2));
}

double auroc_pairs(std::span<const double> pos, std::span<const double> neg) {
    double wins = 0.0;
    for (double p : pos) {
        for (double n : neg) {
            if (p > n) {
                wins += 1.0;
            } else if (p == n) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

std::vector<double> finite_difference_gradient(const BuiltinModel& model, std::span<const double> x, std::size_t y,
                                               double h) {
    // Loss evaluated directly from the logits, independent of the
    // analytic backward pass.
    const auto loss = [&](const std::vector<double>& v) {
        const auto l = model.predict(v).values;
        const double top = *std::max_element(l.begin(), l.end());
        double s = 0.0;
        for (double li : l) s += std::exp(li - top);
        return top + std::log(s) - l[y];
    };
    std::vector<double> g(x.size());
    std::vector<double> v(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = v[i];
        v[i] = orig + h;
        const double up = loss(v);
        v[i] = orig - h;
        const double down = loss(v);
        v[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace railgate::testing
