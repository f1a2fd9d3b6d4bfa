#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "railgate/gateway.hpp"
#include "railgate/model.hpp"
#include "railgate/types.hpp"

namespace railgate::testing {

/// Two isotropic Gaussian classes: label 0 around -mean, label 1 around
/// +mean (mean applied to every coordinate). Rows interleave the classes.
Dataset two_gaussians(double mean, double sigma, std::size_t n_per_class, std::uint64_t seed, std::size_t dim = 2);

/// A single Gaussian blob around `center` (every coordinate), labelled 0.
Dataset gaussian_blob(double center, double sigma, std::size_t n, std::uint64_t seed, std::size_t dim = 2);

/// Bounded image-like task in [0,1]: two Gaussian signal channels (class
/// means 0.35 / 0.65, sigma 0.15) and `background` near-zero channels
/// uniform on [0, 0.05]. FGSM on this data is clipped to [0,1].
Dataset bounded_signal_task(std::size_t n_per_class, std::uint64_t seed, std::size_t background = 8);

BuiltinModel random_logreg(std::size_t dim, std::size_t classes, std::mt19937_64& rng, double scale = 1.0);
BuiltinModel random_mlp(std::size_t dim, std::size_t hidden, std::size_t classes, std::mt19937_64& rng,
                        double scale = 1.0);

std::vector<double> random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng);

/// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Calibrated end-to-end fixture on the +-(3,3), sigma 0.5 task: fitted
/// logistic model, detector, reference stats.
struct GatewayFixture {
    Dataset train;
    std::shared_ptr<const BuiltinModel> model;
    ModelConfig config;
};

GatewayFixture make_gateway_fixture(std::uint64_t seed = 7, std::size_t window = 200);

// ---- independent oracles ----

/// 50-digit softmax / log-sum-exp / Hellinger evaluated with
/// boost::multiprecision, returned as double.
std::vector<double> softmax_reference(std::span<const double> logits, double temperature);
double log_sum_exp_reference(std::span<const double> logits, double temperature);
double hellinger_reference(std::span<const double> p, std::span<const double> q);

/// Direct pair counting.
double auroc_pairs(std::span<const double> pos, std::span<const double> neg);

/// Central finite differences of the cross-entropy loss w.r.t. x.
std::vector<double> finite_difference_gradient(const BuiltinModel& model, std::span<const double> x, std::size_t y,
                                               double h = 1e-5);

}  // namespace railgate::testing
