#include "railgate/commands.hpp"

#include <algorithm>
#include <csignal>
#include <iostream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "railgate/csv.hpp"
#include "railgate/errors.hpp"
#include "railgate/gateway.hpp"
#include "railgate/http_server.hpp"
#include "railgate/model_io.hpp"
#include "railgate/numeric.hpp"

namespace railgate::cli {

namespace {

void require_dim(const Dataset& data, std::size_t dim, const Path& path) {
    if (data.empty()) throw FormatError(fmt::format("{}: no data rows", path.string()));
    if (data.dim() != dim) {
        throw FormatError(fmt::format("{}: {} feature columns, model expects {}", path.string(), data.dim(), dim));
    }
}

void require_labels(const Dataset& data, std::size_t classes, const Path& path) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] >= classes) {
            throw FormatError(fmt::format("{}: row {} has label {} but the model has {} classes", path.string(), i + 1,
                                          data.labels[i], classes));
        }
    }
}

std::vector<double> scores_for(const BuiltinModel& model, const Dataset& data, OodDetector detector,
                               double temperature) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& x : data.features) {
        const auto logits = model.predict(x);
        out.push_back(ood_score(detector, logits, softmax(logits, temperature), temperature));
    }
    return out;
}

}  // namespace

FitResult cmd_fit(const FitArgs& args) {
    const auto data = read_csv(args.data);
    if (data.empty()) throw FormatError(fmt::format("{}: no data rows", args.data.string()));
    auto result = fit_logistic(data, FitOptions{args.learning_rate, args.epochs, args.seed});
    save_model(result.model, args.out);
    return result;
}

DetectorTrainingResult cmd_train_detector(const TrainDetectorArgs& args) {
    const auto model = load_model(args.model);
    const auto data = read_csv(args.data);
    require_dim(data, model.input_dim(), args.data);
    require_labels(data, model.num_classes(), args.data);
    auto result = train_detector(model, data,
                                 DetectorTrainingOptions{args.epsilon, args.clip, args.tau, args.learning_rate,
                                                         args.epochs, args.seed});
    save_detector(result.detector, args.out);
    return result;
}

CalibrationSummary calibrate_reference(const BuiltinModel& model, const Dataset& data, const CalibrateArgs& args) {
    if (data.dim() != model.input_dim()) {
        throw FormatError(fmt::format("calibration data has {} features, model expects {}", data.dim(),
                                      model.input_dim()));
    }
    CalibrationSummary summary;
    auto& stats = summary.stats;
    stats.histograms = fit_histograms(data, args.bins);
    stats.target_tpr = args.target_tpr;
    stats.drift_threshold = args.drift_threshold;
    stats.window_size = args.window;
    stats.thresholds.policy = args.policy;
    for (auto d : args.detectors) {
        auto scores = scores_for(model, data, d, args.temperature);
        const double th = calibrate(scores, args.target_tpr);
        summary.achieved_tpr.emplace_back(d, rate_at_or_above(scores, th));
        stats.thresholds.detectors.push_back({d, th});
        stats.calibration_scores[d] = std::move(scores);
    }

    std::vector<std::size_t> index(data.size());
    std::iota(index.begin(), index.end(), 0);
    std::vector<std::size_t> picked;
    std::mt19937_64 rng(args.seed);
    std::sample(index.begin(), index.end(), std::back_inserter(picked), args.background_rows, rng);
    for (auto i : picked) stats.background.push_back(data.features[i]);
    stats.check();
    return summary;
}

CalibrationSummary cmd_calibrate(const CalibrateArgs& args) {
    const auto model = load_model(args.model);
    const auto data = read_csv(args.data);
    require_dim(data, model.input_dim(), args.data);
    auto summary = calibrate_reference(model, data, args);
    save_reference_stats(summary.stats, args.out);
    return summary;
}

Dataset cmd_attack(const AttackArgs& args) {
    const auto model = load_model(args.model);
    const auto data = read_csv(args.data);
    require_dim(data, model.input_dim(), args.data);
    require_labels(data, model.num_classes(), args.data);
    Dataset out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.push_back(fgsm(model, data.features[i], data.labels[i], args.epsilon, args.clip), data.labels[i]);
    }
    write_csv(out, args.out);
    return out;
}

std::vector<EvalReport> evaluate_ood(const BuiltinModel& model, const Dataset& in_dist, const Dataset& ood,
                                     const OodThresholds& thresholds, double temperature) {
    std::vector<EvalReport> out;
    for (const auto& t : thresholds.detectors) {
        const auto pos = scores_for(model, in_dist, t.detector, temperature);
        const auto neg = scores_for(model, ood, t.detector, temperature);
        out.push_back(evaluate_detector(std::string(to_string(t.detector)), pos, neg, t.min_score));
    }
    return out;
}

EvalReport evaluate_adversarial(const AdvDetector& detector, const Dataset& clean, const Dataset& perturbed) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (const auto& x : perturbed.features) pos.push_back(detector.score(x));
    for (const auto& x : clean.features) neg.push_back(detector.score(x));
    return evaluate_detector("adversarial", pos, neg, detector.tau);
}

std::vector<EvalReport> cmd_evaluate(const EvaluateArgs& args) {
    const auto model = load_model(args.model);
    const auto data = read_csv(args.data);
    require_dim(data, model.input_dim(), args.data);

    std::vector<EvalReport> reports;
    if (args.kind == EvalKind::ood) {
        if (!args.reference || !args.ood_data) throw ConfigError("ood evaluation needs --reference and --ood-data");
        const auto ref = load_reference_stats(*args.reference);
        const auto ood = read_csv(*args.ood_data);
        require_dim(ood, model.input_dim(), *args.ood_data);
        reports = evaluate_ood(model, data, ood, ref.thresholds, args.temperature);
    } else {
        if (!args.detector) throw ConfigError("adversarial evaluation needs --detector");
        const auto detector = load_detector(*args.detector);
        Dataset perturbed;
        if (args.adv_data) {
            perturbed = read_csv(*args.adv_data);
            require_dim(perturbed, model.input_dim(), *args.adv_data);
        } else {
            require_labels(data, model.num_classes(), args.data);
            for (std::size_t i = 0; i < data.size(); ++i) {
                perturbed.push_back(fgsm(model, data.features[i], data.labels[i], args.epsilon, args.clip),
                                    data.labels[i]);
            }
        }
        reports.push_back(evaluate_adversarial(detector, data, perturbed));
    }

    auto doc = nlohmann::json::array();
    for (const auto& r : reports) doc.push_back(to_json(r));
    if (args.out) {
        write_json_file(doc, *args.out);
    } else {
        std::cout << doc.dump(2) << '\n';
    }
    return reports;
}

namespace {

HttpServer* g_server = nullptr;

extern "C" void handle_stop_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int cmd_serve(const Path& config) {
    const auto cfg = load_gateway_config(config);
    auto log = cfg.log_path ? std::make_shared<StructuredLog>(*cfg.log_path) : std::make_shared<StructuredLog>(std::cerr);
    Gateway gateway(cfg.models, log);
    HttpServer server(gateway);
    g_server = &server;
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    std::cerr << fmt::format("railgate listening on {}:{}\n", cfg.host, cfg.port);
    const bool ok = server.listen(cfg.host, cfg.port);
    g_server = nullptr;
    if (!ok) {
        std::cerr << fmt::format("railgate: cannot listen on {}:{}\n", cfg.host, cfg.port);
        return 1;
    }
    return 0;
}

}  // namespace railgate::cli
