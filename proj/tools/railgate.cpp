#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "railgate/commands.hpp"
#include "railgate/errors.hpp"

namespace {

using namespace railgate;
using namespace railgate::cli;

std::optional<ClipRange> parse_clip(const std::vector<double>& v) {
    if (v.empty()) return std::nullopt;
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("--clip takes two values LO HI with LO < HI");
    return ClipRange{v[0], v[1]};
}

bool is_usage_error(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::config:
        case ErrorKind::format:
        case ErrorKind::precondition:
        case ErrorKind::calibration:
            return true;
        default:
            return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"railgate: safeguarding gateway for ML model inference"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit a logistic regression model from a CSV");
    fit_cmd->add_option("--data", fit.data, "training CSV (f0..f{d-1},label)")->required();
    fit_cmd->add_option("--out", fit.out, "model JSON to write")->required();
    fit_cmd->add_option("--learning-rate", fit.learning_rate, "gradient descent step")->capture_default_str();
    fit_cmd->add_option("--epochs", fit.epochs, "full-batch epochs")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed)->capture_default_str();

    TrainDetectorArgs det;
    std::vector<double> det_clip;
    auto* det_cmd = app.add_subcommand("train-detector", "fit the auxiliary adversarial detector on FGSM data");
    det_cmd->add_option("--model", det.model, "guarded model JSON")->required();
    det_cmd->add_option("--data", det.data, "clean labelled CSV")->required();
    det_cmd->add_option("--out", det.out, "detector JSON to write")->required();
    det_cmd->add_option("--epsilon", det.epsilon)->capture_default_str();
    det_cmd->add_option("--clip", det_clip, "clip perturbed values to LO HI")->expected(2);
    det_cmd->add_option("--tau", det.tau, "decision threshold in (0,1)")->capture_default_str();
    det_cmd->add_option("--learning-rate", det.learning_rate)->capture_default_str();
    det_cmd->add_option("--epochs", det.epochs)->capture_default_str();
    det_cmd->add_option("--seed", det.seed)->capture_default_str();

    CalibrateArgs cal;
    std::vector<std::string> cal_detectors;
    std::string cal_policy = "majority";
    auto* cal_cmd = app.add_subcommand("calibrate", "compute reference stats and OOD thresholds");
    cal_cmd->add_option("--model", cal.model)->required();
    cal_cmd->add_option("--data", cal.data, "in-distribution training CSV")->required();
    cal_cmd->add_option("--out", cal.out, "reference stats JSON to write")->required();
    cal_cmd->add_option("--target-tpr", cal.target_tpr)->capture_default_str();
    cal_cmd->add_option("--bins", cal.bins)->capture_default_str();
    cal_cmd->add_option("--window", cal.window)->capture_default_str();
    cal_cmd->add_option("--drift-threshold", cal.drift_threshold)->capture_default_str();
    cal_cmd->add_option("--background", cal.background_rows, "background rows kept for explanations")
        ->capture_default_str();
    cal_cmd->add_option("--temperature", cal.temperature)->capture_default_str();
    cal_cmd->add_option("--detectors", cal_detectors, "subset of msp max_logit energy");
    cal_cmd->add_option("--policy", cal_policy, "any | majority | all")->capture_default_str();
    cal_cmd->add_option("--seed", cal.seed)->capture_default_str();

    AttackArgs atk;
    std::vector<double> atk_clip;
    auto* atk_cmd = app.add_subcommand("attack", "write an FGSM-perturbed copy of a CSV");
    atk_cmd->add_option("--model", atk.model)->required();
    atk_cmd->add_option("--data", atk.data)->required();
    atk_cmd->add_option("--out", atk.out)->required();
    atk_cmd->add_option("--epsilon", atk.epsilon)->capture_default_str();
    atk_cmd->add_option("--clip", atk_clip)->expected(2);

    EvaluateArgs ev;
    std::string ev_kind = "ood";
    std::string ev_out;
    std::string ev_reference;
    std::string ev_ood;
    std::string ev_detector;
    std::string ev_adv;
    std::vector<double> ev_clip;
    auto* ev_cmd = app.add_subcommand("evaluate", "report AUROC / TPR / FPR for a detector");
    ev_cmd->add_option("--kind", ev_kind, "ood | adversarial")->capture_default_str();
    ev_cmd->add_option("--model", ev.model)->required();
    ev_cmd->add_option("--data", ev.data, "in-distribution or clean CSV")->required();
    ev_cmd->add_option("--reference", ev_reference, "reference stats (ood)");
    ev_cmd->add_option("--ood-data", ev_ood, "OOD CSV (ood)");
    ev_cmd->add_option("--detector", ev_detector, "detector JSON (adversarial)");
    ev_cmd->add_option("--adv-data", ev_adv, "perturbed CSV; generated with FGSM when absent");
    ev_cmd->add_option("--epsilon", ev.epsilon)->capture_default_str();
    ev_cmd->add_option("--clip", ev_clip)->expected(2);
    ev_cmd->add_option("--temperature", ev.temperature)->capture_default_str();
    ev_cmd->add_option("--out", ev_out, "report JSON (stdout when absent)");

    std::string config;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP gateway");
    serve_cmd->add_option("--config", config, "gateway config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fit_cmd) {
            const auto r = cmd_fit(fit);
            std::cerr << fmt::format("fit: {} epochs, loss {:.6g} -> {:.6g}\n", fit.epochs, r.loss_history.front(),
                                     r.loss_history.back());
        } else if (*det_cmd) {
            det.clip = parse_clip(det_clip);
            const auto r = cmd_train_detector(det);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        } else if (*cal_cmd) {
            if (!cal_detectors.empty()) {
                cal.detectors.clear();
                for (const auto& d : cal_detectors) cal.detectors.push_back(ood_detector_from_string(d));
            }
            cal.policy = vote_policy_from_string(cal_policy);
            const auto r = cmd_calibrate(cal);
            for (const auto& [d, tpr] : r.achieved_tpr) {
                std::cerr << fmt::format("calibrate: {} threshold {:.17g} tpr {:.6f}\n", to_string(d),
                                         *r.stats.thresholds.threshold_for(d), tpr);
            }
        } else if (*atk_cmd) {
            atk.clip = parse_clip(atk_clip);
            cmd_attack(atk);
        } else if (*ev_cmd) {
            if (ev_kind == "ood") {
                ev.kind = EvalKind::ood;
            } else if (ev_kind == "adversarial") {
                ev.kind = EvalKind::adversarial;
            } else {
                throw ConfigError(fmt::format("--kind must be ood or adversarial, got '{}'", ev_kind));
            }
            if (!ev_out.empty()) ev.out = ev_out;
            if (!ev_reference.empty()) ev.reference = ev_reference;
            if (!ev_ood.empty()) ev.ood_data = ev_ood;
            if (!ev_detector.empty()) ev.detector = ev_detector;
            if (!ev_adv.empty()) ev.adv_data = ev_adv;
            ev.clip = parse_clip(ev_clip);
            cmd_evaluate(ev);
        } else if (*serve_cmd) {
            return cmd_serve(config);
        }
    } catch (const Error& e) {
        std::cerr << "railgate: " << e.what() << '\n';
        return is_usage_error(e) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "railgate: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
