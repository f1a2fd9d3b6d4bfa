#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "railgate/model.hpp"

namespace railgate {

// Model document:
//   {"kind": "logistic_regression",
//    "dims": {"input_dim": d, "num_classes": k},
//    "weights": [[...d...], ...k rows...], "bias": [...k...]}
//   {"kind": "mlp2",
//    "dims": {"input_dim": d, "hidden": h, "num_classes": k},
//    "w1": [[...d...] x h], "b1": [...h...], "w2": [[...h...] x k], "b2": [...k...]}
// Arrays are row-major. Values round-trip exactly.

nlohmann::json model_to_json(const BuiltinModel& model);
BuiltinModel model_from_json(const nlohmann::json& doc);

void save_model(const BuiltinModel& model, const std::filesystem::path& path);
BuiltinModel load_model(const std::filesystem::path& path);

/// Reads and parses a JSON file; FormatError names the path on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace railgate
