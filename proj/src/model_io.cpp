#include "railgate/model_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "railgate/errors.hpp"

namespace railgate {

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& doc, const char* name, std::size_t rows, std::size_t cols) {
    if (!doc.contains(name) || !doc[name].is_array()) {
        throw FormatError(fmt::format("model field '{}' missing or not an array", name));
    }
    const auto& arr = doc[name];
    if (arr.size() != rows) {
        throw FormatError(fmt::format("model field '{}' has {} rows, dims declare {}", name, arr.size(), rows));
    }
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = arr[r];
        if (!row.is_array() || row.size() != cols) {
            throw FormatError(fmt::format("model field '{}' row {} does not have {} columns", name, r, cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number()) {
                throw FormatError(fmt::format("model field '{}' row {} column {} is not a number", name, r, c));
            }
            m(r, c) = row[c].get<double>();
        }
    }
    return m;
}

std::vector<double> vector_from_json(const nlohmann::json& doc, const char* name, std::size_t len) {
    if (!doc.contains(name) || !doc[name].is_array()) {
        throw FormatError(fmt::format("model field '{}' missing or not an array", name));
    }
    const auto& arr = doc[name];
    if (arr.size() != len) {
        throw FormatError(fmt::format("model field '{}' has {} entries, dims declare {}", name, arr.size(), len));
    }
    std::vector<double> out;
    out.reserve(len);
    for (const auto& v : arr) {
        if (!v.is_number()) throw FormatError(fmt::format("model field '{}' holds a non-number", name));
        out.push_back(v.get<double>());
    }
    return out;
}

std::size_t dim_from_json(const nlohmann::json& dims, const char* name) {
    if (!dims.contains(name) || !dims[name].is_number_unsigned() || dims[name].get<std::size_t>() == 0) {
        throw FormatError(fmt::format("model dims.{} missing or not a positive integer", name));
    }
    return dims[name].get<std::size_t>();
}

}  // namespace

nlohmann::json model_to_json(const BuiltinModel& model) {
    nlohmann::json doc;
    doc["kind"] = to_string(model.kind());
    if (const auto* lr = std::get_if<LogisticRegression>(&model.params())) {
        doc["dims"] = {{"input_dim", model.input_dim()}, {"num_classes", model.num_classes()}};
        doc["weights"] = matrix_to_json(lr->weights);
        doc["bias"] = lr->bias;
        return doc;
    }
    const auto& m = std::get<Mlp2>(model.params());
    doc["dims"] = {{"input_dim", model.input_dim()}, {"hidden", m.w1.rows}, {"num_classes", model.num_classes()}};
    doc["w1"] = matrix_to_json(m.w1);
    doc["b1"] = m.b1;
    doc["w2"] = matrix_to_json(m.w2);
    doc["b2"] = m.b2;
    return doc;
}

BuiltinModel model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
        throw FormatError("model document has no 'kind'");
    }
    if (!doc.contains("dims") || !doc["dims"].is_object()) {
        throw FormatError("model document has no 'dims'");
    }
    const auto kind = doc["kind"].get<std::string>();
    const auto& dims = doc["dims"];
    const auto input_dim = dim_from_json(dims, "input_dim");
    const auto classes = dim_from_json(dims, "num_classes");
    if (kind == "logistic_regression") {
        return BuiltinModel(LogisticRegression{matrix_from_json(doc, "weights", classes, input_dim),
                                               vector_from_json(doc, "bias", classes)});
    }
    if (kind == "mlp2") {
        const auto hidden = dim_from_json(dims, "hidden");
        return BuiltinModel(Mlp2{matrix_from_json(doc, "w1", hidden, input_dim), vector_from_json(doc, "b1", hidden),
                                 matrix_from_json(doc, "w2", classes, hidden), vector_from_json(doc, "b2", classes)});
    }
    throw FormatError(fmt::format("unknown model kind '{}'", kind));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError(fmt::format("cannot open '{}'", path.string()));
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError(fmt::format("cannot write '{}'", path.string()));
    }
    out << doc.dump(2) << '\n';
}

void save_model(const BuiltinModel& model, const std::filesystem::path& path) {
    write_json_file(model_to_json(model), path);
}

BuiltinModel load_model(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    try {
        return model_from_json(doc);
    } catch (const FormatError& e) {
        throw FormatError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

}  // namespace railgate
