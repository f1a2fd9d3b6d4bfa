#include "railgate/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "railgate/errors.hpp"

namespace railgate {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(fmt::format("{}: cannot open file", path.string()));

    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    Dataset data;
    const auto where = [&] { return fmt::format("{}:{}", path.string(), line_no); };

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (view.empty()) continue;
        const auto cells = split(view);

        if (line_no == 1) {
            if (cells.size() < 2 || trim(cells.back()) != "label") {
                throw FormatError(fmt::format("{}: header must be f0,...,f{{d-1}},label", where()));
            }
            dim = cells.size() - 1;
            for (std::size_t j = 0; j < dim; ++j) {
                if (trim(cells[j]) != fmt::format("f{}", j)) {
                    throw FormatError(fmt::format("{}: header column {} is '{}', expected 'f{}'", where(), j + 1,
                                                  trim(cells[j]), j));
                }
            }
            continue;
        }

        if (cells.size() != dim + 1) {
            throw FormatError(fmt::format("{}: expected {} columns, found {}", where(), dim + 1, cells.size()));
        }
        std::vector<double> row(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            const auto cell = trim(cells[j]);
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
                throw FormatError(fmt::format("{}: column f{} value '{}' is not numeric", where(), j, cell));
            }
        }
        const auto cell = trim(cells[dim]);
        std::size_t label = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
            throw FormatError(fmt::format("{}: label '{}' is not a non-negative integer", where(), cell));
        }
        data.push_back(std::move(row), label);
    }
    if (line_no == 0) throw FormatError(fmt::format("{}: file is empty", path.string()));
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError(fmt::format("{}: cannot write file", path.string()));
    const std::size_t dim = data.dim();
    for (std::size_t j = 0; j < dim; ++j) out << 'f' << j << ',';
    out << "label\n";
    std::array<char, 32> buf{};
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.features[i]) {
            const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
            out.write(buf.data(), ptr - buf.data());
            out << ',';
        }
        out << data.labels[i] << '\n';
    }
}

}  // namespace railgate
