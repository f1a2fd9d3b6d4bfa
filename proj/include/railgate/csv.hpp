#pragma once

#include <filesystem>

#include "railgate/types.hpp"

namespace railgate {

// Dataset CSV: a header `f0,f1,...,f{d-1},label`, then one row per example
// with numeric features and a non-negative integer label. UTF-8, no quoting.
// Errors are FormatError naming file and line.

Dataset read_csv(const std::filesystem::path& path);

/// Features are written in shortest round-trip form, so re-reading yields
/// bit-identical values.
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace railgate
