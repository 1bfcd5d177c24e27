#pragma once

#include <filesystem>

#include "cma/grid.hpp"

namespace cma {

/// CSV snapshot: `# cma-field 1` header carrying shape, m, n, h and the shape
/// parameters, then one row per node with a value (node index, class,
/// coordinates, value at 17 significant digits, so re-reading is exact).
void write_field(const std::filesystem::path& path, const ScalarField& field);

ScalarField read_field(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace cma
