#pragma once

#include <vector>

#include "stride/registry.hpp"

namespace stride {

inline constexpr double kArgmaxTieTolerance = 1e-9;

/// All indices i with values[i] >= max(values) - 1e-9, ascending.
std::vector<int> get_arg_max(const std::vector<double>& values);

double get_max(const std::vector<double>& values);

/// Registers GetArgMax and GetMax.
void register_numeric_ops(Registry& registry);

}  // namespace stride
