#pragma once

#include "fluidq/model.hpp"

#include <string>
#include <string_view>

namespace fluidq {

// Model file: {"phases": [...], "rates": [...], "generator": [[...], ...]}.
// Row order in the file is the caller's phase order.

[[nodiscard]] FluidModel parse_model_json(std::string_view text);
[[nodiscard]] FluidModel load_model_file(const std::string& path);

/// Writes the model back in the caller's original phase order.
[[nodiscard]] std::string model_to_json(const FluidModel& model);

}  // namespace fluidq
