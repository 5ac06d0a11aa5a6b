#pragma once

#include "spread/model_io.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace spread {

/// Ids of the model files compiled into the library (fixtures/*.json).
std::vector<std::string> fixture_ids();
/// Raw JSON of a built-in fixture; throws OutOfRangeError for unknown ids.
std::string_view fixture_text(std::string_view id);
ModelSpec fixture(std::string_view id);

} // namespace spread
