#pragma once

#include <json.hpp>

namespace arat {

// Document order matters for tie-breaking, so every JSON value in the engine
// keeps keys in insertion order.
using Json = nlohmann::ordered_json;

}  // namespace arat
