#pragma once

#include <json.hpp>

namespace medlist {

/// Insertion-ordered JSON so wire bodies keep the documented key order.
using Json = nlohmann::ordered_json;

}  // namespace medlist
