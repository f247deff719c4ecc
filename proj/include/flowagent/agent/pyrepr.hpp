#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace flowagent::agent {

// Python repr of a JSON value: {'k': 'v'}, True/False/None.
std::string to_pyrepr(const nlohmann::ordered_json& value);

// Parses a Python literal (dict, list, tuple, str, int, float, True, False,
// None). Dict key order is preserved. Throws std::invalid_argument.
nlohmann::ordered_json parse_pyliteral(std::string_view text);

}  // namespace flowagent::agent
