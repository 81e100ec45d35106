#pragma once

#include <string>
#include <string_view>

#include "etale/polyring.hpp"
#include "json.hpp"

namespace etale {

// Canonical map document:
//   {"n": 2, "components": [[{"c": [re, im], "e": [e1, e2]}, ...], ...]}
// Terms are written in lexicographic exponent order.

nlohmann::json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& terms, std::size_t n);

nlohmann::json map_to_json(const PolyMap& map);
PolyMap map_from_json(const nlohmann::json& doc);

PolyMap parse_map(std::string_view text);
std::string serialize_map(const PolyMap& map);

PolyMap load_map(const std::string& path);

nlohmann::json complex_to_json(Complex c);
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const CVec& v);
CVec vector_from_json(const nlohmann::json& j);

}  // namespace etale
