#include "etale/map_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace etale {

using nlohmann::json;

namespace {

double finite_number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string("non-finite ") + what);
  return v;
}

}  // namespace

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {finite_number(j, "coefficient"), 0.0};
  if (!j.is_array() || j.size() != 2) throw InputError("complex value must be [re, im]");
  return {finite_number(j[0], "coefficient"), finite_number(j[1], "coefficient")};
}

json vector_to_json(const CVec& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(complex_to_json(c));
  return out;
}

CVec vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("vector must be an array of [re, im] pairs");
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  return v;
}

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back({{"c", complex_to_json(c)}, {"e", m.exponents()}});
  }
  return terms;
}

Polynomial polynomial_from_json(const json& terms, std::size_t n) {
  if (!terms.is_array()) throw InputError("polynomial must be an array of terms");
  Polynomial p(n);
  for (const auto& t : terms) {
    if (!t.is_object() || !t.contains("c") || !t.contains("e")) {
      throw InputError("term must be an object with \"c\" and \"e\"");
    }
    const json& e = t.at("e");
    if (!e.is_array()) throw InputError("exponents must be an array");
    if (e.size() != n) {
      throw DimensionError("term has " + std::to_string(e.size()) + " exponents, expected " +
                           std::to_string(n));
    }
    std::vector<int> exps;
    for (const auto& v : e) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw InputError("exponents must be non-negative integers");
      }
      exps.push_back(v.get<int>());
    }
    p.add_term(Monomial(std::move(exps)), complex_from_json(t.at("c")));
  }
  return p;
}

json map_to_json(const PolyMap& map) {
  json comps = json::array();
  for (const auto& p : map.components()) comps.push_back(polynomial_to_json(p));
  return {{"n", map.dim()}, {"components", comps}};
}

PolyMap map_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("components")) {
    throw InputError("map document needs \"n\" and \"components\"");
  }
  if (!doc.at("n").is_number_integer() || doc.at("n").get<long long>() < 1) {
    throw InputError("\"n\" must be a positive integer");
  }
  const auto n = doc.at("n").get<std::size_t>();
  const json& comps = doc.at("components");
  if (!comps.is_array()) throw InputError("\"components\" must be an array");
  if (comps.size() != n) {
    throw DimensionError("map is not square: " + std::to_string(comps.size()) +
                         " components in " + std::to_string(n) + " variables");
  }
  std::vector<Polynomial> polys;
  for (const auto& c : comps) polys.push_back(polynomial_from_json(c, n));
  return PolyMap(std::move(polys));
}

PolyMap parse_map(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed map document: ") + e.what());
  }
  return map_from_json(doc);
}

std::string serialize_map(const PolyMap& map) { return map_to_json(map).dump(); }

PolyMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open map file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

}  // namespace etale
