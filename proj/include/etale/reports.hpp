#pragma once

#include <string>

#include "etale/asymptotics.hpp"
#include "etale/fibers.hpp"
#include "etale/polyring.hpp"
#include "etale/tracker.hpp"
#include "json.hpp"

namespace etale {

nlohmann::json to_json(const TrackOptions& o);
nlohmann::json to_json(const FiberOptions& o);
nlohmann::json to_json(const EscapeOptions& o);
nlohmann::json to_json(const AsymptoticOptions& o);

nlohmann::json to_json(const KellerVerdict& v);

/// {"target": [...], "points": [[...], ...], "degree": d, "stabilized": b,
///  "loops": k, "permutations": [[...], ...]}
nlohmann::json fiber_report(const MonodromyResult& r);

/// {"a": t, "base": v | null, "terms": [{"r": [p, q], "c": v}], "residual": v,
///  "convention": "power" | "blowup"}
nlohmann::json expansion_report(const PuiseuxExpansion& e);

nlohmann::json escape_report(const EscapeResult& r);

nlohmann::json symmetry_report(const SymmetryReport& r);

/// Columns t, re(y1), im(y1), ..., residual; trailing "# status" record.
std::string curve_csv(const Curve& c);

/// One row per grid target: re/im of each coordinate, cardinality, status.
std::string stratum_csv(const StratumReport& r);

}  // namespace etale
