#include "etale/reports.hpp"

#include <cstdio>
#include <sstream>

#include "etale/map_io.hpp"

namespace etale {

using nlohmann::json;

namespace {

// %.17g round-trips doubles and is locale independent for our use.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const TrackOptions& o) {
  return {{"h_init", o.h_init},
          {"h_min", o.h_min},
          {"h_max", o.h_max},
          {"newton_tol", o.newton_tol},
          {"newton_max_iter", o.newton_max_iter},
          {"shrink", o.shrink},
          {"grow", o.grow},
          {"singular_floor", o.singular_floor},
          {"cond_ceiling", o.cond_ceiling},
          {"escape_radius", o.escape_radius},
          {"max_steps", o.max_steps},
          {"singular_rel", o.singular_rel},
          {"rounding_factor", o.rounding_factor},
          {"newton_step_rtol", o.newton_step_rtol},
          {"max_det_log_change", o.max_det_log_change}};
}

json to_json(const FiberOptions& o) {
  return {{"dedup_tol", o.dedup_tol},
          {"fiber_tol", o.fiber_tol},
          {"loop_radius_scale", o.loop_radius_scale},
          {"loop_radius_offset", o.loop_radius_offset},
          {"stabilization_quota", o.stabilization_quota},
          {"max_retries", o.max_retries},
          {"seed_attempts", o.seed_attempts},
          {"real_tol", o.real_tol}};
}

json to_json(const EscapeOptions& o) {
  return {{"t_max", o.t_max},
          {"bisect_rtol", o.bisect_rtol},
          {"samples", o.samples},
          {"confirm_rtol", o.confirm_rtol},
          {"confirm_radius_factor", o.confirm_radius_factor},
          {"limit_log_slope", o.limit_log_slope}};
}

json to_json(const AsymptoticOptions& o) {
  return {{"den_max", o.den_max}, {"window_frac", o.window_frac}, {"term_floor", o.term_floor}};
}

json to_json(const KellerVerdict& v) {
  json out{{"verdict", std::string(to_string(v.kind))},
           {"det_degree_bound", v.det_degree_bound},
           {"failure_bound", v.failure_bound},
           {"failure_bound_log10", v.failure_bound_log10}};
  if (v.kind == KellerVerdict::Kind::ConstantDet) out["value"] = complex_to_json(v.value);
  json w = json::array();
  for (std::size_t k = 0; k < v.witnesses.size(); ++k) {
    w.push_back({{"point", vector_to_json(v.witnesses[k])}, {"det", complex_to_json(v.witness_dets[k])}});
  }
  out["witnesses"] = w;
  return out;
}

json fiber_report(const MonodromyResult& r) {
  json pts = json::array();
  for (const auto& p : r.fiber.points) pts.push_back(vector_to_json(p));
  json out{{"target", vector_to_json(r.fiber.target)},
           {"points", pts},
           {"degree", r.degree_estimate},
           {"stabilized", r.stabilized},
           {"loops", r.loops},
           {"permutations", r.permutations}};
  if (r.failed_loops > 0) out["failed_loops"] = r.failed_loops;
  if (!r.annotations.empty()) out["annotations"] = r.annotations;
  return out;
}

json expansion_report(const PuiseuxExpansion& e) {
  json terms = json::array();
  for (const auto& t : e.terms) terms.push_back({{"r", {t.r.num, t.r.den}}, {"c", t.coeff}});
  return {{"a", e.a},
          {"base", e.base_value ? json(*e.base_value) : json(nullptr)},
          {"terms", terms},
          {"residual", e.residual_bound},
          {"convention", e.convention == ExponentConvention::Power ? "power" : "blowup"}};
}

json escape_report(const EscapeResult& r) {
  if (const auto* u = std::get_if<Unbounded>(&r)) {
    return {{"kind", "Unbounded"}, {"t_max_checked", u->t_max_checked}, {"basis", std::string(to_string(u->basis))}};
  }
  const auto& e = std::get<EscapeEstimate>(r);
  json samples = json::array();
  for (const auto& [t, v] : e.samples) samples.push_back({t, v});
  return {{"kind", "Bracket"},
          {"x", vector_to_json(e.x)},
          {"a_bracket", {e.t_low, e.t_high}},
          {"failure", std::string(to_string(e.failure))},
          {"samples", samples}};
}

json symmetry_report(const SymmetryReport& r) {
  json scaling = json::array();
  for (const auto& [s, d] : r.scaling) scaling.push_back({{"s", s}, {"deviation", d}});
  return {{"odd_deviation", r.odd_deviation ? json(*r.odd_deviation) : json(nullptr)}, {"scaling", scaling}};
}

std::string curve_csv(const Curve& c) {
  std::ostringstream out;
  out << "t";
  for (Eigen::Index j = 0; j < c.y0.size(); ++j) out << ",re(y" << j + 1 << "),im(y" << j + 1 << ")";
  out << ",residual\n";
  for (const auto& p : c.points) {
    out << num(p.t);
    for (const auto& v : p.y) out << ',' << num(v.real()) << ',' << num(v.imag());
    out << ',' << num(p.residual) << '\n';
  }
  out << "# status=" << to_string(c.status) << " t_last=" << num(c.last().t) << " t_target=" << num(c.t_target)
      << '\n';
  return out.str();
}

std::string stratum_csv(const StratumReport& r) {
  std::ostringstream out;
  const Eigen::Index n = r.samples.empty() ? 0 : r.samples.front().target.size();
  for (Eigen::Index j = 0; j < n; ++j) out << "re(x" << j + 1 << "),im(x" << j + 1 << "),";
  out << "cardinality,status\n";
  for (const auto& s : r.samples) {
    for (const auto& v : s.target) out << num(v.real()) << ',' << num(v.imag()) << ',';
    out << s.cardinality << ',' << s.status << '\n';
  }
  return out.str();
}

}  // namespace etale
