#include "etale/cli.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <functional>

#include "CLI11.hpp"
#include "etale/asymptotics.hpp"
#include "etale/fibers.hpp"
#include "etale/map_io.hpp"
#include "etale/mapgen.hpp"
#include "etale/random.hpp"
#include "etale/reports.hpp"
#include "etale/tracker.hpp"

namespace etale::cli {

using nlohmann::json;

namespace {

struct Settings {
  TrackOptions track;
  FiberOptions fiber;
  EscapeOptions escape;
  AsymptoticOptions asym;
  KellerOptions keller;
  int keller_samples = 64;
};

using Setter = std::function<void(Settings&, double)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"h_init", [](Settings& s, double v) { s.track.h_init = v; }},
      {"h_min", [](Settings& s, double v) { s.track.h_min = v; }},
      {"h_max", [](Settings& s, double v) { s.track.h_max = v; }},
      {"newton_tol", [](Settings& s, double v) { s.track.newton_tol = v; }},
      {"newton_max_iter", [](Settings& s, double v) { s.track.newton_max_iter = static_cast<int>(v); }},
      {"shrink", [](Settings& s, double v) { s.track.shrink = v; }},
      {"grow", [](Settings& s, double v) { s.track.grow = v; }},
      {"singular_floor",
       [](Settings& s, double v) {
         s.track.singular_floor = v;
         s.keller.singular_floor = v;
       }},
      {"cond_ceiling", [](Settings& s, double v) { s.track.cond_ceiling = v; }},
      {"escape_radius", [](Settings& s, double v) { s.track.escape_radius = v; }},
      {"max_steps", [](Settings& s, double v) { s.track.max_steps = static_cast<long>(v); }},
      {"singular_rel", [](Settings& s, double v) { s.track.singular_rel = v; }},
      {"rounding_factor", [](Settings& s, double v) { s.track.rounding_factor = v; }},
      {"newton_step_rtol", [](Settings& s, double v) { s.track.newton_step_rtol = v; }},
{"max_det_log_change", [](Settings& s, double v) { s.track.max_det_log_change = v; }},
      {"dedup_tol", [](Settings& s, double v) { s.fiber.dedup_tol = v; }},
      {"fiber_tol", [](Settings& s, double v) { s.fiber.fiber_tol = v; }},
      {"loop_radius_scale", [](Settings& s, double v) { s.fiber.loop_radius_scale = v; }},
      {"loop_radius_offset", [](Settings& s, double v) { s.fiber.loop_radius_offset = v; }},
      {"stabilization_quota", [](Settings& s, double v) { s.fiber.stabilization_quota = static_cast<int>(v); }},
      {"max_retries", [](Settings& s, double v) { s.fiber.max_retries = static_cast<int>(v); }},
      {"seed_attempts", [](Settings& s, double v) { s.fiber.seed_attempts = static_cast<int>(v); }},
      {"real_tol", [](Settings& s, double v) { s.fiber.real_tol = v; }},
      {"t_max", [](Settings& s, double v) { s.escape.t_max = v; }},
      {"bisect_rtol", [](Settings& s, double v) { s.escape.bisect_rtol = v; }},
      {"escape_samples", [](Settings& s, double v) { s.escape.samples = static_cast<int>(v); }},
      {"confirm_rtol", [](Settings& s, double v) { s.escape.confirm_rtol = v; }},
      {"confirm_radius_factor", [](Settings& s, double v) { s.escape.confirm_radius_factor = v; }},
      {"limit_log_slope", [](Settings& s, double v) { s.escape.limit_log_slope = v; }},
      {"den_max", [](Settings& s, double v) { s.asym.den_max = static_cast<int>(v); }},
      {"window_frac", [](Settings& s, double v) { s.asym.window_frac = v; }},
      {"term_floor", [](Settings& s, double v) { s.asym.term_floor = v; }},
      {"keller_samples", [](Settings& s, double v) { s.keller_samples = static_cast<int>(v); }},
      {"sample_box", [](Settings& s, double v) { s.keller.sample_box = v; }},
      {"det_rtol", [](Settings& s, double v) { s.keller.det_rtol = v; }},
  };
  return table;
}

Settings build_settings(const RunConfig& cfg) {
  Settings s;
  for (const auto& [key, value] : cfg.overrides) {
    auto it = setters().find(key);
    if (it == setters().end()) throw InputError("unknown tolerance key '" + key + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw InputError("value for '" + key + "' is not a number: " + value);
    }
    it->second(s, v);
  }
  if (cfg.den_max) s.asym.den_max = *cfg.den_max;
  s.fiber.workers = cfg.workers;
  s.track.validate();
  return s;
}

json options_json(const Settings& s) {
  return {{"track", to_json(s.track)},
          {"fiber", to_json(s.fiber)},
          {"escape", to_json(s.escape)},
          {"asymptotics", to_json(s.asym)},
          {"keller",
           {{"samples", s.keller_samples},
            {"sample_box", s.keller.sample_box},
            {"det_rtol", s.keller.det_rtol},
            {"singular_floor", s.keller.singular_floor}}}};
}

Complex parse_complex(const std::string& tok) {
  const auto colon = tok.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const double re = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return {re, 0.0};
    }
    const std::string a = tok.substr(0, colon), b = tok.substr(colon + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(tok);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(tok);
    return {re, im};
  } catch (const std::exception&) {
    throw InputError("cannot parse complex number '" + tok + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

CVec parse_vector(const std::string& s, std::size_t n, const char* what) {
  const auto toks = split(s, ',');
  if (toks.size() != n) {
    throw DimensionError(std::string(what) + " has " + std::to_string(toks.size()) + " coordinates, expected " +
                         std::to_string(n));
  }
  CVec v(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) v[static_cast<Eigen::Index>(j)] = parse_complex(toks[j]);
  return v;
}

Box parse_region(const std::string& s, std::size_t n) {
  const auto coords = split(s, ',');
  if (coords.size() != n) throw DimensionError("region needs one range per coordinate");
  Box box;
  for (const auto& c : coords) {
    const auto parts = split(c, ':');
    if (parts.size() != 4) throw InputError("region coordinate must be re_lo:re_hi:im_lo:im_hi");
    std::array<double, 4> r{};
    for (int k = 0; k < 4; ++k) {
      try {
        r[static_cast<std::size_t>(k)] = std::stod(parts[static_cast<std::size_t>(k)]);
      } catch (const std::exception&) {
        throw InputError("bad region bound '" + parts[static_cast<std::size_t>(k)] + "'");
      }
    }
    box.ranges.push_back(r);
  }
  return box;
}

// Writes to a temporary sibling and renames, so readers never see a partial file.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  const std::filesystem::path target(cfg.output_path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InputError("cannot write " + tmp.string());
    f << text;
  }
  std::filesystem::rename(tmp, target);
}

void emit_json(const RunConfig& cfg, std::ostream& out, const json& j) { emit(cfg, out, j.dump(2) + "\n"); }

PolyMap require_map(const RunConfig& cfg) {
  if (cfg.map_path.empty()) throw InputError("--map is required for '" + cfg.command + "'");
  return load_map(cfg.map_path);
}

CVec require_vector(const std::optional<std::string>& s, std::size_t n, const char* flag) {
  if (!s) throw InputError(std::string(flag) + " is required");
  return parse_vector(*s, n, flag);
}

void diagnose(std::ostream& err, const TrackingFailure& f) {
  err << "numeric failure: " << f.what() << "\n  last point t=" << f.last.t << " residual=" << f.last.residual
      << "\n  y=" << vector_to_json(f.last.y).dump() << "\n";
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

// ---------------------------------------------------------------- commands

int cmd_check(const RunConfig& cfg, const Settings& s, std::ostream& out) {
  const PolyMap map = require_map(cfg);
  const KellerVerdict v = keller_check(map, s.keller_samples, cfg.seed, s.keller);
  json j{{"command", "check"},
         {"keller", to_json(v)},
         {"odd", is_odd(map)},
         {"seed", cfg.seed},
         {"options", options_json(s)}};
  emit_json(cfg, out, j);
  return v.kind == KellerVerdict::Kind::ConstantDet ? kSuccess : kVerdictFailure;
}

int cmd_invert(const RunConfig& cfg, const Settings& s, std::ostream& out, std::ostream& err) {
  const PolyMap map = require_map(cfg);
  const CVec x = require_vector(cfg.x, map.dim(), "--x");
  CVec y;
  bool detour = false;
  try {
    y = invert_point(map, x, s.track);
  } catch (const TrackingFailure& first) {
    err << "straight ray failed (" << first.what() << "); retrying along a rotated ray\n";
    try {
      y = invert_point_detour(map, x, 0.1, s.track);
      detour = true;
    } catch (const TrackingFailure& second) {
      diagnose(err, second);
      return kNumericFailure;
    }
  }
  json j{{"command", "invert"},
         {"x", vector_to_json(x)},
         {"y", vector_to_json(y)},
         {"residual", (map.eval(y) - x).norm()},
         {"detour", detour},
         {"options", options_json(s)}};
  emit_json(cfg, out, j);
  return kSuccess;
}

int cmd_track(const RunConfig& cfg, const Settings& s, std::ostream& out, std::ostream& err) {
  const PolyMap map = require_map(cfg);
  const CVec x = require_vector(cfg.x, map.dim(), "--x");
  if (!cfg.t) throw InputError("--t is required for 'track'");
  const Curve c = cfg.y0 ? track(map, x, parse_vector(*cfg.y0, map.dim(), "--y0"), cfg.t0, *cfg.t, s.track)
                         : gamma(map, x, *cfg.t, s.track);
  std::string text = "# options=" + to_json(s.track).dump() + "\n" + curve_csv(c);
  emit(cfg, out, text);
  if (!c.reached()) {
    diagnose(err, TrackingFailure(c.status, c.last()));
    return kNumericFailure;
  }
  return kSuccess;
}

int cmd_escape(const RunConfig& cfg, const Settings& s, std::ostream& out) {
  const PolyMap map = require_map(cfg);
  const CVec x = require_vector(cfg.x, map.dim(), "--x");
  const EscapeResult r = cfg.y0 ? escape_time_from(map, x, parse_vector(*cfg.y0, map.dim(), "--y0"), s.track, s.escape)
                                : escape_time(map, x, s.track, s.escape);
  json j{{"command", "escape"}, {"escape", escape_report(r)}, {"options", options_json(s)}};
  if (const auto* est = std::get_if<EscapeEstimate>(&r)) {
    try {
      j["asymptotics"] = expansion_report(asymptotics_from_estimate(*est, s.asym));
    } catch (const std::runtime_error& e) {
      j["asymptotics"] = {{"error", e.what()}};
    }
    json channels = json::array();
    for (const auto& c : channel_asymptotics(*est, s.asym)) {
      channels.push_back(c.expansion ? expansion_report(*c.expansion) : json{{"error", c.error}});
    }
    j["channels"] = channels;
  }
  emit_json(cfg, out, j);
  return kSuccess;
}

int cmd_fiber(const RunConfig& cfg, const Settings& s, std::ostream& out) {
  const PolyMap map = require_map(cfg);
  const CVec target = require_vector(cfg.x, map.dim(), "--x");
  const MonodromyResult r = fiber_monodromy(map, target, s.track, s.fiber, cfg.loops, cfg.seed);
  json j = fiber_report(r);
  j["command"] = "fiber";
  j["options"] = options_json(s);
  emit_json(cfg, out, j);
  return r.stabilized ? kSuccess : kVerdictFailure;
}

int cmd_degree(const RunConfig& cfg, const Settings& s, std::ostream& out) {
  const PolyMap map = require_map(cfg);
  const BirationalityVerdict v = birationality_verdict(map, cfg.trials, cfg.seed, s.track, s.fiber, cfg.loops);
  json runs = json::array();
  for (const auto& r : v.runs) runs.push_back(fiber_report(r));
  json j{{"command", "degree"},
         {"verdict", v.kind == BirationalityVerdict::Kind::Degree ? "Degree" : "Inconclusive"},
         {"degree", v.degree},
         {"evidence", v.evidence},
         {"runs", runs},
         {"options", options_json(s)}};
  emit_json(cfg, out, j);
  return v.kind == BirationalityVerdict::Kind::Degree ? kSuccess : kVerdictFailure;
}

int cmd_stratify(const RunConfig& cfg, const Settings& s, std::ostream& out) {
  const PolyMap map = require_map(cfg);
  if (!cfg.region) throw InputError("--region is required for 'stratify'");
  const Box box = parse_region(*cfg.region, map.dim());
  const StratumReport r = stratify(map, box, cfg.grid, s.track, s.fiber, cfg.loops, cfg.seed, cfg.real_only);
  std::string text = "# options=" + options_json(s).dump() + "\n" + stratum_csv(r);
  emit(cfg, out, text);
  return kSuccess;
}

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  if (cfg.random_recipe) {
    emit_json(cfg, out, recipe_to_json(random_recipe(cfg.seed)));
    return kSuccess;
  }
  PolyMap map;
  if (!cfg.recipe_path.empty()) {
    map = realize(load_recipe(cfg.recipe_path));
  } else if (!cfg.name.empty()) {
    map = named_example(cfg.name);
  } else {
    throw InputError("'gen' needs --recipe, --name or --random");
  }
  emit(cfg, out, serialize_map(map) + "\n");
  return kSuccess;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  json detail;
};

int cmd_verify(const RunConfig& cfg, const Settings& s, std::ostream& out) {
  json j{{"command", "verify"}};
  std::vector<CheckResult> checks;

  if (!cfg.manifest_path.empty()) {
    std::ifstream in(cfg.manifest_path);
    if (!in) throw InputError("cannot open manifest " + cfg.manifest_path);
    json manifest;
    try {
      manifest = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed manifest: ") + e.what());
    }
    const auto dir = std::filesystem::path(cfg.manifest_path).parent_path();
    for (const auto& [file, digest] : manifest.at("files").items()) {
      const std::string got = sha256_file((dir / file).string());
      checks.push_back({"sha256:" + file, got == digest.get<std::string>(), got});
    }
  }

  if (!cfg.map_path.empty()) {
    const PolyMap map = load_map(cfg.map_path);
    const std::size_t n = map.dim();
    Rng rng(cfg.seed);

    // Symbolic Jacobian against central differences, with the h^2 constant
    // estimated from a second halving of h.
    {
      double worst = 0.0;
      bool ok = true;
      for (int k = 0; k < 8; ++k) {
        const CVec y = rng.box(n, 1.0);
        const CMat jac = map.jacobian_matrix(y);
        const double h = 1e-3;
        for (std::size_t jdx = 0; jdx < n; ++jdx) {
          CVec e = CVec::Zero(static_cast<Eigen::Index>(n));
          e[static_cast<Eigen::Index>(jdx)] = 1.0;
          const CVec fd1 = (map.eval(y + h * e) - map.eval(y - h * e)) / (2 * h);
          const CVec fd2 = (map.eval(y + 0.5 * h * e) - map.eval(y - 0.5 * h * e)) / h;
          const double c_est = (4.0 / 3.0) * (fd1 - fd2).norm() / (h * h);
          const double noise = 1e3 * std::numeric_limits<double>::epsilon() *
                               (1.0 + map.eval_with_magnitude(y).magnitude) / h;
          const double err = (fd1 - jac.col(static_cast<Eigen::Index>(jdx))).norm();
          worst = std::max(worst, err);
          if (err > 2.0 * c_est * h * h + noise) ok = false;
        }
      }
      checks.push_back({"jacobian_fd", ok, worst});
    }

    if (is_odd(map)) {
      double worst = 0.0;
      for (int k = 0; k < 1000; ++k) {
        const CVec y = rng.box(n, 1.0);
        worst = std::max(worst, (map.eval(-y) + map.eval(y)).norm());
      }
      checks.push_back({"odd_semantics", worst == 0.0, worst});
    }

    const KellerVerdict kv = keller_check(map, s.keller_samples, cfg.seed, s.keller);
    checks.push_back({"keller", kv.kind == KellerVerdict::Kind::ConstantDet, to_json(kv)});

    if (!cfg.recipe_path.empty()) {
      const AutomorphismRecipe recipe = load_recipe(cfg.recipe_path);
      if (recipe.n != n) throw DimensionError("recipe and map dimensions differ");
      const Complex expected = recipe_determinant(recipe);
      checks.push_back({"keller_value",
                        kv.kind == KellerVerdict::Kind::ConstantDet &&
                            std::abs(kv.value - expected) <= 1e-9 * std::abs(expected),
                        complex_to_json(expected)});
      const AutomorphismRecipe inv = analytic_inverse(recipe);
      double eval_err = 0.0, inv_err = 0.0;
      bool tracked = true;
      for (int k = 0; k < 20; ++k) {
        const CVec y = rng.box(n, 1.0);
        const CVec fx = apply_recipe(recipe, y);
        eval_err = std::max(eval_err, (map.eval(y) - fx).norm() / (1.0 + fx.norm()));
        const CVec x = rng.ball(n, 10.0);
        try {
          inv_err = std::max(inv_err, (invert_point(map, x, s.track) - apply_recipe(inv, x)).norm());
        } catch (const TrackingFailure&) {
          tracked = false;
        }
      }
      checks.push_back({"recipe_eval", eval_err <= 1e-9, eval_err});
      checks.push_back({"inverse_oracle", tracked && inv_err <= 1e-8, inv_err});
    }

    const CVec zero = CVec::Zero(static_cast<Eigen::Index>(n));
    const JacobianSample j0 = jacobian_at(map, zero);
    if (map.eval(zero).norm() <= s.track.newton_tol && std::abs(j0.determinant) > s.track.singular_floor) {
      const CVec x = rng.ball(n, 1.0);
      const Curve fwd = gamma(map, x, 1.0, s.track);
      bool ok = fwd.reached();
      double back_err = std::numeric_limits<double>::infinity();
      if (ok) {
        const Curve back = track_anchored(map, x, fwd.last().y, map.eval(zero) + x, 1.0, 0.0, s.track);
        ok = back.reached();
        if (ok) back_err = back.last().y.norm();
      }
      checks.push_back({"retrack", ok && back_err <= 100 * s.track.newton_tol, ok ? json(back_err) : json(nullptr)});
    }
  }

  if (checks.empty()) throw InputError("'verify' needs --map and/or --manifest");
  bool all = true;
  json arr = json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    arr.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["checks"] = arr;
  j["pass"] = all;
  j["seed"] = cfg.seed;
  j["options"] = options_json(s);
  emit_json(cfg, out, j);
  return all ? kSuccess : kVerdictFailure;
}

}  // namespace

const std::vector<std::string>& override_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, fn] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Settings s = build_settings(cfg);
    const std::string& c = cfg.command;
    if (c == "check") return cmd_check(cfg, s, out);
    if (c == "invert") return cmd_invert(cfg, s, out, err);
    if (c == "track") return cmd_track(cfg, s, out, err);
    if (c == "escape") return cmd_escape(cfg, s, out);
    if (c == "fiber") return cmd_fiber(cfg, s, out);
    if (c == "degree") return cmd_degree(cfg, s, out);
    if (c == "stratify") return cmd_stratify(cfg, s, out);
    if (c == "gen") return cmd_gen(cfg, out);
    if (c == "verify") return cmd_verify(cfg, s, out);
    throw InputError("unknown command '" + c + "'");
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const TrackingFailure& e) {
    diagnose(err, e);
    return kNumericFailure;
  } catch (const NoSeed& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::runtime_error& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Inverts etale polynomial maps by tracking integral curves of y' = Phi'(y)^-1 x."};
  app.footer(
      "Commands: check invert track fiber degree escape stratify gen verify\n"
      "Exit codes: 0 success, 1 verification or verdict failure, 2 input error,\n"
      "            3 numeric failure (last-point diagnostics on stderr)\n"
      "Complex vectors: comma-separated re:im pairs, e.g. --x 0,1:0.5");
  RunConfig cfg;
  std::vector<std::string> sets;
  app.add_option("command", cfg.command, "Command to run")
      ->required()
      ->check(CLI::IsMember({"check", "invert", "track", "fiber", "degree", "escape", "stratify", "gen", "verify"}));
  app.add_option("--map", cfg.map_path, "Map file (canonical JSON)");
  app.add_option("--x", cfg.x, "Direction / target vector");
  app.add_option("--y0", cfg.y0, "Initial point for track/escape (default: origin)");
  app.add_option("--t", cfg.t, "Curve parameter to track to");
  app.add_option("--t0", cfg.t0, "Initial curve parameter when --y0 is given");
  app.add_option("--seed", cfg.seed, "Seed for every randomized step");
  app.add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.output_path, "Output file (default: stdout)");
  app.add_option("--loops", cfg.loops, "Monodromy loop budget");
  app.add_option("--trials", cfg.trials, "Targets for the degree verdict");
  app.add_option("--grid", cfg.grid, "Grid points per axis for stratify");
  app.add_option("--region", cfg.region, "Box re_lo:re_hi:im_lo:im_hi per coordinate");
  app.add_option("--den-max", cfg.den_max, "Denominator bound for exponents");
  app.add_flag("--real", cfg.real_only, "stratify: count only real preimages");
  app.add_option("--recipe", cfg.recipe_path, "Automorphism recipe (gen, verify)");
  app.add_option("--name", cfg.name, "Named example for gen");
  app.add_flag("--random", cfg.random_recipe, "gen: emit a random recipe for --seed");
  app.add_option("--manifest", cfg.manifest_path, "verify: corpus manifest to checksum");
  app.add_option("--set", sets, "Tolerance override key=value (repeatable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInputError;
  }
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "input error: --set expects key=value, got '" << kv << "'\n";
      return kInputError;
    }
    cfg.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace etale::cli
