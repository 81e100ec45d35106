// Acceptance suite: one PASS/FAIL line per criterion, JSON artifacts per run.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "etale/asymptotics.hpp"
#include "etale/fibers.hpp"
#include "etale/map_io.hpp"
#include "etale/mapgen.hpp"
#include "etale/random.hpp"
#include "etale/reports.hpp"
#include "etale/tracker.hpp"

using namespace etale;
using nlohmann::json;

namespace {

const std::string kCorpus = ETALE_CORPUS_DIR;

struct Outcome {
  bool pass = false;
  std::string summary;
  json artifact;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CVec vec1(Complex c) {
  CVec v(1);
  v << c;
  return v;
}

// ---------------------------------------------------------------- 1 and 2

constexpr int kRecipes = 50;
constexpr int kTargets = 20;

Outcome inversion_oracle(double& elapsed) {
  const auto start = std::chrono::steady_clock::now();
  double worst_oracle = 0.0, worst_residual = 0.0;
  int failures = 0;
  json per_recipe = json::array();
  for (int k = 0; k < kRecipes; ++k) {
    const auto recipe = random_recipe(static_cast<std::uint64_t>(k));
    const PolyMap map = realize(recipe);
    const auto inverse = analytic_inverse(recipe);
    Rng rng(7000 + static_cast<std::uint64_t>(k));
    double oracle = 0.0, residual = 0.0;
    int failed = 0;
    for (int j = 0; j < kTargets; ++j) {
      const CVec x = rng.ball(recipe.n, 10.0);
      try {
        const CVec y = invert_point(map, x);
        oracle = std::max(oracle, (y - apply_recipe(inverse, x)).norm());
        residual = std::max(residual, (map.eval(y) - x).norm());
      } catch (const TrackingFailure&) {
        ++failed;
      }
    }
    worst_oracle = std::max(worst_oracle, oracle);
    worst_residual = std::max(worst_residual, residual);
    failures += failed;
    per_recipe.push_back({{"seed", k},
                          {"n", recipe.n},
                          {"steps", recipe.steps.size()},
                          {"degree", map.degree()},
                          {"oracle_error", oracle},
                          {"residual", residual},
                          {"failures", failed}});
  }
  elapsed = seconds_since(start);
  const bool pass = failures == 0 && worst_oracle <= 1e-8 && worst_residual <= 1e-9;
  return {pass,
          std::to_string(kRecipes) + " recipes x " + std::to_string(kTargets) + " targets, max |phi - oracle| " +
              fmt(worst_oracle) + ", max |Phi(phi(x)) - x| " + fmt(worst_residual) + ", " +
              std::to_string(failures) + " tracking failures",
          {{"recipes", per_recipe},
           {"max_oracle_error", worst_oracle},
           {"max_residual", worst_residual},
           {"failures", failures}}};
}

Outcome conservation() {
  double worst = 0.0;
  long steps = 0, over = 0;
  int unreached = 0;
  json per_recipe = json::array();
  for (int k = 0; k < kRecipes; ++k) {
    const auto recipe = random_recipe(static_cast<std::uint64_t>(k));
    const PolyMap map = realize(recipe);
    Rng rng(7000 + static_cast<std::uint64_t>(k));
    double local = 0.0;
    for (int j = 0; j < kTargets; ++j) {
      const Curve c = gamma(map, rng.ball(recipe.n, 10.0), 1.0);
      if (!c.reached()) ++unreached;
      for (const auto& p : c.points) {
        ++steps;
        local = std::max(local, p.residual);
        if (p.residual > 1e-11) ++over;
      }
    }
    worst = std::max(worst, local);
    per_recipe.push_back({{"seed", k}, {"max_residual", local}});
  }
  return {over == 0 && unreached == 0,
          std::to_string(steps) + " accepted points, max residual " + fmt(worst) + ", " + std::to_string(over) +
              " above 1e-11",
          {{"recipes", per_recipe}, {"accepted_points", steps}, {"above_bound", over}, {"unreached", unreached}}};
}

// ---------------------------------------------------------------- 3

struct OddMap {
  std::string name;
  PolyMap map;
};

std::vector<OddMap> odd_maps() {
  std::vector<OddMap> out;
  for (const char* f : {"druzkowski_n2", "druzkowski_n3_chain", "druzkowski_n3_full", "druzkowski_n3_nilpotent"}) {
    out.push_back({f, load_map(kCorpus + "/" + f + ".json")});
  }
  Rng rng(303);
  auto random_matrix = [&](int n, bool strictly_upper, bool real) {
    CMat a = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = strictly_upper ? i + 1 : 0; j < n; ++j)
        a(i, j) = Complex(rng.uniform(-1, 1), real ? 0.0 : rng.uniform(-1, 1));
    return a;
  };
  out.push_back({"upper_random_n2", druzkowski(random_matrix(2, true, false))});
  out.push_back({"upper_random_n3", druzkowski(random_matrix(3, true, false))});
  // Real non-nilpotent forms: the real Jacobian folds, so real rays end at finite t.
  out.push_back({"fold_1d", druzkowski(CMat{{-1}})});
  out.push_back({"jordan_n2", druzkowski(CMat{{-1, 1}, {0, -1}})});
  out.push_back({"dense_real_n2", druzkowski(random_matrix(2, false, true))});
  out.push_back({"dense_real_n3", druzkowski(random_matrix(3, false, true))});
  return out;
}

CVec real_direction(Rng& rng, std::size_t n) {
  CVec x(static_cast<Eigen::Index>(n));
  for (auto& c : x) c = rng.normal();
  return x / x.norm();
}

std::optional<double> escape_mid(const EscapeResult& r) {
  if (const auto* e = std::get_if<EscapeEstimate>(&r)) return e->midpoint();
  return std::nullopt;
}

Outcome odd_symmetry() {
  double worst_odd = 0.0, worst_scaling = 0.0, worst_escape = 0.0;
  int finite = 0, problems = 0;
  json maps = json::array();
  const auto all = odd_maps();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& [name, map] = all[i];
    Rng rng(500 + i);
    json dirs = json::array();
    for (int d = 0; d < 5; ++d) {
      const CVec x = real_direction(rng, map.dim());
      json entry{{"x", vector_to_json(x)}};
      try {
        const auto a = escape_mid(escape_time(map, x));
        // Keep s * t inside the interval of existence for s = 2.
        const double span = a ? std::min(1.0, 0.45 * *a) : 1.0;
        std::vector<double> grid;
        for (int k = 1; k <= 8; ++k) {
          grid.push_back(span * k / 8.0);
          grid.push_back(-span * k / 8.0);
        }
        const SymmetryReport rep = symmetry_check(map, x, grid, {2.0});
        worst_odd = std::max(worst_odd, *rep.odd_deviation);
        worst_scaling = std::max(worst_scaling, rep.scaling[0].second);
        entry["odd_deviation"] = *rep.odd_deviation;
        entry["scaling_deviation"] = rep.scaling[0].second;
        entry["a"] = a ? json(*a) : json(nullptr);
        if (a) {
          ++finite;
          const auto a2 = escape_mid(escape_time(map, 2.0 * x));
          if (!a2) {
            ++problems;
            entry["a_scaled"] = nullptr;
          } else {
            const double rel = std::abs(*a2 * 2.0 - *a) / *a;
            worst_escape = std::max(worst_escape, rel);
            entry["a_scaled"] = *a2;
          }
        }
      } catch (const std::exception& e) {
        ++problems;
        entry["error"] = e.what();
      }
      dirs.push_back(entry);
    }
    maps.push_back({{"map", name}, {"directions", dirs}});
  }
  const bool pass = problems == 0 && worst_odd <= 1e-9 && worst_scaling <= 1e-9 && worst_escape <= 1e-4;
  return {pass,
          "10 odd maps x 5 directions, odd dev " + fmt(worst_odd) + ", scaling dev " + fmt(worst_scaling) + ", " +
              std::to_string(finite) + " finite escape times with max |2a(2x) - a(x)|/a(x) " + fmt(worst_escape) +
              (problems ? ", " + std::to_string(problems) + " problems" : ""),
          {{"maps", maps},
           {"max_odd_deviation", worst_odd},
           {"max_scaling_deviation", worst_scaling},
           {"max_escape_scaling", worst_escape},
           {"finite_escapes", finite},
           {"problems", problems}}};
}

// ---------------------------------------------------------------- 4

bool fiber_matches(const std::vector<CVec>& got, const std::vector<CVec>& want, double tol) {
  if (got.size() != want.size()) return false;
  for (const auto& w : want) {
    bool found = false;
    for (const auto& g : got) found = found || (g - w).norm() <= tol;
    if (!found) return false;
  }
  return true;
}

Outcome monodromy_degree() {
  bool pass = true;
  double slowest = 0.0;
  json runs = json::array();
  std::vector<std::string> notes;

  auto run_fiber = [&](const std::string& label, const PolyMap& map, const CVec& target, int expect,
                       const std::vector<CVec>& points) {
    const auto start = std::chrono::steady_clock::now();
    const MonodromyResult r = fiber_monodromy(map, target, {}, {}, 200, 42);
    const double t = seconds_since(start);
    slowest = std::max(slowest, t);
    const bool ok = r.stabilized && r.degree_estimate == expect && fiber_matches(r.fiber.points, points, 1e-8) && t <= 10.0;
    if (!ok) notes.push_back(label);
    pass = pass && ok;
    json rep = fiber_report(r);
    rep["label"] = label;
    runs.push_back(rep);
  };

  const PolyMap sq = named_example("square_1d"), cu = named_example("cube_1d");
  run_fiber("square_1d", sq, vec1(1.0), 2, {vec1(1.0), vec1(-1.0)});
  std::vector<CVec> roots;
  for (int k = 0; k < 3; ++k) roots.push_back(vec1(std::polar(1.0, 2 * std::numbers::pi * k / 3)));
  run_fiber("cube_1d", cu, vec1(1.0), 3, roots);
  {
    CVec target(2);
    target << 1.0, 1.0;
    std::vector<CVec> pts;
    for (double s : {1.0, -1.0})
      for (const auto& r : roots) {
        CVec p(2);
        p << s, r[0];
        pts.push_back(p);
      }
    run_fiber("square_x_cube", direct_product(sq, cu), target, 6, pts);
  }

  std::vector<std::pair<std::string, PolyMap>> autos;
  for (const char* f : {"identity_2", "identity_3", "druzkowski_n2", "druzkowski_n3_chain", "druzkowski_n3_full",
                        "druzkowski_n3_nilpotent"}) {
    autos.emplace_back(f, load_map(kCorpus + "/" + f + ".json"));
  }
  for (const char* f : {"recipe_shears", "recipe_mixed"}) autos.emplace_back(f, realize(load_recipe(kCorpus + "/" + f + ".json")));
  for (const auto& [label, map] : autos) {
    const auto start = std::chrono::steady_clock::now();
    const BirationalityVerdict v = birationality_verdict(map, 3, 42);
    const double t = seconds_since(start);
    slowest = std::max(slowest, t);
    const bool ok = v.kind == BirationalityVerdict::Kind::Degree && v.degree == 1 && t <= 10.0;
    if (!ok) notes.push_back(label);
    pass = pass && ok;
    runs.push_back({{"label", label},
                    {"verdict", v.kind == BirationalityVerdict::Kind::Degree ? "Degree" : "Inconclusive"},
                    {"degree", v.degree},
                    {"evidence", v.evidence}});
  }
  std::string summary = "square 2, cube 3, product 6, " + std::to_string(autos.size()) +
                        " automorphism fixtures at degree 1, slowest run " + fmt(slowest) + " s";
  if (!notes.empty()) {
    summary += "; failed:";
    for (const auto& n : notes) summary += " " + n;
  }
  return {pass, summary, {{"runs", runs}}};
}

// ---------------------------------------------------------------- 5

Outcome singularity_localization() {
  const PolyMap sq = named_example("square_1d");
  const EscapeResult r = escape_time_from(sq, vec1(-1.0), vec1(1.0));
  json art{{"escape", escape_report(r)}};
  const auto* est = std::get_if<EscapeEstimate>(&r);
  if (!est) return {false, "square root curve reported as unbounded", art};
  const double width = est->t_high - est->t_low;
  const bool bracket_ok = est->t_low <= 1.0 && 1.0 <= est->t_high && width <= 1e-6;
  AsymptoticOptions ao;
  ao.den_max = 12;
  const PuiseuxExpansion e = asymptotics_from_estimate(*est, ao);
  art["asymptotics"] = expansion_report(e);
  // Convergent case: |gamma| -> 0 like (a - t)^(1/2), reported as r = -1/2.
  const bool exp_ok = !e.terms.empty() && e.terms[0].r == Rational{-1, 2};
  return {bracket_ok && exp_ok,
          "bracket [" + fmt(est->t_low) + ", " + fmt(est->t_high) + "] width " + fmt(width) + ", leading exponent " +
              (e.terms.empty() ? std::string("none")
                               : std::to_string(e.terms[0].r.num) + "/" + std::to_string(e.terms[0].r.den)) +
              " (|gamma| ~ (a - t)^(1/2))",
          art};
}

// ---------------------------------------------------------------- 6

Outcome puiseux_recovery() {
  bool pass = true;
  double worst_coeff = 0.0;
  int exact = 0;
  json cases = json::array();
  for (Rational r : {Rational{1, 2}, Rational{1, 3}, Rational{2, 3}, Rational{3, 7}, Rational{5, 2}}) {
    for (double c : {0.1, 1.0, 10.0}) {
      SampledCurve curve{1.0, {}};
      for (int k = 0; k < 64; ++k) {
        const double u = std::pow(10.0, -1.0 - 7.0 * k / 63.0);
        curve.samples.emplace_back(1.0 + u, c * std::pow(u, -r.value()));
      }
      const LeadingFit fit = fit_leading_exponent(curve);
      const Rational got = rational_reconstruct(fit.r_real, 12);
      const double rel = std::abs(fit.coeff - c) / c;
      worst_coeff = std::max(worst_coeff, rel);
      const bool ok = got == r && rel <= 1e-3;
      exact += got == r;
      pass = pass && ok;
      cases.push_back({{"r", {r.num, r.den}}, {"c", c}, {"recovered", {got.num, got.den}}, {"coeff", fit.coeff}});
    }
  }
  return {pass, std::to_string(exact) + "/15 exponents exact, max coefficient rel. error " + fmt(worst_coeff),
          {{"cases", cases}}};
}

// ---------------------------------------------------------------- 7

Outcome keller_soundness() {
  bool pass = true;
  json art;
  const PolyMap square_first = load_map(kCorpus + "/square_first_n2.json");
  const KellerVerdict nc = keller_check(square_first, 64, 77);
  art["square_first_n2"] = to_json(nc);
  pass = pass && nc.kind == KellerVerdict::Kind::NonConstantDet && nc.witnesses.size() == 2;
  double worst_bound = 0.0;
  int constant = 0;
  const char* files[] = {"druzkowski_n2", "druzkowski_n3_chain", "druzkowski_n3_full", "druzkowski_n3_nilpotent"};
  for (const char* f : files) {
    const KellerVerdict v = keller_check(load_map(kCorpus + "/" + f + ".json"), KellerOptions{}.samples, 77);
    art[f] = to_json(v);
    const bool ok = v.kind == KellerVerdict::Kind::ConstantDet && std::abs(v.value - 1.0) <= 1e-12 &&
                    v.failure_bound <= 1e-9;
    constant += ok;
    worst_bound = std::max(worst_bound, v.failure_bound);
    pass = pass && ok;
  }
  return {pass,
          std::string("(y1^2, y2) -> ") + std::string(to_string(nc.kind)) + " with " +
              std::to_string(nc.witnesses.size()) + " witnesses; " + std::to_string(constant) +
              "/4 Druzkowski fixtures ConstantDet(1); max failure bound " + fmt(worst_bound),
          art};
}

// ---------------------------------------------------------------- driver

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path artifacts = "acceptance_artifacts";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--artifacts") artifacts = argv[i + 1];
  }
  std::filesystem::create_directories(artifacts);

  double inversion_seconds = 0.0;
  const std::vector<Criterion> criteria{
      {1, "inversion oracle", [&] {
         Outcome o = inversion_oracle(inversion_seconds);
         o.summary += ", " + fmt(inversion_seconds) + " s";
         o.pass = o.pass && inversion_seconds <= 120.0;
         return o;
       }},
      {2, "conservation", conservation},
      {3, "odd symmetry and scaling", odd_symmetry},
      {4, "monodromy degree", monodromy_degree},
      {5, "singularity localization", singularity_localization},
      {6, "Puiseux recovery", puiseux_recovery},
      {7, "Keller check soundness", keller_soundness},
  };

  int failed = 0;
  std::vector<std::string> first_run;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {{"exception", e.what()}}};
    }
    const std::string text = o.artifact.dump(2) + "\n";
    first_run.push_back(text);
    std::ofstream(artifacts / ("criterion_" + std::to_string(c.id) + ".json")) << text;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << ": " << o.summary
              << std::endl;
    failed += !o.pass;
  }

  // Determinism: same seeds, byte-identical artifacts.
  int mismatched = 0;
  std::string which;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o = {false, "", {{"exception", e.what()}}};
    }
    const std::string text = o.artifact.dump(2) + "\n";
    std::ofstream(artifacts / ("criterion_" + std::to_string(criteria[k].id) + ".rerun.json")) << text;
    if (text != first_run[k]) {
      ++mismatched;
      which += " " + std::to_string(criteria[k].id);
    }
  }
  const bool det_ok = mismatched == 0;
  std::cout << "criterion 8 " << (det_ok ? "PASS" : "FAIL") << "  determinism: " << criteria.size()
            << " artifacts re-generated, " << mismatched << " differ" << which << std::endl;
  failed += !det_ok;

  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
