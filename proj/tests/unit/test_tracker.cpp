#include <cmath>

#include "doctest.h"
#include "etale/map_io.hpp"
#include "etale/mapgen.hpp"
#include "etale/random.hpp"
#include "etale/tracker.hpp"
#include "support.hpp"

using namespace etale;
using etale::test::vec;

TEST_CASE("identity curve is the ray") {
  const Curve c = track(PolyMap::identity(2), vec({1, 0}), vec({0, 0}), 0.0, 1.0);
  REQUIRE(c.reached());
  CHECK((c.last().y - vec({1, 0})).norm() < 1e-14);
  for (const auto& p : c.points) CHECK(p.residual < 1e-14);
}

TEST_CASE("triangular map tracked to t = 2") {
  const Curve c = track(test::triangular(3), vec({0, 1}), vec({0, 0}), 0.0, 2.0);
  REQUIRE(c.reached());
  CHECK((c.last().y - vec({-8, 2})).norm() < 1e-10);
  CHECK(c.last().t == 2.0);
}

TEST_CASE("square root curve runs into the branch point") {
  const PolyMap sq = named_example("square_1d");
  const Curve c = track(sq, vec({-1}), vec({1}), 0.0, 2.0);
  CHECK(c.status == CurveStatus::SingularityApproach);
  CHECK(std::abs(c.last().t - 1.0) < 1e-3);
  for (const auto& p : c.points) CHECK(std::abs(p.y[0] - std::sqrt(1.0 - p.t)) < 1e-6);
}

TEST_CASE("escaping curve") {
  // gamma(t) = (-t^3, t) leaves the radius-10 ball near t = 2.15.
  const PolyMap m = test::triangular(3);
  TrackOptions o;
  o.escape_radius = 10.0;
  const Curve c = track(m, vec({0, 1}), vec({0, 0}), 0.0, 5.0, o);
  CHECK(c.status == CurveStatus::Escaped);
  for (const auto& p : c.points) CHECK(p.y.norm() <= 10.0);
}

TEST_CASE("gamma examples") {
  const PolyMap odd = named_example("triangular_odd_n2");
  const Curve at0 = gamma(odd, vec({0, 1}), 0.0);
  REQUIRE(at0.points.size() == 1);
  CHECK(at0.last().y.norm() == 0.0);

  CHECK((gamma(odd, vec({0, 1}), 1.0).last().y - vec({-1, 1})).norm() < 1e-10);
  const CVec x = vec({{1, 2}, -3});
  CHECK((gamma(PolyMap::identity(2), x, -1.0).last().y + x).norm() < 1e-13);

  CHECK_THROWS_AS(gamma(PolyMap({Polynomial::constant(1, 1.0) + test::var(1, 0)}), vec({1}), 1.0),
                  InitialDatumInvalid);
}

TEST_CASE("invert_point examples") {
  const CVec x = vec({{0.3, 1}, 2});
  CHECK((invert_point(PolyMap::identity(2), x) - x).norm() < 1e-13);
  CHECK((invert_point(named_example("triangular_odd_n2"), vec({0, 1})) - vec({-1, 1})).norm() < 1e-10);

  AutomorphismRecipe five;
  std::uint64_t seed = 0;
  do five = random_recipe(seed++);
  while (five.steps.size() < 5);
  const PolyMap m = realize(five);
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const CVec t = rng.ball(five.n, 3.0);
    CHECK((invert_point(m, t) - apply_recipe(analytic_inverse(five), t)).norm() < 1e-8);
  }
}

TEST_CASE("detour inversion agrees with the straight ray") {
  const PolyMap m = realize(random_recipe(3));
  const CVec x = Rng(8).ball(m.dim(), 2.0);
  CHECK((invert_point_detour(m, x, 0.1) - invert_point(m, x)).norm() < 1e-8);
}

TEST_CASE("escape time examples") {
  const auto id = escape_time(PolyMap::identity(2), vec({1, {0, 1}}));
  CHECK(std::holds_alternative<Unbounded>(id));

  const auto sq = escape_time_from(named_example("square_1d"), vec({-1}), vec({1}));
  REQUIRE(std::holds_alternative<EscapeEstimate>(sq));
  const auto& e = std::get<EscapeEstimate>(sq);
  CHECK(e.t_low <= 1.0);
  CHECK(e.t_high >= 1.0);
  CHECK(e.t_high - e.t_low <= 1e-6);

  const auto r = random_recipe(12);
  const auto au = escape_time(realize(r), Rng(1).ball(r.n, 1.0));
  CHECK(std::holds_alternative<Unbounded>(au));
}

TEST_CASE("blow-up on the singular locus is bracketed where conditioning gives out") {
  // Phi(y1, y2) = (y1 (1 + y2), y2) from (1, 0) along (1, -1): y2 = -t, y1 = (1 + t) / (1 - t).
  // det = 1 - t also vanishes at t = 1, so cond(Phi') ~ (1 - t)^-3 crosses cond_ceiling first.
  const auto y1 = test::var(2, 0), y2 = test::var(2, 1);
  const PolyMap m({y1 * (Polynomial::constant(2, 1.0) + y2), y2});
  const auto r = escape_time_from(m, vec({1, -1}), vec({1, 0}));
  REQUIRE(std::holds_alternative<EscapeEstimate>(r));
  const auto& e = std::get<EscapeEstimate>(r);
  CHECK(e.failure == CurveStatus::SingularityApproach);
  CHECK(e.t_high <= 1.0);
  CHECK(e.t_low >= 1.0 - 1e-3);
  CHECK(e.t_high - e.t_low <= 1e-6 * e.t_high);
}

TEST_CASE("symmetry check examples") {
  const auto id = symmetry_check(PolyMap::identity(2), vec({1, 2}), {0.25, 0.5, 1.0}, {2.0});
  REQUIRE(id.odd_deviation);
  CHECK(*id.odd_deviation < 1e-14);
  CHECK(id.scaling.at(0).second < 1e-14);

  const auto tri = symmetry_check(named_example("triangular_odd_n2"), vec({0, 1}), {0.25, 0.5, 1.0}, {2.0});
  CHECK(*tri.odd_deviation <= 1e-9);
  CHECK(tri.scaling.at(0).second <= 1e-9);

  CHECK_THROWS_AS(symmetry_check(test::triangular(2), vec({0, 1}), {0.5}, {2.0}), NotOdd);
  CHECK_THROWS_AS(symmetry_check(named_example("triangular_odd_n2"), vec({0, 1}), {0.5}, {0.0}), InputError);
}

TEST_CASE("residual invariant on accepted steps") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = random_recipe(seed);
    const PolyMap m = realize(r);
    const Curve c = gamma(m, Rng(seed).ball(r.n, 5.0), 1.0);
    REQUIRE(c.reached());
    for (std::size_t k = 0; k < c.points.size(); ++k) CHECK(c.points[k].residual <= c.tolerances[k]);
  }
}

TEST_CASE("retracking returns to the start") {
  const auto r = random_recipe(21);
  const PolyMap m = realize(r);
  const CVec x = Rng(2).ball(r.n, 2.0);
  const Curve fwd = gamma(m, x, 1.0);
  REQUIRE(fwd.reached());
  const Curve back = track_anchored(m, x, fwd.last().y, x, 1.0, 0.0);
  REQUIRE(back.reached());
  CHECK(back.last().y.norm() <= 1e-9);
}

TEST_CASE("batch tracking is independent of worker count") {
  const PolyMap m = realize(random_recipe(5));
  std::vector<TrackJob> jobs;
  Rng rng(3);
  for (int k = 0; k < 6; ++k) jobs.push_back({rng.ball(m.dim(), 1.0), CVec::Zero(m.dim()), 0.0, 1.0});
  const auto a = track_batch(m, jobs, {}, 1);
  const auto b = track_batch(m, jobs, {}, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].last().y == b[k].last().y);
}

TEST_CASE("option validation") {
  TrackOptions o;
  o.shrink = 1.5;
  CHECK_THROWS_AS(o.validate(), InputError);
  CHECK_THROWS_AS(track(PolyMap::identity(2), vec({1}), vec({0, 0}), 0, 1), DimensionError);
}

TEST_CASE("real fold stops the curve instead of being stepped over") {
  // Real map with a real fold: the forward and reflected curves must agree.
  const PolyMap m = druzkowski(CMat{{-1, 1}, {0, -1}});
  const CVec x = vec({-0.996643, 0.0818689});
  const Curve fwd = gamma(m, x, 1.0), back = gamma(m, -x, 1.0);
  CHECK(fwd.status == CurveStatus::SingularityApproach);
  CHECK(back.status == CurveStatus::SingularityApproach);
  CHECK(std::abs(fwd.last().t - back.last().t) < 1e-6);
  for (const auto& p : fwd.points) CHECK(jacobian_at(m, p.y).determinant.real() > 0.0);
}

TEST_CASE("stall at a regular point is reported as a precision limit") {
  // (y1 - y2)^3 cancels catastrophically once |y| is large; det Phi' = 1 throughout.
  const PolyMap m = load_map(std::string(ETALE_CORPUS_DIR) + "/druzkowski_n3_nilpotent.json");
  const auto r = escape_time(m, vec({0.6, -0.8, 0.0}));
  REQUIRE(std::holds_alternative<Unbounded>(r));
  CHECK(std::get<Unbounded>(r).basis == Unbounded::Basis::PrecisionLimit);
}
