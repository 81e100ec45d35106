#include "doctest.h"
#include "etale/mapgen.hpp"
#include "etale/polyring.hpp"
#include "etale/random.hpp"
#include "support.hpp"

using namespace etale;
using etale::test::vec;

TEST_CASE("evaluation examples") {
  const CVec y = vec({{3, 1}, -2});
  CHECK(PolyMap::identity(2).eval(y) == y);

  const CVec v = eval_map(test::triangular(3), vec({0, 2}));
  CHECK(v == vec({8, 2}));

  const PolyMap odd = druzkowski(CMat{{0, 1}, {0, 0}});
  CHECK(odd.eval(vec({0, 0})).norm() == 0.0);
}

TEST_CASE("jacobian examples") {
  const auto id = jacobian_at(PolyMap::identity(3), vec({1, {0, 2}, -5}));
  CHECK(id.matrix == CMat::Identity(3, 3));
  CHECK(id.determinant == Complex(1));

  const auto tri = jacobian_at(test::triangular(3), vec({0, 2}));
  CHECK(tri.matrix == CMat{{1, 12}, {0, 1}});
  CHECK(tri.determinant == Complex(1));

  const auto sq = jacobian_at(named_example("square_1d"), vec({0}));
  CHECK(sq.determinant == Complex(0));
  CHECK(std::isinf(sq.condition_estimate));
}

TEST_CASE("solve_field examples and errors") {
  CHECK(solve_field(PolyMap::identity(2), vec({5, 7}), vec({1, 0})) == vec({1, 0}));
  CHECK(std::abs(solve_field(named_example("square_1d"), vec({1}), vec({1}))[0] - 0.5) < 1e-15);
  CHECK((solve_field(test::triangular(3), vec({0, 2}), vec({1, 0})) - vec({1, 0})).norm() < 1e-15);
  CHECK_THROWS_AS(solve_field(named_example("square_1d"), vec({0}), vec({1})), NearSingularJacobian);
  CHECK_THROWS_AS(solve_field(PolyMap::identity(2), vec({0}), vec({1, 0})), DimensionError);
}

TEST_CASE("keller examples") {
  const auto id = keller_check(PolyMap::identity(2), 16, 1);
  CHECK(id.kind == KellerVerdict::Kind::ConstantDet);
  CHECK(id.value == Complex(1));

  const auto sq = keller_check(test::square_first(), 16, 1);
  REQUIRE(sq.kind == KellerVerdict::Kind::NonConstantDet);
  REQUIRE(sq.witnesses.size() == 2);
  CHECK(sq.witness_dets[0] != sq.witness_dets[1]);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(sq.witness_dets[k] - 2.0 * sq.witnesses[k][0]) < 1e-12);

  const auto dr = keller_check(test::triangular(3), 64, 7);
  CHECK(dr.kind == KellerVerdict::Kind::ConstantDet);
  CHECK(std::abs(dr.value - 1.0) < 1e-12);
  CHECK(dr.failure_bound <= 1e-9);

  CHECK_THROWS_AS(keller_check(PolyMap::identity(2), 1, 0), InputError);
}

TEST_CASE("keller reports a singular sample") {
  // det = y1 vanishes on a hyperplane; the box is tiny so a sample lands near it only if forced.
  KellerOptions o;
  o.singular_floor = 10.0;  // every sample counts as singular
  const auto v = keller_check(test::square_first(), 8, 3, o);
  CHECK(v.kind == KellerVerdict::Kind::SingularSomewhere);
  CHECK(v.witnesses.size() == 1);
}

TEST_CASE("oddness") {
  CHECK(is_odd(PolyMap::identity(3)));
  CHECK(is_odd(test::triangular(3)));
  CHECK_FALSE(is_odd(test::triangular(2)));
  CHECK_FALSE(is_odd(PolyMap({Polynomial::constant(1, 1.0) + test::var(1, 0)})));
}

TEST_CASE("odd maps are exactly odd and have exactly even Jacobians") {
  Rng rng(11);
  const PolyMap m = druzkowski(CMat{{0, 1, Complex(0.5, -1)}, {0, 0, 2}, {0, 0, 0}});
  for (int k = 0; k < 200; ++k) {
    const CVec y = rng.box(3, 2.0);
    CHECK(m.eval(-y) == -m.eval(y));
    CHECK(m.jacobian_matrix(-y) == m.jacobian_matrix(y));
  }
}

TEST_CASE("jacobian agrees with central differences") {
  Rng rng(5);
  const PolyMap m = named_example("pinchuk");
  for (int k = 0; k < 10; ++k) {
    const CVec y = rng.box(2, 0.5);
    const CMat jac = m.jacobian_matrix(y);
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double h = 1e-4;
      CVec e = CVec::Zero(2);
      e[j] = h;
      const CVec fd = (m.eval(y + e) - m.eval(y - e)) / (2 * h);
      CHECK((fd - jac.col(j)).norm() <= 1e-5 * (1 + jac.col(j).norm()));
    }
  }
}

TEST_CASE("polynomial arithmetic") {
  const auto x = test::var(2, 0), y = test::var(2, 1);
  const Polynomial p = (x + y).pow(3);
  CHECK(p.terms().size() == 4);
  CHECK(p.coefficient(Monomial({2, 1})) == Complex(3));
  CHECK(p.degree() == 3);
  CHECK(p.degree_in(1) == 3);
  CHECK((p - p).is_zero());
  CHECK(p.derivative(0) == (x + y).pow(2) * Complex(3));
  const Polynomial c = p.compose({y, x});
  CHECK(c == p);
  CHECK(p.compose_degree_bound({x * y, y}) == 6);
  CHECK(p.eval(vec({1, 2})) == Complex(27));
}

TEST_CASE("pinchuk fixture") {
  const PolyMap m = named_example("pinchuk");
  CHECK(m.dim() == 2);
  CHECK(m.component(0).degree() == 10);
  CHECK(m.component(1).degree() == 25);
  // Non-constant determinant which is positive on the reals.
  const auto v = keller_check(m, 16, 2);
  CHECK(v.kind == KellerVerdict::Kind::NonConstantDet);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    CVec y(2);
    y << rng.uniform(-2, 2), rng.uniform(-2, 2);
    const auto s = jacobian_at(m, y);
    CHECK(s.determinant.real() > 0);
    CHECK(std::abs(s.determinant.imag()) < 1e-9 * std::abs(s.determinant));
  }
}
