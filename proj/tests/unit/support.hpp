#pragma once

#include <initializer_list>

#include "etale/polyring.hpp"

namespace etale::test {

inline CVec vec(std::initializer_list<Complex> xs) {
  CVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

inline Polynomial var(std::size_t n, std::size_t j) { return Polynomial::variable(n, j); }

// (y1 + y2^k, y2)
inline PolyMap triangular(int k) {
  return PolyMap({var(2, 0) + var(2, 1).pow(k), var(2, 1)});
}

inline PolyMap square_first() { return PolyMap({var(2, 0).pow(2), var(2, 1)}); }

}  // namespace etale::test
