#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "etale/polyring.hpp"

namespace etale {

/// Seeded generator with platform-stable draws. The standard distributions
/// are implementation-defined, so doubles are built from raw engine bits.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  double normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u = 1.0 - uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  /// Uniform in the box |Re|, |Im| <= half_width, per coordinate.
  CVec box(std::size_t n, double half_width) {
    CVec v(static_cast<Eigen::Index>(n));
    for (auto& c : v) {
      const double re = uniform(-half_width, half_width);
      const double im = uniform(-half_width, half_width);
      c = Complex(re, im);
    }
    return v;
  }

  /// Uniform in the complex ball of the given radius centered at 0.
  // Uniform on the sphere |v| = radius in C^n.
  CVec sphere(std::size_t n, double radius) {
    CVec v(static_cast<Eigen::Index>(n));
    for (auto& c : v) {
      const double re = normal();
      const double im = normal();
      c = Complex(re, im);
    }
    const double norm = v.norm();
    return norm > 0.0 ? CVec(v * (radius / norm)) : sphere(n, radius);
  }

  CVec ball(std::size_t n, double radius) {
    CVec v(static_cast<Eigen::Index>(n));
    for (auto& c : v) {
      const double re = normal();
      const double im = normal();
      c = Complex(re, im);
    }
    const double norm = v.norm();
    const double r = radius * std::pow(uniform(), 1.0 / (2.0 * static_cast<double>(n)));
    return norm > 0.0 ? CVec(v * (r / norm)) : v;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace etale
