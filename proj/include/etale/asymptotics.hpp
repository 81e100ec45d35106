#pragma once

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "etale/polyring.hpp"
#include "etale/tracker.hpp"

namespace etale {

struct Rational {
  long num = 0;
  long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const {
    // den > 0 always
    return num * o.den <=> o.num * den;
  }
};

/// Scalar samples (t, value) of a curve near the endpoint a. All t lie on
/// the same side of a; fits are done in u = |t - a|.
struct SampledCurve {
  double a = 0.0;
  std::vector<std::pair<double, double>> samples;

  /// At least 8 samples, distinct t, finite values, none at t = a.
  void validate() const;
};

class DegenerateWindow : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonPositiveValues : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnboundedCurve : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct AsymptoticOptions {
  int den_max = 12;
  double window_frac = 0.5;
  double term_floor = 1e-9;
};

struct LeadingFit {
  double r_real = 0.0;  // value ~ coeff * u^(-r_real)
  double coeff = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (log u, log value) on the innermost
/// window_frac of the samples.
LeadingFit fit_leading_exponent(const SampledCurve& curve, double window_frac = 0.5);

/// Best approximation with denominator <= den_max (continued fractions);
/// ties go to the smaller denominator.
Rational rational_reconstruct(double r, int den_max);

struct PuiseuxTerm {
  Rational r;
  double coeff = 0.0;
};

enum class ExponentConvention {
  Power,   // value ~ base + sum coeff * u^r
  BlowUp,  // value ~ base + sum coeff * u^(-r)
};

struct PuiseuxExpansion {
  double a = 0.0;
  ExponentConvention convention = ExponentConvention::Power;
  std::optional<double> base_value;
  std::vector<PuiseuxTerm> terms;  // strictly increasing r
  double residual_bound = 0.0;

  double eval(double t) const;
};

class ExponentOrderViolation : public std::runtime_error {
public:
  ExponentOrderViolation(PuiseuxExpansion partial, std::string diagnostic)
      : std::runtime_error(diagnostic), partial(std::move(partial)) {}
  PuiseuxExpansion partial;
};

/// Fits up to k non-constant terms by repeatedly fitting the leading
/// exponent of what the previous terms leave unexplained. Stops early when
/// the residual drops below term_floor (relative to the sample scale).
PuiseuxExpansion peel_expansion(const SampledCurve& curve, int k, const AsymptoticOptions& opts = {});

/// Leading behaviour of ||gamma|| at the end of an escape bracket, in the
/// BlowUp convention: r > 0 diverges, r < 0 converges to base_value.
PuiseuxExpansion asymptotics_from_estimate(const EscapeEstimate& est, const AsymptoticOptions& opts = {});

struct ChannelFit {
  std::optional<PuiseuxExpansion> expansion;
  std::string error;  // set when the channel could not be fitted
};

/// The same fit applied to each |gamma_k| separately.
std::vector<ChannelFit> channel_asymptotics(const EscapeEstimate& est, const AsymptoticOptions& opts = {});

PuiseuxExpansion escape_asymptotics(const PolyMap& map, const CVec& x, const TrackOptions& opts = {},
                                    const EscapeOptions& eopts = {}, const AsymptoticOptions& aopts = {},
                                    const std::optional<CVec>& y0 = std::nullopt);

}  // namespace etale
