#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "etale/polyring.hpp"

namespace etale {

/// Step control and acceptance tolerances for curve tracking.
struct TrackOptions {
  double h_init = 1e-2;
  double h_min = 1e-12;
  // Step cap; scaled by max(1, |t|) so long rays do not need millions of steps.
  double h_max = 0.25;
  double newton_tol = 1e-11;
  int newton_max_iter = 8;
  double shrink = 0.5;
  double grow = 1.5;
  double singular_floor = 1e-12;
  double cond_ceiling = 1e12;
  double escape_radius = 1e8;
  long max_steps = 1'000'000;
  // A step-size collapse is attributed to the non-etale locus when
  // |det Phi'| at the last point has dropped below singular_rel times its
  // value at the start of the curve.
  double singular_rel = 1e-4;
  // The corrector accepts residuals down to rounding_factor * eps * (sum of
  // |term|) when that exceeds newton_tol, i.e. when newton_tol is below the
  // precision at which Phi can be evaluated at the current point.
  double rounding_factor = 64.0;
  // ...and only when the next Newton update is below newton_step_rtol * (1 + |y|).
  double newton_step_rtol = 1e-8;
  // Largest |log(det Phi'(y_new) / det Phi'(y))| over one step, phase included.
  double max_det_log_change = 1.0;

  /// Throws InputError when the invariants between fields are violated.
  void validate() const;
};

/// H(y) = Phi(y) - anchor - (t - t0) x evaluated at an accepted point.
struct PathPoint {
  double t = 0.0;
  CVec y;
  double residual = 0.0;
};

enum class CurveStatus { Reached, SingularityApproach, Escaped, StepFloor, StepLimit };

std::string_view to_string(CurveStatus s);

/// Accepted samples of one integral curve of y' = Phi'(y)^{-1} x.
struct Curve {
  CVec x;
  CVec y0;
  double t_target = 0.0;
  std::vector<PathPoint> points;
  CurveStatus status = CurveStatus::Reached;
  // Effective acceptance threshold actually used at each point.
  std::vector<double> tolerances;
  long steps_attempted = 0;

  bool reached() const { return status == CurveStatus::Reached; }
  const PathPoint& last() const { return points.back(); }
};

class InitialDatumInvalid : public InputError {
public:
  using InputError::InputError;
};

class NotOdd : public InputError {
public:
  using InputError::InputError;
};

/// A curve did not reach its target; carries the last accepted point.
class TrackingFailure : public std::runtime_error {
public:
  TrackingFailure(CurveStatus status, PathPoint last, std::string context = {});
  CurveStatus status;
  PathPoint last;
};

/// Tracks the curve with Phi(y(t)) = Phi(y0) + (t - t0) x from t0 to t_target.
Curve track(const PolyMap& map, const CVec& x, const CVec& y0, double t0, double t_target,
            const TrackOptions& opts = {});

/// Same, with the invariant pinned to an explicit anchor:
/// Phi(y(t)) = anchor + (t - t0) x. y0 must already satisfy it at t0.
Curve track_anchored(const PolyMap& map, const CVec& x, const CVec& y0, const CVec& anchor,
                     double t0, double t_target, const TrackOptions& opts = {});

/// Newton refinement of y onto Phi(y) = target. Returns nullopt if it does
/// not converge within opts.newton_max_iter iterations.
std::optional<CVec> refine(const PolyMap& map, const CVec& y, const CVec& target,
                           const TrackOptions& opts = {});

/// gamma_x on [0, t] (or [t, 0]) starting at y = 0.
Curve gamma(const PolyMap& map, const CVec& x, double t, const TrackOptions& opts = {});

/// gamma_x evaluated at each requested t (any sign, any order). Throws
/// TrackingFailure if some t is outside the trackable interval.
std::vector<CVec> gamma_at(const PolyMap& map, const CVec& x, const std::vector<double>& ts,
                           const TrackOptions& opts = {});

/// phi(x) = gamma_x(1), with ||Phi(phi(x)) - x|| <= 10 newton_tol.
CVec invert_point(const PolyMap& map, const CVec& x, const TrackOptions& opts = {});

/// Inverts along 0 -> x e^{i theta} -> x instead of the straight ray.
CVec invert_point_detour(const PolyMap& map, const CVec& x, double theta,
                         const TrackOptions& opts = {});

struct EscapeOptions {
  double t_max = 1048576.0;  // 2^20
  double bisect_rtol = 1e-6;
  int samples = 32;
  // Escape-radius crossings are confirmed as finite-time blow-up only if the
  // curve cannot be continued to (1 + confirm_rtol) t with a radius
  // confirm_radius_factor times larger.
  double confirm_rtol = 1e-3;
  double confirm_radius_factor = 1e4;
  // A stall is attributed to floating-point exhaustion rather than to the end
  // of the curve when |det Phi'| there is above singular_rel times its start
  // value and t |y'| / (1 + |y|) is at most limit_log_slope. A pole of order
  // r inside the bracket pushes that quantity to about r / bisect_rtol.
  double limit_log_slope = 1e3;
};

struct EscapeEstimate {
  CVec x;
  double t_low = 0.0;
  double t_high = 0.0;
  CurveStatus failure = CurveStatus::StepFloor;
  /// (t, ||gamma(t)||) with t increasing toward the bracket.
  std::vector<std::pair<double, double>> samples;
  /// gamma(t) at the same t as samples.
  std::vector<CVec> sample_points;

  double midpoint() const { return 0.5 * (t_low + t_high); }
};

struct Unbounded {
  enum class Basis {
    TMax,             // tracked all the way to t_max
    RadiusConfirmed,  // radius crossing continued with a wider radius
    PrecisionLimit,   // stalled at a regular point of a convergent curve
  };
  double t_max_checked = 0.0;
  Basis basis = Basis::TMax;
};

std::string_view to_string(Unbounded::Basis b);

using EscapeResult = std::variant<EscapeEstimate, Unbounded>;

/// Escape time a(x) of gamma_x (requires Phi(0) = 0).
EscapeResult escape_time(const PolyMap& map, const CVec& x, const TrackOptions& opts = {},
                         const EscapeOptions& eopts = {});

/// Escape time of the curve through y0 at t = 0, for t > 0.
EscapeResult escape_time_from(const PolyMap& map, const CVec& x, const CVec& y0,
                              const TrackOptions& opts = {}, const EscapeOptions& eopts = {});

struct SymmetryReport {
  std::optional<double> odd_deviation;                   // max ||gamma_x(-t) + gamma_x(t)||
  std::vector<std::pair<double, double>> scaling;        // (s, max ||gamma_sx(t) - gamma_x(st)||)
};

SymmetryReport symmetry_check(const PolyMap& map, const CVec& x, const std::vector<double>& t_grid,
                              const std::vector<double>& s_values, const TrackOptions& opts = {},
                              bool check_odd = true);

struct TrackJob {
  CVec x;
  CVec y0;
  double t0 = 0.0;
  double t_target = 1.0;
};

/// Independent track calls; results are in job order regardless of workers.
std::vector<Curve> track_batch(const PolyMap& map, const std::vector<TrackJob>& jobs,
                               const TrackOptions& opts = {}, int workers = 1);

}  // namespace etale
