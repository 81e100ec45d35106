#include "etale/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "etale/parallel.hpp"

namespace etale {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Correction {
  bool converged = false;
  bool singular = false;
  CVec y;
  double residual = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
};

// Newton on Phi(y) = target.
Correction correct(const PolyMap& map, CVec y, const CVec& target, const TrackOptions& opts) {
  Correction c;
  double prev_step = std::numeric_limits<double>::infinity();
  const double target_mag = target.lpNorm<Eigen::Infinity>();
  for (int it = 0;; ++it) {
    const MapValue mv = map.eval_with_magnitude(y);
    const CVec h = mv.value - target;
    c.residual = h.norm();
    c.tolerance = std::max(opts.newton_tol, opts.rounding_factor * kEps * (mv.magnitude + target_mag));
    if (!std::isfinite(c.residual)) return c;
    auto dy = try_solve_field(map, y, h, opts.singular_floor, opts.cond_ceiling);
    if (!dy) {
      c.singular = true;
      return c;
    }
    const double step = dy->norm();
    // A small residual alone is not enough near a branch point, where it
    // admits points on the wrong sheet; the next update must be small too.
    if (c.residual <= c.tolerance && step <= opts.newton_step_rtol * (1.0 + y.norm())) {
      c.converged = true;
      c.y = std::move(y);
      c.iterations = it;
      return c;
    }
    if (it == opts.newton_max_iter) return c;
    if (it > 0 && step > 2.0 * prev_step) return c;
    prev_step = step;
    y -= *dy;
  }
}

bool jacobian_singular(const JacobianSample& js, const TrackOptions& opts) {
  return !(std::abs(js.determinant) > opts.singular_floor) || !(js.condition_estimate <= opts.cond_ceiling);
}

void check_dims(const PolyMap& map, const CVec& a, const char* what) {
  if (static_cast<std::size_t>(a.size()) != map.dim()) {
    throw DimensionError(std::string(what) + " has dimension " + std::to_string(a.size()) +
                         ", map has " + std::to_string(map.dim()));
  }
}

}  // namespace

void TrackOptions::validate() const {
  if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max)) {
    throw InputError("step sizes must satisfy 0 < h_min <= h_init <= h_max");
  }
  if (!(newton_tol > 0.0)) throw InputError("newton_tol must be positive");
  if (!(max_det_log_change > 0.0)) throw InputError("max_det_log_change must be positive");
  if (!(newton_step_rtol > 0.0)) throw InputError("newton_step_rtol must be positive");
  if (!(escape_radius > 0.0)) throw InputError("escape_radius must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("shrink must lie in (0, 1)");
  if (!(grow > 1.0)) throw InputError("grow must exceed 1");
  if (newton_max_iter < 1) throw InputError("newton_max_iter must be at least 1");
  if (max_steps < 1) throw InputError("max_steps must be at least 1");
}

std::string_view to_string(CurveStatus s) {
  switch (s) {
    case CurveStatus::Reached: return "Reached";
    case CurveStatus::SingularityApproach: return "SingularityApproach";
    case CurveStatus::Escaped: return "Escaped";
    case CurveStatus::StepFloor: return "StepFloor";
    case CurveStatus::StepLimit: return "StepLimit";
  }
  return "?";
}

TrackingFailure::TrackingFailure(CurveStatus status, PathPoint last, std::string context)
    : std::runtime_error("tracking stopped with " + std::string(to_string(status)) + " at t=" +
                         std::to_string(last.t) + (context.empty() ? "" : " (" + context + ")")),
      status(status),
      last(std::move(last)) {}

Curve track(const PolyMap& map, const CVec& x, const CVec& y0, double t0, double t_target,
            const TrackOptions& opts) {
  check_dims(map, y0, "initial point");
  return track_anchored(map, x, y0, map.eval(y0), t0, t_target, opts);
}

Curve track_anchored(const PolyMap& map, const CVec& x, const CVec& y0, const CVec& anchor,
                     double t0, double t_target, const TrackOptions& opts) {
  opts.validate();
  check_dims(map, x, "direction");
  check_dims(map, y0, "initial point");
  check_dims(map, anchor, "anchor");
  if (!std::isfinite(t0) || !std::isfinite(t_target)) throw InputError("curve parameters must be finite");

  Curve curve;
  curve.x = x;
  curve.y0 = y0;
  curve.t_target = t_target;

  auto target_at = [&](double t) -> CVec { return anchor + (t - t0) * x; };
  {
    const MapValue mv = map.eval_with_magnitude(y0);
    curve.points.push_back({t0, y0, (mv.value - anchor).norm()});
    curve.tolerances.push_back(
        std::max(opts.newton_tol, opts.rounding_factor * kEps * (mv.magnitude + anchor.lpNorm<Eigen::Infinity>())));
  }

  const JacobianSample start = jacobian_at(map, y0);
  if (jacobian_singular(start, opts)) {
    curve.status = CurveStatus::SingularityApproach;
    return curve;
  }
  const double det_start = std::abs(start.determinant);
  Complex det_here = start.determinant, det_new;
  const double dir = t_target >= t0 ? 1.0 : -1.0;

  double t = t0;
  CVec y = y0;
  double h = opts.h_init;
  int fast = 0;

  auto field = [&](const CVec& at) { return try_solve_field(map, at, x, opts.singular_floor, opts.cond_ceiling); };

  while (t != t_target) {
    const double remaining = std::abs(t_target - t);
    h = std::min(h, opts.h_max * std::max(1.0, std::abs(t)));
    const double step = std::min(h, remaining);
    const double t_new = step == remaining ? t_target : t + dir * step;
    const double dt = t_new - t;

    if (++curve.steps_attempted > opts.max_steps) {
      curve.status = CurveStatus::StepLimit;
      return curve;
    }

    // Classical RK4 predictor on y' = Phi'(y)^{-1} x.
    bool singular_hit = false;
    std::optional<CVec> predicted;
    if (auto k1 = field(y)) {
      if (auto k2 = field(y + 0.5 * dt * *k1)) {
        if (auto k3 = field(y + 0.5 * dt * *k2)) {
          if (auto k4 = field(y + dt * *k3)) {
            predicted = CVec(y + (dt / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4));
          }
        }
      }
    }
    if (!predicted) singular_hit = true;

    Correction corr;
    if (predicted) {
      corr = correct(map, *predicted, target_at(t_new), opts);
      singular_hit = singular_hit || corr.singular;
      // No sheet jumping: the corrector may only polish the prediction.
      if (corr.converged) {
        const double moved = (corr.y - *predicted).norm();
        const double advance = (*predicted - y).norm();
        if (moved > 0.25 * advance + 1e-8 * (1.0 + y.norm())) corr.converged = false;
      }
      // Steps may not skip over the non-etale locus: det Phi' must change slowly.
      if (corr.converged) {
        det_new = jacobian_at(map, corr.y).determinant;
        if (!(std::abs(std::log(det_new / det_here)) <= opts.max_det_log_change)) corr.converged = false;
      }
    }

    if (corr.converged) {
      if (corr.y.norm() > opts.escape_radius) {
        curve.status = CurveStatus::Escaped;
        return curve;
      }
      t = t_new;
      y = corr.y;
      det_here = det_new;
      curve.points.push_back({t, y, corr.residual});
      curve.tolerances.push_back(corr.tolerance);
      if (corr.iterations <= 1) {
        if (++fast >= 2) {
          h *= opts.grow;
          fast = 0;
        }
      } else {
        fast = 0;
      }
      continue;
    }

    fast = 0;
    h = step * opts.shrink;
    if (h < opts.h_min) {
      const JacobianSample here = jacobian_at(map, y);
      const bool degenerate = singular_hit || jacobian_singular(here, opts) ||
                              std::abs(here.determinant) <= opts.singular_rel * det_start;
      curve.status = degenerate ? CurveStatus::SingularityApproach : CurveStatus::StepFloor;
      return curve;
    }
  }
  curve.status = CurveStatus::Reached;
  return curve;
}

std::optional<CVec> refine(const PolyMap& map, const CVec& y, const CVec& target, const TrackOptions& opts) {
  check_dims(map, y, "point");
  check_dims(map, target, "target");
  Correction c = correct(map, y, target, opts);
  if (!c.converged) return std::nullopt;
  return std::move(c.y);
}

namespace {

CVec checked_origin_value(const PolyMap& map, const TrackOptions& opts) {
  const CVec zero = CVec::Zero(static_cast<Eigen::Index>(map.dim()));
  CVec at_zero = map.eval(zero);
  if (at_zero.norm() > opts.newton_tol) {
    throw InitialDatumInvalid("Phi(0) != 0: ||Phi(0)|| = " + std::to_string(at_zero.norm()));
  }
  return at_zero;
}

}  // namespace

Curve gamma(const PolyMap& map, const CVec& x, double t, const TrackOptions& opts) {
  const CVec anchor = checked_origin_value(map, opts);
  const CVec zero = CVec::Zero(static_cast<Eigen::Index>(map.dim()));
  return track_anchored(map, x, zero, anchor, 0.0, t, opts);
}

std::vector<CVec> gamma_at(const PolyMap& map, const CVec& x, const std::vector<double>& ts,
                           const TrackOptions& opts) {
  check_dims(map, x, "direction");
  const CVec anchor = checked_origin_value(map, opts);
  const CVec zero = CVec::Zero(static_cast<Eigen::Index>(map.dim()));
  std::vector<CVec> out(ts.size());

  std::vector<std::size_t> order(ts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(ts[a]) < std::abs(ts[b]); });

  for (const double sign : {1.0, -1.0}) {
    double t_prev = 0.0;
    CVec y_prev = zero;
    for (auto idx : order) {
      const double t = ts[idx];
      if (t == 0.0) {
        out[idx] = zero;
        continue;
      }
      if ((t > 0.0) != (sign > 0.0)) continue;
      if (t != t_prev) {
        Curve c = track_anchored(map, x, y_prev, anchor + t_prev * x, t_prev, t, opts);
        if (!c.reached()) throw TrackingFailure(c.status, c.last(), "gamma_at t=" + std::to_string(t));
        t_prev = t;
        y_prev = c.last().y;
      }
      out[idx] = y_prev;
    }
  }
  return out;
}

namespace {

CVec finish_inverse(const PolyMap& map, const Curve& c, const CVec& x, const TrackOptions& opts,
                    const char* what) {
  if (!c.reached()) throw TrackingFailure(c.status, c.last(), what);
  CVec y = c.last().y;
  if ((map.eval(y) - x).norm() > 10.0 * opts.newton_tol) {
    auto polished = refine(map, y, x, opts);
    if (!polished || (map.eval(*polished) - x).norm() > 10.0 * opts.newton_tol) {
      throw TrackingFailure(CurveStatus::StepFloor, c.last(), "inverse residual above 10 newton_tol");
    }
    y = *polished;
  }
  return y;
}

}  // namespace

CVec invert_point(const PolyMap& map, const CVec& x, const TrackOptions& opts) {
  return finish_inverse(map, gamma(map, x, 1.0, opts), x, opts, "invert_point");
}

CVec invert_point_detour(const PolyMap& map, const CVec& x, double theta, const TrackOptions& opts) {
  const CVec w = x * std::polar(1.0, theta);
  const Curve first = gamma(map, w, 1.0, opts);
  if (!first.reached()) throw TrackingFailure(first.status, first.last(), "detour ray");
  const CVec anchor = map.eval(CVec::Zero(x.size())) + w;
  const Curve second = track_anchored(map, x - w, first.last().y, anchor, 0.0, 1.0, opts);
  return finish_inverse(map, second, x, opts, "detour segment");
}

// ------------------------------------------------------------- escape time

namespace {

struct Checkpoint {
  double t;
  CVec y;
};

}  // namespace

EscapeResult escape_time_from(const PolyMap& map, const CVec& x, const CVec& y0, const TrackOptions& opts,
                              const EscapeOptions& eopts) {
  check_dims(map, x, "direction");
  check_dims(map, y0, "initial point");
  if (!(eopts.bisect_rtol > 0.0) || !(eopts.t_max > 0.0)) throw InputError("bad escape options");
  const CVec anchor = map.eval(y0);
  auto anchor_at = [&](double t) -> CVec { return anchor + t * x; };
  auto run = [&](const Checkpoint& from, double to, const TrackOptions& o) {
    return track_anchored(map, x, from.y, anchor_at(from.t), from.t, to, o);
  };

  std::vector<Checkpoint> checkpoints{{0.0, y0}};
  Checkpoint low{0.0, y0};
  double high = 0.0;
  CurveStatus failure = CurveStatus::StepFloor;

  // Doubling phase.
  for (double t = std::min(1.0, eopts.t_max);; t = std::min(2.0 * t, eopts.t_max)) {
    const Curve c = run(low, t, opts);
    if (c.reached()) {
      low = {t, c.last().y};
      checkpoints.push_back(low);
      if (t >= eopts.t_max) return Unbounded{t, Unbounded::Basis::TMax};
      continue;
    }
    low = {c.last().t, c.last().y};
    high = t;
    failure = c.status;
    break;
  }

  // Bisection of the failure onset. A failed run still certifies its last
  // accepted point, which tightens the lower end.
  while (high - low.t > eopts.bisect_rtol * std::abs(high)) {
    const double mid = 0.5 * (low.t + high);
    const Curve c = run(low, mid, opts);
    if (c.reached()) {
      low = {mid, c.last().y};
    } else {
      if (c.last().t > low.t) low = {c.last().t, c.last().y};
      high = mid;
      failure = c.status;
    }
  }

  if (failure == CurveStatus::Escaped) {
    TrackOptions wide = opts;
    wide.escape_radius = opts.escape_radius * eopts.confirm_radius_factor;
    const double beyond = high * (1.0 + eopts.confirm_rtol);
    const Curve c = run(low, beyond, wide);
    if (c.reached()) return Unbounded{beyond, Unbounded::Basis::RadiusConfirmed};
  }

  // Stall at a regular point with tame growth: precision ran out, the curve did not end.
  if (failure != CurveStatus::Escaped) {
    const JacobianSample j_low = jacobian_at(map, low.y);
    const double det_start = std::abs(jacobian_at(map, y0).determinant);
    if (std::abs(j_low.determinant) > opts.singular_rel * det_start) {
      const CVec velocity = j_low.matrix.partialPivLu().solve(x);
      const double log_slope = std::abs(low.t) * velocity.norm() / (1.0 + low.y.norm());
      if (std::isfinite(log_slope) && log_slope <= eopts.limit_log_slope) {
        return Unbounded{low.t, Unbounded::Basis::PrecisionLimit};
      }
    }
  }

  EscapeEstimate est;
  est.x = x;
  est.t_low = low.t;
  est.t_high = high;
  est.failure = failure;

  const double a = est.midpoint();
  const double width = high - low.t;
  const double s_max = 0.1 * std::abs(a);
  const double s_min = std::max(100.0 * width, 1e-12 * std::abs(a));
  if (s_min < s_max && eopts.samples >= 2) {
    const double ratio = std::pow(s_min / s_max, 1.0 / (eopts.samples - 1));
    // Start from the last checkpoint below the first sample.
    Checkpoint from = checkpoints.front();
    const double first_t = a - s_max;
    for (const auto& cp : checkpoints) {
      if (cp.t <= first_t) from = cp;
    }
    double s = s_max;
    for (int k = 0; k < eopts.samples; ++k, s *= ratio) {
      const double tk = a - s;
      if (tk <= from.t) continue;
      const Curve c = run(from, tk, opts);
      if (!c.reached()) break;
      from = {tk, c.last().y};
      est.samples.emplace_back(tk, from.y.norm());
      est.sample_points.push_back(from.y);
    }
  }
  return est;
}

std::string_view to_string(Unbounded::Basis b) {
  switch (b) {
    case Unbounded::Basis::TMax: return "t_max";
    case Unbounded::Basis::RadiusConfirmed: return "radius_confirmed";
    case Unbounded::Basis::PrecisionLimit: return "precision_limit";
  }
  return "?";
}

EscapeResult escape_time(const PolyMap& map, const CVec& x, const TrackOptions& opts, const EscapeOptions& eopts) {
  checked_origin_value(map, opts);
  return escape_time_from(map, x, CVec::Zero(static_cast<Eigen::Index>(map.dim())), opts, eopts);
}

// ---------------------------------------------------------------- symmetry

SymmetryReport symmetry_check(const PolyMap& map, const CVec& x, const std::vector<double>& t_grid,
                              const std::vector<double>& s_values, const TrackOptions& opts, bool check_odd) {
  SymmetryReport report;
  if (check_odd) {
    if (!is_odd(map)) throw NotOdd("odd-symmetry check requested on a map with even-degree terms");
    std::vector<double> ts;
    for (double t : t_grid) {
      ts.push_back(t);
      ts.push_back(-t);
    }
    const auto ys = gamma_at(map, x, ts, opts);
    double dev = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) dev = std::max(dev, (ys[2 * k] + ys[2 * k + 1]).norm());
    report.odd_deviation = dev;
  }
  for (double s : s_values) {
    if (s == 0.0) throw InputError("scaling factor must be nonzero");
    std::vector<double> scaled;
    for (double t : t_grid) scaled.push_back(s * t);
    const auto lhs = gamma_at(map, s * x, t_grid, opts);
    const auto rhs = gamma_at(map, x, scaled, opts);
    double dev = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) dev = std::max(dev, (lhs[k] - rhs[k]).norm());
    report.scaling.emplace_back(s, dev);
  }
  return report;
}

std::vector<Curve> track_batch(const PolyMap& map, const std::vector<TrackJob>& jobs, const TrackOptions& opts,
                               int workers) {
  std::vector<Curve> out(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const auto& j = jobs[i];
    out[i] = track(map, j.x, j.y0, j.t0, j.t_target, opts);
  });
  return out;
}

}  // namespace etale
