#include "etale/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace etale {

namespace {

struct Series {
  std::vector<double> u;  // ascending
  std::vector<double> v;
};

Series to_series(const SampledCurve& curve) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, v] : curve.samples) pts.emplace_back(std::abs(t - curve.a), v);
  std::sort(pts.begin(), pts.end());
  Series s;
  for (const auto& [u, v] : pts) {
    s.u.push_back(u);
    s.v.push_back(v);
  }
  return s;
}

std::size_t window_size(std::size_t n, double window_frac) {
  return static_cast<std::size_t>(std::ceil(std::clamp(window_frac, 0.0, 1.0) * static_cast<double>(n)));
}

// Log-log least squares on the first `count` entries (smallest u).
LeadingFit loglog_fit(const std::vector<double>& u, const std::vector<double>& v, std::size_t count,
                      bool use_abs) {
  if (count < 4) throw DegenerateWindow("fewer than 4 usable samples in the fitting window");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < count; ++i) {
    const double val = use_abs ? std::abs(v[i]) : v[i];
    if (!(val > 0.0)) throw NonPositiveValues("non-positive value in log domain");
    xs.push_back(std::log(u[i]));
    ys.push_back(std::log(val));
  }
  const double m = static_cast<double>(count);
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateWindow("window has no spread in t");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    ss_res += e * e;
  }
  LeadingFit fit;
  fit.r_real = slope == 0.0 ? 0.0 : -slope;
  fit.coeff = std::exp(intercept);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

// Weighted least squares of v against u^e for each exponent, weights 1/|v|.
std::vector<double> joint_fit(const Series& s, const std::vector<Rational>& exps) {
  const auto rows = static_cast<Eigen::Index>(s.u.size());
  const auto cols = static_cast<Eigen::Index>(exps.size());
  double scale = 0.0;
  for (double v : s.v) scale = std::max(scale, std::abs(v));
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double v = s.v[static_cast<std::size_t>(i)];
    const double w = 1.0 / std::max(std::abs(v), 1e-300 + 1e-12 * scale);
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = w * std::pow(s.u[static_cast<std::size_t>(i)], exps[static_cast<std::size_t>(j)].value());
    }
    b(i) = w * v;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return {c.data(), c.data() + c.size()};
}

double model_value(double u, const std::vector<Rational>& exps, const std::vector<double>& coeffs) {
  double acc = 0.0;
  for (std::size_t j = 0; j < exps.size(); ++j) acc += coeffs[j] * std::pow(u, exps[j].value());
  return acc;
}

// Divides out each known exponent and differences in log u; what remains
// behaves like u^(next - last known exponent).
Rational propose_next(const Series& s, const std::vector<Rational>& exps, const AsymptoticOptions& opts) {
  std::vector<double> u = s.u;
  std::vector<double> h = s.v;
  double shift = 0.0;
  for (const auto& e : exps) {
    const double d = e.value() - shift;
    for (std::size_t i = 0; i < u.size(); ++i) h[i] /= std::pow(u[i], d);
    if (u.size() < 2) throw DegenerateWindow("too few samples to peel another term");
    std::vector<double> u2, h2;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      u2.push_back(std::sqrt(u[i] * u[i + 1]));
      h2.push_back((h[i + 1] - h[i]) / (std::log(u[i + 1]) - std::log(u[i])));
    }
    u = std::move(u2);
    h = std::move(h2);
    shift = e.value();
  }
  const LeadingFit fit = loglog_fit(u, h, window_size(u.size(), opts.window_frac), true);
  return rational_reconstruct(shift - fit.r_real, opts.den_max);
}

}  // namespace

void SampledCurve::validate() const {
  if (samples.size() < 8) throw DegenerateWindow("a sampled curve needs at least 8 samples");
  std::set<double> ts;
  int side = 0;
  for (const auto& [t, v] : samples) {
    if (!std::isfinite(t) || !std::isfinite(v)) throw InputError("sample is not finite");
    if (t == a) throw InputError("sample taken at the endpoint itself");
    const int s = t > a ? 1 : -1;
    if (side != 0 && s != side) throw InputError("samples lie on both sides of the endpoint");
    side = s;
    if (!ts.insert(t).second) throw InputError("duplicate sample parameter");
  }
}

LeadingFit fit_leading_exponent(const SampledCurve& curve, double window_frac) {
  curve.validate();
  const Series s = to_series(curve);
  return loglog_fit(s.u, s.v, window_size(s.u.size(), window_frac), false);
}

Rational rational_reconstruct(double r, int den_max) {
  if (den_max < 1) throw InputError("den_max must be at least 1");
  if (!std::isfinite(r)) throw InputError("cannot reconstruct a non-finite exponent");
  const long sign = r < 0.0 ? -1 : 1;
  const double x = std::abs(r);

  // Convergents p/q of the continued fraction of x.
  long p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  long p_prev2 = 0, q_prev2 = 1;  // p_{-2}, q_{-2}
  double y = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(y);
    const long a = static_cast<long>(a_real);
    const long q = a * q_prev + q_prev2;
    if (q > den_max) {
      // Best semiconvergent within the bound against the last convergent.
      const long m = (den_max - q_prev2) / q_prev;
      const long ps = m * p_prev + p_prev2;
      const long qs = m * q_prev + q_prev2;
      const Rational conv{p_prev, q_prev};
      const Rational semi{ps, qs};
      const double ec = std::abs(conv.value() - x);
      const double es = std::abs(semi.value() - x);
      const Rational best = (es < ec || (es == ec && qs < q_prev)) ? semi : conv;
      return {sign * best.num, best.den};
    }
    const long p = a * p_prev + p_prev2;
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p;
    q_prev = q;
    const double frac = y - a_real;
    if (frac < 1e-15 * std::max(1.0, y)) break;
    y = 1.0 / frac;
  }
  return {sign * p_prev, q_prev};
}

double PuiseuxExpansion::eval(double t) const {
  const double u = std::abs(t - a);
  double acc = base_value.value_or(0.0);
  const double sign = convention == ExponentConvention::Power ? 1.0 : -1.0;
  for (const auto& term : terms) acc += term.coeff * std::pow(u, sign * term.r.value());
  return acc;
}

PuiseuxExpansion peel_expansion(const SampledCurve& curve, int k, const AsymptoticOptions& opts) {
  if (k < 1) throw InputError("peel_expansion needs k >= 1");
  curve.validate();
  const Series s = to_series(curve);

  PuiseuxExpansion out;
  out.a = curve.a;
  out.convention = ExponentConvention::Power;

  double scale = 0.0;
  for (double v : s.v) scale = std::max(scale, std::abs(v));
  const double floor = opts.term_floor * std::max(1.0, scale);
  if (scale <= floor) {
    out.base_value = 0.0;
    out.residual_bound = scale;
    return out;
  }

  // Leading exponent of the raw values; exponent 0 means a finite base value.
  const LeadingFit lead = loglog_fit(s.u, s.v, window_size(s.u.size(), opts.window_frac), true);
  std::vector<Rational> exps{rational_reconstruct(-lead.r_real, opts.den_max)};
  std::vector<double> coeffs;

  auto assemble = [&](PuiseuxExpansion& e) {
    e.terms.clear();
    e.base_value.reset();
    for (std::size_t j = 0; j < exps.size(); ++j) {
      if (j == 0 && exps[j].num == 0) {
        e.base_value = coeffs[j];
        continue;
      }
      if (coeffs[j] != 0.0) e.terms.push_back({exps[j], coeffs[j]});
    }
    if (!e.base_value && exps.front().num > 0) e.base_value = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      worst = std::max(worst, std::abs(s.v[i] - model_value(s.u[i], exps, coeffs)));
    }
    e.residual_bound = worst;
  };

  for (;;) {
    coeffs = joint_fit(s, exps);
    assemble(out);
    const auto nonconstant = static_cast<int>(out.terms.size());
    if (out.residual_bound <= floor || nonconstant >= k) break;

    const Rational next = propose_next(s, exps, opts);
    if (!(next > exps.back())) {
      throw ExponentOrderViolation(out, "next exponent " + std::to_string(next.num) + "/" +
                                            std::to_string(next.den) + " does not exceed " +
                                            std::to_string(exps.back().num) + "/" +
                                            std::to_string(exps.back().den));
    }
    exps.push_back(next);
  }
  return out;
}

namespace {

PuiseuxExpansion endpoint_asymptotics(const SampledCurve& curve, const AsymptoticOptions& opts) {
  const LeadingFit fit = fit_leading_exponent(curve, opts.window_frac);
  const Rational r = rational_reconstruct(fit.r_real, opts.den_max);

  if (r.num > 0) {
    // Divergent: refit the coefficient with the exponent pinned.
    const Series s = to_series(curve);
    const std::size_t count = window_size(s.u.size(), opts.window_frac);
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += std::log(s.v[i]) + r.value() * std::log(s.u[i]);
    const double c = std::exp(acc / static_cast<double>(count));
    PuiseuxExpansion out;
    out.a = curve.a;
    out.convention = ExponentConvention::BlowUp;
    out.terms.push_back({r, c});
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      worst = std::max(worst, std::abs(s.v[i] - c * std::pow(s.u[i], -r.value())));
    }
    out.residual_bound = worst;
    return out;
  }

  // Bounded: the curve has a limit; describe the approach to it.
  PuiseuxExpansion power = peel_expansion(curve, 1, opts);
  PuiseuxExpansion out;
  out.a = power.a;
  out.convention = ExponentConvention::BlowUp;
  out.base_value = power.base_value.value_or(0.0);
  for (const auto& term : power.terms) out.terms.push_back({{-term.r.num, term.r.den}, term.coeff});
  out.residual_bound = power.residual_bound;
  return out;
}

}  // namespace

PuiseuxExpansion asymptotics_from_estimate(const EscapeEstimate& est, const AsymptoticOptions& opts) {
  return endpoint_asymptotics(SampledCurve{est.midpoint(), est.samples}, opts);
}

std::vector<ChannelFit> channel_asymptotics(const EscapeEstimate& est, const AsymptoticOptions& opts) {
  if (est.sample_points.size() != est.samples.size()) throw InputError("estimate lacks sampled points");
  const std::size_t n = est.sample_points.empty() ? 0 : static_cast<std::size_t>(est.sample_points.front().size());
  std::vector<ChannelFit> fits(n);
  for (std::size_t k = 0; k < n; ++k) {
    SampledCurve channel{est.midpoint(), {}};
    for (std::size_t i = 0; i < est.samples.size(); ++i) {
      channel.samples.emplace_back(est.samples[i].first, std::abs(est.sample_points[i][static_cast<Eigen::Index>(k)]));
    }
    try {
      fits[k].expansion = endpoint_asymptotics(channel, opts);
    } catch (const std::runtime_error& e) {
      fits[k].error = e.what();
    }
  }
  return fits;
}

PuiseuxExpansion escape_asymptotics(const PolyMap& map, const CVec& x, const TrackOptions& opts,
                                    const EscapeOptions& eopts, const AsymptoticOptions& aopts,
                                    const std::optional<CVec>& y0) {
  const EscapeResult res = y0 ? escape_time_from(map, x, *y0, opts, eopts) : escape_time(map, x, opts, eopts);
  if (const auto* u = std::get_if<Unbounded>(&res)) {
    throw UnboundedCurve("curve is unbounded up to t = " + std::to_string(u->t_max_checked));
  }
  return asymptotics_from_estimate(std::get<EscapeEstimate>(res), aopts);
}

}  // namespace etale
