#include "etale/fibers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etale/parallel.hpp"
#include "etale/random.hpp"

namespace etale {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer; decorrelates per-trial streams.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::optional<std::size_t> match(const std::vector<CVec>& points, const CVec& y, double tol) {
  std::optional<std::size_t> best;
  double best_d = tol;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = (points[i] - y).norm();
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

TransportFailure::TransportFailure(const TrackingFailure& cause, std::size_t segment)
    : TrackingFailure(cause.status, cause.last, "transport segment " + std::to_string(segment)),
      segment(segment) {}

void LoopSpec::validate() const {
  if (waypoints.size() < 3) throw InputError("a loop needs at least three waypoints");
  if (waypoints.front() != base || waypoints.back() != base) {
    throw InputError("loop must start and end at its base");
  }
  for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
    if (waypoints[k] == waypoints[k + 1]) throw InputError("consecutive loop waypoints coincide");
  }
}

CVec transport(const PolyMap& map, const CVec& fiber_point, const std::vector<CVec>& path,
               const TrackOptions& opts, const FiberOptions& fopts) {
  if (path.empty()) throw InputError("transport path is empty");
  if ((map.eval(fiber_point) - path.front()).norm() > fopts.fiber_tol) {
    throw InputError("transport start is not over the first path point");
  }
  auto start = refine(map, fiber_point, path.front(), opts);
  CVec y = start ? *start : fiber_point;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const CVec dir = path[k + 1] - path[k];
    const Curve c = track_anchored(map, dir, y, path[k], 0.0, 1.0, opts);
    if (!c.reached()) throw TransportFailure(TrackingFailure(c.status, c.last()), k);
    y = c.last().y;
  }
  return y;
}

LoopSpec random_loop(const CVec& base, double radius, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(base.size());
  LoopSpec loop{base, {}, seed};
  const CVec w1 = base + rng.sphere(n, radius);
  const CVec w2 = base + rng.sphere(n, radius);
  loop.waypoints = {base, w1, w2, base};
  return loop;
}

CVec find_seed_point(const PolyMap& map, const CVec& target, std::uint64_t seed, const TrackOptions& opts,
                     const FiberOptions& fopts) {
  const auto n = static_cast<std::size_t>(target.size());
  const CVec zero = CVec::Zero(target.size());
  if (map.eval(zero).norm() <= opts.newton_tol) {
    try {
      return invert_point(map, target, opts);
    } catch (const TrackingFailure&) {
    } catch (const InputError&) {
    }
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < fopts.seed_attempts; ++attempt) {
    const CVec y = rng.ball(n, 1.0);
    const CVec c = map.eval(y);
    try {
      return transport(map, y, {c, target}, opts, fopts);
    } catch (const TrackingFailure&) {
    }
  }
  throw NoSeed("no preimage found for the target after " + std::to_string(fopts.seed_attempts) + " attempts");
}

MonodromyResult fiber_monodromy(const PolyMap& map, const CVec& target, const TrackOptions& opts,
                                const FiberOptions& fopts, int loop_count, std::uint64_t seed,
                                const std::optional<CVec>& known_preimage) {
  if (static_cast<std::size_t>(target.size()) != map.dim()) throw DimensionError("target has wrong dimension");
  MonodromyResult res;
  res.fiber.target = target;

  CVec first;
  if (known_preimage) {
    if ((map.eval(*known_preimage) - target).norm() > fopts.fiber_tol) {
      throw InputError("supplied preimage is not over the target");
    }
    first = *known_preimage;
  } else {
    first = find_seed_point(map, target, mix(seed, 0), opts, fopts);
  }
  if (auto polished = refine(map, first, target, opts)) first = *polished;
  res.fiber.points.push_back(first);

  const double radius = fopts.loop_radius_scale * target.norm() + fopts.loop_radius_offset;
  std::uint64_t attempt = 0;
  int consecutive_failures = 0;

  while (res.loops < loop_count && res.fiber.loops_since_new < fopts.stabilization_quota) {
    const LoopSpec loop = random_loop(target, radius, mix(seed, ++attempt));
    auto& points = res.fiber.points;
    std::vector<std::optional<CVec>> ends(points.size());
    parallel_for(points.size(), fopts.workers, [&](std::size_t i) {
      try {
        ends[i] = transport(map, points[i], loop.waypoints, opts, fopts);
      } catch (const TrackingFailure&) {
      }
    });
    if (std::any_of(ends.begin(), ends.end(), [](const auto& e) { return !e.has_value(); })) {
      ++res.failed_loops;
      if (++consecutive_failures > fopts.max_retries) {
        res.annotations.push_back("gave up after " + std::to_string(consecutive_failures) +
                                  " consecutive failed loops");
        break;
      }
      continue;
    }
    consecutive_failures = 0;

    std::vector<std::size_t> perm;
    std::vector<bool> hit(points.size(), false);
    const std::size_t before = points.size();
    bool collapsed = false;
    for (auto& e : ends) {
      if ((map.eval(*e) - target).norm() > fopts.fiber_tol) {
        if (auto polished = refine(map, *e, target, opts)) e = *polished;
      }
      if (auto idx = match(points, *e, fopts.dedup_tol)) {
        if (*idx < hit.size() && hit[*idx]) collapsed = true;
        if (*idx >= hit.size()) collapsed = true;  // two sheets landed on one new point
        if (*idx < hit.size()) hit[*idx] = true;
        perm.push_back(*idx);
      } else {
        perm.push_back(points.size());
        points.push_back(*e);
      }
    }
    ++res.loops;
    if (collapsed) {
      res.annotations.push_back("loop " + std::to_string(res.loops) +
                                " mapped two sheets to one point; dedup_tol too large?");
      res.permutations.push_back(std::move(perm));
      res.stabilized = false;
      res.degree_estimate = static_cast<int>(points.size());
      return res;
    }
    res.permutations.push_back(std::move(perm));
    res.fiber.loops_since_new = points.size() > before ? 0 : res.fiber.loops_since_new + 1;
  }
  res.degree_estimate = static_cast<int>(res.fiber.points.size());
  res.stabilized = res.fiber.loops_since_new >= fopts.stabilization_quota;
  return res;
}

BirationalityVerdict birationality_verdict(const PolyMap& map, int trials, std::uint64_t seed,
                                           const TrackOptions& opts, const FiberOptions& fopts, int loop_count,
                                           double target_radius) {
  if (trials < 1) throw InputError("birationality_verdict needs at least one trial");
  BirationalityVerdict v;
  Rng rng(seed);
  std::vector<std::string> problems;
  for (int k = 0; k < trials; ++k) {
    const CVec target = rng.ball(map.dim(), target_radius);
    try {
      v.runs.push_back(fiber_monodromy(map, target, opts, fopts, loop_count, mix(seed, 1000 + static_cast<std::uint64_t>(k))));
      if (!v.runs.back().stabilized) problems.push_back("trial " + std::to_string(k) + " did not stabilize");
    } catch (const NoSeed& e) {
      problems.push_back("trial " + std::to_string(k) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    v.kind = BirationalityVerdict::Kind::Inconclusive;
    v.evidence = problems.front();
    return v;
  }
  const int d = v.runs.front().degree_estimate;
  for (const auto& r : v.runs) {
    if (r.degree_estimate != d) {
      v.kind = BirationalityVerdict::Kind::Inconclusive;
      v.evidence = "trials disagree on the degree";
      return v;
    }
  }
  v.kind = BirationalityVerdict::Kind::Degree;
  v.degree = d;
  v.evidence = std::to_string(trials) + " stabilized trial(s), " + std::to_string(fopts.stabilization_quota) +
               " loops without growth each; degree is a lower bound";
  if (d == 1) {
    v.evidence += "; birational, so an automorphism is expected";
  }
  return v;
}

std::vector<CVec> grid_targets(const Box& region, int grid) {
  if (grid < 1) throw InputError("grid must be at least 1");
  const std::size_t n = region.ranges.size();
  // Flatten to 2n real axes.
  std::vector<std::vector<double>> axes;
  for (const auto& r : region.ranges) {
    for (int part = 0; part < 2; ++part) {
      const double lo = r[2 * part], hi = r[2 * part + 1];
      if (hi < lo) throw InputError("region range has hi < lo");
      std::vector<double> vals;
      if (lo == hi) {
        vals.push_back(lo);
      } else {
        for (int k = 0; k < grid; ++k) vals.push_back(lo + (k + 0.5) * (hi - lo) / grid);
      }
      axes.push_back(std::move(vals));
    }
  }
  std::vector<CVec> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    CVec c(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) c[static_cast<Eigen::Index>(j)] = {axes[2 * j][idx[2 * j]], axes[2 * j + 1][idx[2 * j + 1]]};
    out.push_back(c);
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

StratumReport stratify(const PolyMap& map, const Box& region, int grid, const TrackOptions& opts,
                       const FiberOptions& fopts, int loop_count, std::uint64_t seed, bool real_only) {
  if (region.ranges.size() != map.dim()) throw DimensionError("region dimension does not match the map");
  StratumReport report;
  report.region = region;
  const auto targets = grid_targets(region, grid);
  report.samples.resize(targets.size());

  FiberOptions inner = fopts;
  inner.workers = 1;
  parallel_for(targets.size(), fopts.workers, [&](std::size_t i) {
    StratumSample& s = report.samples[i];
    s.target = targets[i];
    try {
      const MonodromyResult r = fiber_monodromy(map, targets[i], opts, inner, loop_count, mix(seed, i));
      if (!r.stabilized) {
        s.status = "unstabilized";
        return;
      }
      int count = r.degree_estimate;
      if (real_only) {
        count = 0;
        for (const auto& p : r.fiber.points) {
          if (p.imag().cwiseAbs().maxCoeff() <= fopts.real_tol) ++count;
        }
      }
      s.cardinality = count;
      s.status = "ok";
    } catch (const NoSeed&) {
      s.status = "noseed";
    }
  });
  for (const auto& s : report.samples) {
    if (s.cardinality < 0) {
      ++report.failures;
    } else {
      ++report.counts[s.cardinality];
    }
  }
  return report;
}

}  // namespace etale
