#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etale/polyring.hpp"
#include "etale/tracker.hpp"

namespace etale {

struct FiberOptions {
  double dedup_tol = 1e-6;
  double fiber_tol = 1e-10;
  // Loop waypoints are drawn from the sphere of radius
  // loop_radius_scale * ||target|| + loop_radius_offset around the target.
  double loop_radius_scale = 2.0;
  double loop_radius_offset = 2.0;
  int stabilization_quota = 20;
  // Consecutive failed loop attempts tolerated before a run gives up.
  int max_retries = 10;
  int seed_attempts = 16;
  // Preimages with max |Im y_j| <= real_tol count as real in stratify.
  double real_tol = 1e-8;
  int workers = 1;
};

/// Deduplicated preimages of one target.
struct Fiber {
  CVec target;
  std::vector<CVec> points;
  int loops_since_new = 0;
};

/// Closed polygonal path in the base.
struct LoopSpec {
  CVec base;
  std::vector<CVec> waypoints;  // first and last equal base
  std::uint64_t seed = 0;

  void validate() const;
};

struct MonodromyResult {
  Fiber fiber;
  /// perm[i] = index of the endpoint of point i; injective, and may point
  /// at indices added by the same loop.
  std::vector<std::vector<std::size_t>> permutations;
  int degree_estimate = 0;
  bool stabilized = false;
  int loops = 0;
  int failed_loops = 0;
  std::vector<std::string> annotations;
};

class NoSeed : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class TransportFailure : public TrackingFailure {
public:
  TransportFailure(const TrackingFailure& cause, std::size_t segment);
  std::size_t segment;
};

/// Moves a preimage of path[0] along the polygonal path and returns the
/// preimage of path.back() reached by continuation.
CVec transport(const PolyMap& map, const CVec& fiber_point, const std::vector<CVec>& path,
               const TrackOptions& opts = {}, const FiberOptions& fopts = {});

/// Random triangle based at `base` with vertices in the ball of `radius`.
LoopSpec random_loop(const CVec& base, double radius, std::uint64_t seed);

/// Finds one preimage of target: the inverse curve from 0 when Phi(0) = 0,
/// otherwise (or on failure) transport from a random point's image.
CVec find_seed_point(const PolyMap& map, const CVec& target, std::uint64_t seed,
                     const TrackOptions& opts = {}, const FiberOptions& fopts = {});

MonodromyResult fiber_monodromy(const PolyMap& map, const CVec& target, const TrackOptions& opts,
                                const FiberOptions& fopts, int loop_count, std::uint64_t seed,
                                const std::optional<CVec>& known_preimage = std::nullopt);

struct BirationalityVerdict {
  enum class Kind { Degree, Inconclusive };
  Kind kind = Kind::Inconclusive;
  int degree = 0;
  std::string evidence;
  std::vector<MonodromyResult> runs;
};

BirationalityVerdict birationality_verdict(const PolyMap& map, int trials, std::uint64_t seed,
                                           const TrackOptions& opts = {}, const FiberOptions& fopts = {},
                                           int loop_count = 200, double target_radius = 1.0);

/// Product of per-coordinate complex rectangles [re_lo, re_hi] x [im_lo, im_hi].
struct Box {
  std::vector<std::array<double, 4>> ranges;
};

struct StratumSample {
  CVec target;
  int cardinality = -1;  // -1 on failure
  std::string status;
};

struct StratumReport {
  Box region;
  std::map<int, int> counts;
  int failures = 0;
  std::vector<StratumSample> samples;
};

/// Cell-centred grid with `grid` points along every non-degenerate axis.
std::vector<CVec> grid_targets(const Box& region, int grid);

StratumReport stratify(const PolyMap& map, const Box& region, int grid, const TrackOptions& opts = {},
                       const FiberOptions& fopts = {}, int loop_count = 200, std::uint64_t seed = 0,
                       bool real_only = false);

}  // namespace etale
