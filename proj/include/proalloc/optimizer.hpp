#pragma once

#include <span>
#include <tuple>

#include "proalloc/domain.hpp"

// Exact per-video cost minimization: pick the replica set (always including
// the broadcaster's site) and one serving site per viewer region, minimizing
// storage + migration + serving cost subject to a cap on the viewer-weighted
// average round-trip delay. The per-period problem separates across videos
// because storage is priced at a flat per-region rate.
//
// Algorithm: enumerate allocation subsets over a pruned candidate region
// set; for each subset solve the serving assignment as a multiple-choice
// knapsack (one class per viewer region) with delays rounded DOWN to an
// integer grid, then certify the winner against the true delays and retry
// on a finer grid if certification fails. A brute-force enumerator is kept
// as the verification oracle.

namespace proalloc {

struct VideoInstance {
  int broadcaster_region = 0;
  DemandVector demand;
  double size_gb = kDefaultVideoSizeGb;
};

struct SolveReport {
  PlacementDecision decision;
  double storage_cost = 0.0;
  double migration_cost = 0.0;
  double serving_cost = 0.0;
  double avg_delay_ms = 0.0;
  bool optimal = false;
  // minimum achievable average delay; meaningful when optimal == false
  double min_feasible_delay_ms = 0.0;

  double total_cost() const { return storage_cost + migration_cost + serving_cost; }
};

struct SolverOptions {
  double knapsack_resolution_ms = 0.1;
  // The printed migration formula also charges the broadcaster's own copy;
  // no transfer happens for it, so the default excludes it.
  bool charge_broadcaster_migration = false;
  bool prune_dominated = true;  // off to exercise the pruning-equality tests
};

// No serving assignment meets the threshold even from the closest sites.
struct InfeasibleError : std::runtime_error {
  double min_avg_delay_ms;
  explicit InfeasibleError(double min_avg)
      : std::runtime_error("no feasible serving assignment; minimum achievable average "
                           "delay is " +
                           std::to_string(min_avg) + " ms"),
        min_avg_delay_ms(min_avg) {}
};

// Instance exceeds the brute-force enumeration bounds.
struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Storage, migration and serving cost of one decision. The decision must be
// structurally valid.
std::tuple<double, double, double> video_cost(const VideoInstance& inst,
                                              const PlacementDecision& dec,
                                              const CostParams& prices,
                                              const SolverOptions& opts = {});

// Viewer-weighted average serving delay and whether it meets the threshold
// (absolute slack 1e-9 ms). Zero total demand is vacuously satisfied at 0.
std::pair<double, bool> check_delay(const VideoInstance& inst, const PlacementDecision& dec,
                                    const RttMatrix& rtt, double threshold_ms);

// Globally optimal decision for one video (exact w.r.t. the delay grid,
// certified against true delays). Throws InfeasibleError when even
// closest-site serving misses the threshold. threshold_ms may be +infinity.
SolveReport solve_video(const VideoInstance& inst, const RegionSet& regions,
                        const CostParams& prices, double threshold_ms,
                        const SolverOptions& opts = {});

// Exhaustive oracle: every allocation subset x every serving map, true
// delays. Requires n <= 6 regions and <= 5 viewer regions.
SolveReport brute_force_solve(const VideoInstance& inst, const RegionSet& regions,
                              const CostParams& prices, double threshold_ms,
                              const SolverOptions& opts = {});

// Independent solve_video per video, order-preserving. Infeasible videos
// degrade to a broadcaster-only decision with optimal == false instead of
// failing the batch.
std::vector<SolveReport> solve_period(std::span<const VideoInstance> videos,
                                      const RegionSet& regions, const CostParams& prices,
                                      double threshold_ms, const SolverOptions& opts = {},
                                      int jobs = 0);

// Plain loop twin of solve_period, kept as the reference for tests and the
// benchmark.
std::vector<SolveReport> solve_period_serial(std::span<const VideoInstance> videos,
                                             const RegionSet& regions,
                                             const CostParams& prices, double threshold_ms,
                                             const SolverOptions& opts = {});

void to_json(json& j, const SolveReport& r);
void from_json(const json& j, SolveReport& r);
void to_json(json& j, const VideoInstance& v);
void from_json(const json& j, VideoInstance& v);

}  // namespace proalloc
