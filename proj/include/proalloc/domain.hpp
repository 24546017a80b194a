#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

// Core value types shared by every component: the region universe, price
// tables, video records, demand vectors and placement decisions. All types
// are immutable values after construction; only the simulator mutates a
// PeriodLedger, single-writer.

namespace proalloc {

using json = nlohmann::json;

// Raised when two containers that must agree in length do not.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a value violates a documented invariant (bad price sign,
// malformed tier table, unsorted trace, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Region {
  int id = 0;
  std::string name;
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180]
};

// Pairwise round-trip delay in milliseconds. Symmetric, non-negative, with a
// strictly positive diagonal: serving a viewer from its own region still
// costs one intra-region round trip.
struct RttMatrix {
  int n = 0;
  std::vector<double> d;  // row-major n*n, ms

  RttMatrix() = default;
  RttMatrix(int n_, double fill) : n(n_), d(static_cast<size_t>(n_) * n_, fill) {}

  double at(int i, int j) const { return d[static_cast<size_t>(i) * n + j]; }
  double& at(int i, int j) { return d[static_cast<size_t>(i) * n + j]; }

  void validate() const;
};

struct RegionSet {
  std::vector<Region> regions;
  RttMatrix rtt;

  int size() const { return static_cast<int>(regions.size()); }
  void validate() const;  // dense unique ids, coordinate ranges, rtt shape
};

// One step of a volume-discount price ladder: `upto_gb` is the cumulative
// usage covered by this step (infinity for the last step).
struct StorageTier {
  double upto_gb = 0.0;
  double price_per_gb = 0.0;
};

// Per-region prices. Storage is a per-period (hourly) rate: public cloud
// list prices are monthly and the defaults prorate them by 1/730.
struct CostParams {
  std::vector<double> storage_gb_period;   // alpha
  std::vector<double> migrate_gb;          // eta, keyed by broadcaster region
  std::vector<double> serve_gb;            // omega
  std::vector<std::vector<StorageTier>> tiers;  // optional, reporting only

  int size() const { return static_cast<int>(storage_gb_period.size()); }
  void validate() const;
};

// Marginal-tier repricing of a cumulative storage volume against a ladder.
// Used only for reporting; the optimizer always prices flat alpha.
double tiered_storage_cost(double cumulative_gb, const std::vector<StorageTier>& tiers);

struct RawFeatures {
  std::string broadcaster_name;
  std::string content_category;
  std::int64_t created_time = 0;  // unix seconds, UTC
  int created_day = 0;            // 0 = Monday .. 6 = Sunday
  double broadcaster_lat = 0.0;
  double broadcaster_lon = 0.0;
};

// Viewer count per region for one video. The existence indicator is always
// derived from the counts, never stored.
struct DemandVector {
  std::vector<std::int64_t> counts;

  DemandVector() = default;
  explicit DemandVector(std::vector<std::int64_t> c) : counts(std::move(c)) {}

  int size() const { return static_cast<int>(counts.size()); }
  bool has_viewers(int r) const { return counts[r] > 0; }
  std::int64_t total() const;
  void validate() const;  // all counts >= 0

  bool operator==(const DemandVector&) const = default;
};

// 1 Gbit = 0.125 GB; prices are per GB so the engine standardizes on GB.
inline constexpr double kGbitToGb = 0.125;
inline constexpr double kDefaultVideoSizeGb = 0.738 * kGbitToGb;  // 0.09225
inline constexpr int kDefaultDurationPeriods = 4;

struct VideoRecord {
  std::string video_id;
  int broadcaster_region = 0;
  int start_period = 0;
  int duration_periods = kDefaultDurationPeriods;
  double size_gb = kDefaultVideoSizeGb;
  RawFeatures features;
  std::optional<DemandVector> actual_viewers;
};

// Replica placement for one video: which regions hold a copy, and which
// copy serves each viewer region. `serve` keys are exactly the regions with
// demand; values must be allocated regions.
struct PlacementDecision {
  std::vector<std::uint8_t> allocate;  // length n
  std::map<int, int> serve;            // viewer region -> serving region

  int allocated_count() const;
  bool operator==(const PlacementDecision&) const = default;
};

// Structural check of a decision against a demand vector: mandatory
// broadcaster replica, serving only from allocated regions, serve keys
// exactly the demand support. Does not check the delay constraint, which
// needs an RttMatrix and threshold (optimizer::check_delay).
bool validate_decision(const PlacementDecision& dec, const DemandVector& demand,
                       int broadcaster_region);

struct ActiveVideo {
  PlacementDecision decision;
  double size_gb = 0.0;
  int expires_at = 0;  // first period the video is no longer active
};

// Per-period storage accounting. storage_used is always recomputed from the
// active registry (never updated incrementally) so the accounting identity
// SU_r == sum of active sizes allocated at r holds bit-exactly.
struct PeriodLedger {
  int period = 0;
  std::vector<double> storage_used;            // GB per region
  std::map<std::string, ActiveVideo> active;   // video_id -> entry

  explicit PeriodLedger(int n_regions = 0)
      : storage_used(static_cast<size_t>(n_regions), 0.0) {}

  void recompute_storage();
  std::vector<double> storage_from_registry() const;
};

struct PeriodMetrics {
  int period = 0;
  int arrivals = 0;
  int infeasible = 0;
  double storage_cost = 0.0;             // S, new videos (Eq. 2)
  double migration_cost = 0.0;           // M, new videos (Eq. 3)
  double serving_cost = 0.0;             // Rq, new videos (Eq. 4)
  double network_cost = 0.0;             // C = S + M + Rq (Eq. 5)
  double continuing_storage_cost = 0.0;  // sum_r alpha_r * SU_r, running videos
  double hourly_total = 0.0;             // C + continuing storage (Eq. 7)
  double hits_pct = 100.0;               // % of serve assignments with serve(w) == w
  double avg_latency_predicted_ms = 0.0;
  double avg_latency_actual_ms = 0.0;
  std::vector<double> su_continuing;     // GB per region, post-expiry pre-commit
};

// Canonical JSON for every type (snake_case field names, used by trace
// files and CLI output).
void to_json(json& j, const Region& r);
void from_json(const json& j, Region& r);
void to_json(json& j, const RttMatrix& m);
void from_json(const json& j, RttMatrix& m);
void to_json(json& j, const RegionSet& rs);
void from_json(const json& j, RegionSet& rs);
void to_json(json& j, const StorageTier& t);
void from_json(const json& j, StorageTier& t);
void to_json(json& j, const CostParams& c);
void from_json(const json& j, CostParams& c);
void to_json(json& j, const RawFeatures& f);
void from_json(const json& j, RawFeatures& f);
void to_json(json& j, const DemandVector& d);
void from_json(const json& j, DemandVector& d);
void to_json(json& j, const VideoRecord& v);
void from_json(const json& j, VideoRecord& v);
void to_json(json& j, const PlacementDecision& p);
void from_json(const json& j, PlacementDecision& p);
void to_json(json& j, const PeriodMetrics& m);
void from_json(const json& j, PeriodMetrics& m);

}  // namespace proalloc
