#pragma once

#include <memory>
#include <random>
#include <span>

#include "proalloc/domain.hpp"

// Feature encoding and from-scratch multi-output regression trees / random
// forest. The forest predicts the per-region viewer count for an incoming
// video; training parallelizes across trees with per-tree RNG streams so
// results are independent of the schedule.

namespace proalloc {

struct EncoderConfig {
  int hash_dim_name = 64;       // power of two
  int hash_dim_category = 32;   // power of two
  std::uint64_t hash_seed = 0x9e3779b97f4a7c15ULL;

  int width(int n_regions) const {
    return hash_dim_name + hash_dim_category + kTimePeriods + kWeekDays + n_regions;
  }
  static constexpr int kTimePeriods = 6;
  static constexpr int kWeekDays = 7;
};

// Hour-of-day bucket of width 4h: [0,4) -> 0 ... [20,24) -> 5.
int cluster_time_period(std::int64_t unix_seconds);

// Signed hashing trick: a single +-1 at H(text) mod dim, sign from an
// independent hash. dim must be a power of two >= 2.
void hash_feature(std::string_view text, int dim, std::uint64_t seed,
                  std::span<double> out);

// Dense vector [name hash | category hash | time-period one-hot | day
// one-hot | broadcaster-region one-hot]. The broadcaster location is mapped
// to its nearest region.
std::vector<double> encode(const RawFeatures& features, const RegionSet& regions,
                           const EncoderConfig& cfg);

// Multi-output CART node. Leaves hold the mean target vector of the
// training rows routed to them.
struct TreeNode {
  int feature = -1;          // -1 for leaves
  double threshold = 0.0;    // go left when x[feature] <= threshold
  std::unique_ptr<TreeNode> left, right;
  std::vector<double> leaf;  // mean output, leaves only

  bool is_leaf() const { return feature < 0; }
};

struct TreeParams {
  int max_depth = 12;
  int min_samples_leaf = 2;
  double feature_subsample = 1.0;  // fraction of features scanned per split
};

using Rng = std::mt19937_64;

// Greedy CART: best variance-reduction split (summed over the output
// coordinates) across a random feature subset; candidate thresholds are
// midpoints between consecutive sorted unique values.
std::unique_ptr<TreeNode> fit_tree(const std::vector<std::vector<double>>& X,
                                   const std::vector<std::vector<double>>& Y,
                                   const TreeParams& params, Rng& rng);

// Seed of tree k's RNG stream, a pure function of the forest seed and k.
std::uint64_t derive_tree_seed(std::uint64_t forest_seed, int tree_index);

struct ForestParams {
  int n_trees = 30;
  int max_depth = 12;
  int min_samples_leaf = 2;
  std::uint64_t rng_seed = 1;
  bool bootstrap = true;
  double feature_subsample = 0.0;  // <= 0 means sqrt(width)/width
};

struct ForestModel {
  std::vector<std::unique_ptr<TreeNode>> trees;
  ForestParams params;
  EncoderConfig encoder;
  int n_regions = 0;
  int width = 0;

  // Per-coordinate mean over trees, before integer rounding.
  std::vector<double> predict_raw(std::span<const double> x) const;
  // Mean over trees, clamped at zero and rounded to nearest integer.
  DemandVector predict(std::span<const double> x) const;
};

// Trains n_trees CARTs on bootstrap resamples. Tree k draws its RNG from
// rng_seed and k only, so the result is identical for any jobs value.
ForestModel fit_forest(const std::vector<std::vector<double>>& X,
                       const std::vector<std::vector<double>>& Y,
                       const ForestParams& params, int jobs = 0);

// Plain loop twin of fit_forest, kept as the reference for tests and the
// benchmark.
ForestModel fit_forest_serial(const std::vector<std::vector<double>>& X,
                              const std::vector<std::vector<double>>& Y,
                              const ForestParams& params);

// Coefficient of determination. Throws ValidationError when the actuals
// are all identical (zero denominator).
double r_squared(std::span<const double> actual, std::span<const double> predicted);

// Pooled variant over a whole (samples x regions) matrix pair with a grand
// mean, flattening every coordinate into one sample set.
double r_squared_pooled(const std::vector<std::vector<double>>& actual,
                        const std::vector<std::vector<double>>& predicted);

// Versioned JSON model file, trees as nested nodes.
void save_model(const ForestModel& model, const std::string& path);
ForestModel load_model(const std::string& path);

}  // namespace proalloc
