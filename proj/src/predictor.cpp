#include "proalloc/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "proalloc/geo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace proalloc {

int cluster_time_period(std::int64_t unix_seconds) {
  std::int64_t sec_of_day = unix_seconds % 86400;
  if (sec_of_day < 0) sec_of_day += 86400;
  return static_cast<int>(sec_of_day / 3600 / 4);
}

namespace {

std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// splitmix64 finalizer, decorrelates derived seeds
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void hash_feature(std::string_view text, int dim, std::uint64_t seed,
                  std::span<double> out) {
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw ValidationError("hash dimension must be a power of two >= 2");
  if (out.size() != static_cast<size_t>(dim))
    throw DimensionError("hash output span does not match dim");
  const std::uint64_t h = fnv1a64(text, seed);
  const std::uint64_t s = fnv1a64(text, mix64(seed ^ 0x5851f42d4c957f2dULL));
  out[h & static_cast<std::uint64_t>(dim - 1)] += (s & 1) ? 1.0 : -1.0;
}

std::vector<double> encode(const RawFeatures& features, const RegionSet& regions,
                           const EncoderConfig& cfg) {
  const int n = regions.size();
  std::vector<double> x(static_cast<size_t>(cfg.width(n)), 0.0);
  size_t off = 0;
  hash_feature(features.broadcaster_name, cfg.hash_dim_name, cfg.hash_seed,
               std::span<double>(x).subspan(off, cfg.hash_dim_name));
  off += cfg.hash_dim_name;
  hash_feature(features.content_category, cfg.hash_dim_category,
               mix64(cfg.hash_seed ^ 0xa0761d6478bd642fULL),
               std::span<double>(x).subspan(off, cfg.hash_dim_category));
  off += cfg.hash_dim_category;
  x[off + cluster_time_period(features.created_time)] = 1.0;
  off += EncoderConfig::kTimePeriods;
  if (features.created_day < 0 || features.created_day >= EncoderConfig::kWeekDays)
    throw ValidationError("created_day must be in 0..6");
  x[off + features.created_day] = 1.0;
  off += EncoderConfig::kWeekDays;
  const int rb = nearest_region(GeoPoint{features.broadcaster_lat, features.broadcaster_lon},
                                regions);
  x[off + rb] = 1.0;
  return x;
}

// ---------------------------------------------------------------------------
// CART

namespace {

struct SplitScan {
  int feature = -1;
  double threshold = 0.0;
  double children_sse = std::numeric_limits<double>::infinity();
  size_t left_count = 0;
};

// SSE of a sample set across all output coordinates, from its sufficient
// statistics: sum ||y||^2 - sum_c (sum y_c)^2 / count.
double sse_from_stats(const std::vector<double>& sum, double sumsq, size_t count) {
  double s = sumsq;
  for (double v : sum) s -= v * v / static_cast<double>(count);
  return s;
}

struct TreeBuilder {
  const std::vector<std::vector<double>>& X;
  const std::vector<std::vector<double>>& Y;
  TreeParams params;
  Rng& rng;
  int width;
  int n_out;

  std::unique_ptr<TreeNode> build(std::vector<size_t>& idx, int depth) {
    const size_t n = idx.size();
    std::vector<double> sum(n_out, 0.0);
    double sumsq = 0.0;
    for (size_t i : idx) {
      const std::vector<double>& y = Y[i];
      for (int c = 0; c < n_out; ++c) {
        sum[c] += y[c];
        sumsq += y[c] * y[c];
      }
    }
    const double node_sse = sse_from_stats(sum, sumsq, n);

    auto make_leaf = [&] {
      auto leaf = std::make_unique<TreeNode>();
      leaf->leaf.resize(n_out);
      for (int c = 0; c < n_out; ++c) leaf->leaf[c] = sum[c] / static_cast<double>(n);
      return leaf;
    };

    if (depth >= params.max_depth || node_sse <= 1e-12 ||
        n < 2 * static_cast<size_t>(params.min_samples_leaf))
      return make_leaf();

    const SplitScan best = find_split(idx, sum, sumsq, node_sse);
    if (best.feature < 0) return make_leaf();

    std::vector<size_t> left_idx, right_idx;
    left_idx.reserve(best.left_count);
    right_idx.reserve(n - best.left_count);
    for (size_t i : idx)
      (X[i][best.feature] <= best.threshold ? left_idx : right_idx).push_back(i);

    auto node = std::make_unique<TreeNode>();
    node->feature = best.feature;
    node->threshold = best.threshold;
    idx.clear();
    idx.shrink_to_fit();
    node->left = build(left_idx, depth + 1);
    node->right = build(right_idx, depth + 1);
    return node;
  }

  SplitScan find_split(const std::vector<size_t>& idx, const std::vector<double>& total_sum,
                       double total_sumsq, double node_sse) {
    const size_t n = idx.size();
    const int k = std::clamp(
        static_cast<int>(std::lround(params.feature_subsample * width)), 1, width);
    std::vector<int> features(width);
    std::iota(features.begin(), features.end(), 0);
    // partial Fisher-Yates: first k entries are the scanned subset
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, width - 1);
      std::swap(features[i], features[pick(rng)]);
    }

    SplitScan best;
    std::vector<std::pair<double, size_t>> order(n);
    std::vector<double> left_sum(n_out);
    for (int fi = 0; fi < k; ++fi) {
      const int f = features[fi];
      for (size_t r = 0; r < n; ++r) order[r] = {X[idx[r]][f], idx[r]};
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (order.front().first == order.back().first) continue;  // constant feature

      std::fill(left_sum.begin(), left_sum.end(), 0.0);
      double left_sumsq = 0.0;
      for (size_t r = 0; r + 1 < n; ++r) {
        const std::vector<double>& y = Y[order[r].second];
        for (int c = 0; c < n_out; ++c) {
          left_sum[c] += y[c];
          left_sumsq += y[c] * y[c];
        }
        if (order[r].first == order[r + 1].first) continue;  // not a boundary
        const size_t nl = r + 1, nr = n - nl;
        if (nl < static_cast<size_t>(params.min_samples_leaf) ||
            nr < static_cast<size_t>(params.min_samples_leaf))
          continue;
        double children = sse_from_stats(left_sum, left_sumsq, nl);
        double right_sumsq = total_sumsq - left_sumsq;
        double right = right_sumsq;
        for (int c = 0; c < n_out; ++c) {
          const double v = total_sum[c] - left_sum[c];
          right -= v * v / static_cast<double>(nr);
        }
        children += right;
        if (children < best.children_sse) {
          best.children_sse = children;
          best.feature = f;
          best.threshold = (order[r].first + order[r + 1].first) / 2.0;
          best.left_count = nl;
        }
      }
    }
    // demand a real reduction; otherwise the node stays a leaf
    if (best.feature >= 0 && !(best.children_sse < node_sse - 1e-12)) best.feature = -1;
    return best;
  }
};

const TreeNode* descend(const TreeNode* t, std::span<const double> x) {
  while (!t->is_leaf()) t = (x[t->feature] <= t->threshold) ? t->left.get() : t->right.get();
  return t;
}

std::unique_ptr<TreeNode> fit_one(const std::vector<std::vector<double>>& X,
                                  const std::vector<std::vector<double>>& Y,
                                  const ForestParams& params, const TreeParams& tp,
                                  int tree_index) {
  Rng rng(derive_tree_seed(params.rng_seed, tree_index));
  std::vector<size_t> idx;
  const size_t n = X.size();
  idx.reserve(n);
  if (params.bootstrap) {
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    for (size_t i = 0; i < n; ++i) idx.push_back(pick(rng));
  } else {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
  }
  TreeBuilder builder{X, Y, tp, rng, static_cast<int>(X[0].size()),
                      static_cast<int>(Y[0].size())};
  return builder.build(idx, 0);
}

TreeParams tree_params_for(const ForestParams& p, int width) {
  TreeParams tp;
  tp.max_depth = p.max_depth;
  tp.min_samples_leaf = p.min_samples_leaf;
  tp.feature_subsample = p.feature_subsample > 0.0
                             ? p.feature_subsample
                             : std::sqrt(static_cast<double>(width)) / width;
  return tp;
}

}  // namespace

std::uint64_t derive_tree_seed(std::uint64_t forest_seed, int tree_index) {
  return mix64(forest_seed ^
               (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(tree_index + 1)));
}

std::unique_ptr<TreeNode> fit_tree(const std::vector<std::vector<double>>& X,
                                   const std::vector<std::vector<double>>& Y,
                                   const TreeParams& params, Rng& rng) {
  if (X.empty() || X.size() != Y.size())
    throw DimensionError("training set empty or X/Y length mismatch");
  std::vector<size_t> idx(X.size());
  std::iota(idx.begin(), idx.end(), 0);
  TreeBuilder builder{X, Y, params, rng, static_cast<int>(X[0].size()),
                      static_cast<int>(Y[0].size())};
  return builder.build(idx, 0);
}

ForestModel fit_forest(const std::vector<std::vector<double>>& X,
                       const std::vector<std::vector<double>>& Y,
                       const ForestParams& params, int jobs) {
  if (X.empty() || X.size() != Y.size())
    throw DimensionError("training set empty or X/Y length mismatch");
  const int width = static_cast<int>(X[0].size());
  const TreeParams tp = tree_params_for(params, width);

  ForestModel model;
  model.params = params;
  model.n_regions = static_cast<int>(Y[0].size());
  model.width = width;
  model.trees.resize(params.n_trees);
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int k = 0; k < params.n_trees; ++k)
    model.trees[k] = fit_one(X, Y, params, tp, k);
#else
  (void)jobs;
  for (int k = 0; k < params.n_trees; ++k)
    model.trees[k] = fit_one(X, Y, params, tp, k);
#endif
  return model;
}

ForestModel fit_forest_serial(const std::vector<std::vector<double>>& X,
                              const std::vector<std::vector<double>>& Y,
                              const ForestParams& params) {
  if (X.empty() || X.size() != Y.size())
    throw DimensionError("training set empty or X/Y length mismatch");
  const int width = static_cast<int>(X[0].size());
  const TreeParams tp = tree_params_for(params, width);
  ForestModel model;
  model.params = params;
  model.n_regions = static_cast<int>(Y[0].size());
  model.width = width;
  model.trees.reserve(params.n_trees);
  for (int k = 0; k < params.n_trees; ++k)
    model.trees.push_back(fit_one(X, Y, params, tp, k));
  return model;
}

std::vector<double> ForestModel::predict_raw(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != width)
    throw DimensionError("feature vector width does not match training width");
  std::vector<double> mean(static_cast<size_t>(n_regions), 0.0);
  for (const auto& t : trees) {
    const TreeNode* leaf = descend(t.get(), x);
    for (int c = 0; c < n_regions; ++c) mean[c] += leaf->leaf[c];
  }
  const double inv = 1.0 / static_cast<double>(trees.size());
  for (double& v : mean) v *= inv;
  return mean;
}

DemandVector ForestModel::predict(std::span<const double> x) const {
  const std::vector<double> mean = predict_raw(x);
  DemandVector out;
  out.counts.reserve(mean.size());
  for (double v : mean) out.counts.push_back(std::llround(std::max(0.0, v)));
  return out;
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.empty() || actual.size() != predicted.size())
    throw DimensionError("r_squared needs equal nonzero lengths");
  double mean = 0.0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (size_t i = 0; i < actual.size(); ++i) {
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }
  if (ss_tot <= 0.0)
    throw ValidationError("r_squared undefined: actual values are all identical");
  return 1.0 - ss_res / ss_tot;
}

double r_squared_pooled(const std::vector<std::vector<double>>& actual,
                        const std::vector<std::vector<double>>& predicted) {
  if (actual.empty() || actual.size() != predicted.size())
    throw DimensionError("pooled r_squared needs equal nonzero lengths");
  std::vector<double> a, p;
  for (size_t i = 0; i < actual.size(); ++i) {
    if (actual[i].size() != predicted[i].size())
      throw DimensionError("pooled r_squared row length mismatch");
    a.insert(a.end(), actual[i].begin(), actual[i].end());
    p.insert(p.end(), predicted[i].begin(), predicted[i].end());
  }
  return r_squared(a, p);
}

// ---------------------------------------------------------------------------
// Model file

namespace {

json tree_to_json(const TreeNode& t) {
  if (t.is_leaf()) return json{{"leaf", t.leaf}};
  return json{{"f", t.feature},
              {"t", t.threshold},
              {"l", tree_to_json(*t.left)},
              {"r", tree_to_json(*t.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("leaf")) {
    j.at("leaf").get_to(node->leaf);
    return node;
  }
  j.at("f").get_to(node->feature);
  j.at("t").get_to(node->threshold);
  node->left = tree_from_json(j.at("l"));
  node->right = tree_from_json(j.at("r"));
  return node;
}

constexpr int kModelSchemaVersion = 1;

}  // namespace

void save_model(const ForestModel& model, const std::string& path) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["n_trees"] = model.params.n_trees;
  j["max_depth"] = model.params.max_depth;
  j["min_samples_leaf"] = model.params.min_samples_leaf;
  j["rng_seed"] = model.params.rng_seed;
  j["bootstrap"] = model.params.bootstrap;
  j["feature_subsample"] = model.params.feature_subsample;
  j["encoder"] = json{{"hash_dim_name", model.encoder.hash_dim_name},
                      {"hash_dim_category", model.encoder.hash_dim_category},
                      {"hash_seed", model.encoder.hash_seed}};
  j["n_regions"] = model.n_regions;
  j["width"] = model.width;
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_to_json(*t));
  j["trees"] = std::move(trees);

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open model file for writing: " + path);
  out << j.dump() << '\n';
}

ForestModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  json j;
  in >> j;
  if (j.at("schema_version").get<int>() != kModelSchemaVersion)
    throw ValidationError("unsupported model schema version");
  ForestModel model;
  j.at("n_trees").get_to(model.params.n_trees);
  j.at("max_depth").get_to(model.params.max_depth);
  j.at("min_samples_leaf").get_to(model.params.min_samples_leaf);
  j.at("rng_seed").get_to(model.params.rng_seed);
  j.at("bootstrap").get_to(model.params.bootstrap);
  j.at("feature_subsample").get_to(model.params.feature_subsample);
  j.at("encoder").at("hash_dim_name").get_to(model.encoder.hash_dim_name);
  j.at("encoder").at("hash_dim_category").get_to(model.encoder.hash_dim_category);
  j.at("encoder").at("hash_seed").get_to(model.encoder.hash_seed);
  j.at("n_regions").get_to(model.n_regions);
  j.at("width").get_to(model.width);
  for (const json& t : j.at("trees")) model.trees.push_back(tree_from_json(t));
  return model;
}

}  // namespace proalloc
