#include "proalloc/domain.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace proalloc {

void RttMatrix::validate() const {
  if (d.size() != static_cast<size_t>(n) * n)
    throw DimensionError("rtt matrix storage does not match n*n");
  for (int i = 0; i < n; ++i) {
    if (!(at(i, i) > 0.0))
      throw ValidationError("rtt diagonal must be strictly positive (row " +
                            std::to_string(i) + ")");
    for (int j = 0; j < n; ++j) {
      if (!(at(i, j) >= 0.0))
        throw ValidationError("rtt entries must be non-negative");
      if (std::abs(at(i, j) - at(j, i)) > 1e-9)
        throw ValidationError("rtt matrix must be symmetric (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
    }
  }
}

void RegionSet::validate() const {
  const int n = size();
  if (n == 0) throw ValidationError("region set is empty");
  for (int i = 0; i < n; ++i) {
    const Region& r = regions[i];
    if (r.id != i)
      throw ValidationError("region ids must be dense 0..n-1 in order; got id " +
                            std::to_string(r.id) + " at index " + std::to_string(i));
    if (r.latitude < -90.0 || r.latitude > 90.0)
      throw ValidationError("latitude out of range for region " + r.name);
    if (r.longitude < -180.0 || r.longitude > 180.0)
      throw ValidationError("longitude out of range for region " + r.name);
  }
  if (rtt.n != 0) {
    if (rtt.n != n) throw DimensionError("rtt matrix size does not match region count");
    rtt.validate();
  }
}

void CostParams::validate() const {
  const size_t n = storage_gb_period.size();
  if (migrate_gb.size() != n || serve_gb.size() != n)
    throw DimensionError("price vectors must have equal length");
  auto check_nonneg = [](const std::vector<double>& v, const char* what) {
    for (double x : v)
      if (!(x >= 0.0)) throw ValidationError(std::string(what) + " price must be >= 0");
  };
  check_nonneg(storage_gb_period, "storage");
  check_nonneg(migrate_gb, "migration");
  check_nonneg(serve_gb, "serving");
  if (!tiers.empty() && tiers.size() != n)
    throw DimensionError("tier table must be empty or one ladder per region");
  for (const auto& ladder : tiers) {
    for (size_t k = 0; k < ladder.size(); ++k) {
      if (!(ladder[k].price_per_gb >= 0.0))
        throw ValidationError("tier price must be >= 0");
      if (k > 0) {
        if (!(ladder[k].upto_gb > ladder[k - 1].upto_gb))
          throw ValidationError("tier thresholds must be strictly increasing");
        if (ladder[k].price_per_gb > ladder[k - 1].price_per_gb)
          throw ValidationError("tier prices must be non-increasing");
      }
    }
  }
}

double tiered_storage_cost(double cumulative_gb, const std::vector<StorageTier>& tiers) {
  if (tiers.empty()) throw ValidationError("empty tier ladder");
  double cost = 0.0;
  double covered = 0.0;
  for (const StorageTier& t : tiers) {
    if (cumulative_gb <= covered) break;
    const double span = std::min(cumulative_gb, t.upto_gb) - covered;
    cost += span * t.price_per_gb;
    covered = t.upto_gb;
  }
  if (cumulative_gb > covered)
    // beyond the last threshold the last price keeps applying
    cost += (cumulative_gb - covered) * tiers.back().price_per_gb;
  return cost;
}

std::int64_t DemandVector::total() const {
  std::int64_t s = 0;
  for (std::int64_t c : counts) s += c;
  return s;
}

void DemandVector::validate() const {
  for (std::int64_t c : counts)
    if (c < 0) throw ValidationError("viewer counts must be non-negative");
}

int PlacementDecision::allocated_count() const {
  int k = 0;
  for (std::uint8_t a : allocate) k += (a != 0);
  return k;
}

bool validate_decision(const PlacementDecision& dec, const DemandVector& demand,
                       int broadcaster_region) {
  const size_t n = demand.counts.size();
  if (dec.allocate.size() != n)
    throw DimensionError("decision allocate vector and demand vector differ in length");
  if (broadcaster_region < 0 || static_cast<size_t>(broadcaster_region) >= n)
    throw DimensionError("broadcaster region index out of range");

  // (6a) mandatory replica at the broadcaster's site
  if (!dec.allocate[broadcaster_region]) return false;

  size_t covered = 0;
  for (const auto& [w, a] : dec.serve) {
    if (w < 0 || static_cast<size_t>(w) >= n || a < 0 || static_cast<size_t>(a) >= n)
      throw DimensionError("serve map region index out of range");
    // (6b) serve only from an allocated region
    if (!dec.allocate[a]) return false;
    // (6c) serve only regions that actually have viewers
    if (demand.counts[w] <= 0) return false;
    ++covered;
  }
  // (6d) every viewer region is served from exactly one region
  for (size_t w = 0; w < n; ++w)
    if (demand.counts[w] > 0 && !dec.serve.count(static_cast<int>(w))) return false;
  (void)covered;
  return true;
}

void PeriodLedger::recompute_storage() { storage_used = storage_from_registry(); }

std::vector<double> PeriodLedger::storage_from_registry() const {
  std::vector<double> su(storage_used.size(), 0.0);
  // map order (video_id) is the canonical accumulation order
  for (const auto& [id, v] : active) {
    for (size_t r = 0; r < su.size(); ++r)
      if (v.decision.allocate[r]) su[r] += v.size_gb;
  }
  return su;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const Region& r) {
  j = json{{"id", r.id}, {"name", r.name}, {"lat", r.latitude}, {"lon", r.longitude}};
}
void from_json(const json& j, Region& r) {
  j.at("id").get_to(r.id);
  j.at("name").get_to(r.name);
  j.at("lat").get_to(r.latitude);
  j.at("lon").get_to(r.longitude);
}

void to_json(json& j, const RttMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int k = 0; k < m.n; ++k) row.push_back(m.at(i, k));
    rows.push_back(std::move(row));
  }
  j = std::move(rows);
}
void from_json(const json& j, RttMatrix& m) {
  m.n = static_cast<int>(j.size());
  m.d.assign(static_cast<size_t>(m.n) * m.n, 0.0);
  for (int i = 0; i < m.n; ++i) {
    const json& row = j.at(i);
    if (static_cast<int>(row.size()) != m.n)
      throw DimensionError("rtt matrix row " + std::to_string(i) + " has wrong length");
    for (int k = 0; k < m.n; ++k) m.at(i, k) = row.at(k).get<double>();
  }
}

void to_json(json& j, const RegionSet& rs) {
  j = json{{"regions", rs.regions}};
  if (rs.rtt.n != 0) j["rtt"] = rs.rtt;
}
void from_json(const json& j, RegionSet& rs) {
  j.at("regions").get_to(rs.regions);
  if (j.contains("rtt")) j.at("rtt").get_to(rs.rtt);
}

void to_json(json& j, const StorageTier& t) {
  j = json{{"upto_gb", t.upto_gb}, {"price_per_gb", t.price_per_gb}};
}
void from_json(const json& j, StorageTier& t) {
  j.at("upto_gb").get_to(t.upto_gb);
  j.at("price_per_gb").get_to(t.price_per_gb);
}

void to_json(json& j, const CostParams& c) {
  j = json{{"storage_gb_period", c.storage_gb_period},
           {"migrate_gb", c.migrate_gb},
           {"serve_gb", c.serve_gb}};
  if (!c.tiers.empty()) j["tiers"] = c.tiers;
}
void from_json(const json& j, CostParams& c) {
  j.at("storage_gb_period").get_to(c.storage_gb_period);
  j.at("migrate_gb").get_to(c.migrate_gb);
  j.at("serve_gb").get_to(c.serve_gb);
  c.tiers.clear();
  if (j.contains("tiers")) j.at("tiers").get_to(c.tiers);
}

void to_json(json& j, const RawFeatures& f) {
  j = json{{"broadcaster_name", f.broadcaster_name},
           {"content_category", f.content_category},
           {"created_time", f.created_time},
           {"created_day", f.created_day},
           {"broadcaster_lat", f.broadcaster_lat},
           {"broadcaster_lon", f.broadcaster_lon}};
}
void from_json(const json& j, RawFeatures& f) {
  j.at("broadcaster_name").get_to(f.broadcaster_name);
  j.at("content_category").get_to(f.content_category);
  j.at("created_time").get_to(f.created_time);
  j.at("created_day").get_to(f.created_day);
  j.at("broadcaster_lat").get_to(f.broadcaster_lat);
  j.at("broadcaster_lon").get_to(f.broadcaster_lon);
}

void to_json(json& j, const DemandVector& d) { j = d.counts; }
void from_json(const json& j, DemandVector& d) { j.get_to(d.counts); }

void to_json(json& j, const VideoRecord& v) {
  j = json{{"video_id", v.video_id},
           {"broadcaster_region", v.broadcaster_region},
           {"start_period", v.start_period},
           {"duration_periods", v.duration_periods},
           {"size_gb", v.size_gb},
           {"features", v.features}};
  if (v.actual_viewers) j["actual_viewers"] = *v.actual_viewers;
}
void from_json(const json& j, VideoRecord& v) {
  j.at("video_id").get_to(v.video_id);
  j.at("broadcaster_region").get_to(v.broadcaster_region);
  j.at("start_period").get_to(v.start_period);
  j.at("duration_periods").get_to(v.duration_periods);
  j.at("size_gb").get_to(v.size_gb);
  j.at("features").get_to(v.features);
  v.actual_viewers.reset();
  if (j.contains("actual_viewers")) v.actual_viewers = j.at("actual_viewers").get<DemandVector>();
}

void to_json(json& j, const PlacementDecision& p) {
  json serve = json::array();
  for (const auto& [w, a] : p.serve) serve.push_back(json::array({w, a}));
  json alloc = json::array();
  for (std::uint8_t a : p.allocate) alloc.push_back(a != 0);
  j = json{{"allocate", std::move(alloc)}, {"serve", std::move(serve)}};
}
void from_json(const json& j, PlacementDecision& p) {
  p.allocate.clear();
  for (const json& a : j.at("allocate")) p.allocate.push_back(a.get<bool>() ? 1 : 0);
  p.serve.clear();
  for (const json& pair : j.at("serve")) {
    if (pair.size() != 2) throw ValidationError("serve entry must be a [viewer, server] pair");
    p.serve[pair.at(0).get<int>()] = pair.at(1).get<int>();
  }
}

void to_json(json& j, const PeriodMetrics& m) {
  j = json{{"period", m.period},
           {"arrivals", m.arrivals},
           {"infeasible", m.infeasible},
           {"storage_cost", m.storage_cost},
           {"migration_cost", m.migration_cost},
           {"serving_cost", m.serving_cost},
           {"network_cost", m.network_cost},
           {"continuing_storage_cost", m.continuing_storage_cost},
           {"hourly_total", m.hourly_total},
           {"hits_pct", m.hits_pct},
           {"avg_latency_predicted_ms", m.avg_latency_predicted_ms},
           {"avg_latency_actual_ms", m.avg_latency_actual_ms},
           {"su_continuing", m.su_continuing}};
}
void from_json(const json& j, PeriodMetrics& m) {
  j.at("period").get_to(m.period);
  j.at("arrivals").get_to(m.arrivals);
  j.at("infeasible").get_to(m.infeasible);
  j.at("storage_cost").get_to(m.storage_cost);
  j.at("migration_cost").get_to(m.migration_cost);
  j.at("serving_cost").get_to(m.serving_cost);
  j.at("network_cost").get_to(m.network_cost);
  j.at("continuing_storage_cost").get_to(m.continuing_storage_cost);
  j.at("hourly_total").get_to(m.hourly_total);
  j.at("hits_pct").get_to(m.hits_pct);
  j.at("avg_latency_predicted_ms").get_to(m.avg_latency_predicted_ms);
  j.at("avg_latency_actual_ms").get_to(m.avg_latency_actual_ms);
  j.at("su_continuing").get_to(m.su_continuing);
}

}  // namespace proalloc
