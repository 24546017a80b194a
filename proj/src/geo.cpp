#include "proalloc/geo.hpp"

#include <cmath>

namespace proalloc {

namespace {
inline double deg2rad(double deg) { return deg * M_PI / 180.0; }
}  // namespace

double haversine_km(GeoPoint a, GeoPoint b) {
  const double lat1 = deg2rad(a.latitude);
  const double lat2 = deg2rad(b.latitude);
  const double dlat = lat1 - lat2;
  const double dlon = deg2rad(a.longitude) - deg2rad(b.longitude);
  const double h = std::pow(std::sin(dlat / 2.0), 2) +
                   std::cos(lat1) * std::cos(lat2) * std::pow(std::sin(dlon / 2.0), 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

int nearest_region(GeoPoint p, const RegionSet& regions) {
  if (regions.regions.empty()) throw ValidationError("nearest_region on empty region set");
  int best = 0;
  double best_km = std::numeric_limits<double>::infinity();
  for (const Region& r : regions.regions) {
    const double km = haversine_km(p, GeoPoint{r.latitude, r.longitude});
    if (km < best_km) {  // strict: equidistant keeps the lower id
      best_km = km;
      best = r.id;
    }
  }
  return best;
}

RttMatrix synthesize_rtt(const RegionSet& regions, double base_ms, double ms_per_km) {
  if (!(base_ms > 0.0)) throw ValidationError("rtt base must be > 0");
  const int n = regions.size();
  RttMatrix m(n, 0.0);
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = base_ms;
    const GeoPoint pi{regions.regions[i].latitude, regions.regions[i].longitude};
    for (int j = i + 1; j < n; ++j) {
      const GeoPoint pj{regions.regions[j].latitude, regions.regions[j].longitude};
      const double ms = base_ms + ms_per_km * haversine_km(pi, pj);
      m.at(i, j) = ms;
      m.at(j, i) = ms;  // mirror, exact symmetry
    }
  }
  return m;
}

}  // namespace proalloc
