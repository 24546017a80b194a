#pragma once

#include "proalloc/domain.hpp"

// Mapping of raw coordinates to the nearest cloud region, plus synthesis of
// a plausible RTT matrix when no measured one is supplied. Measured matrices
// loaded from file take precedence over synthesis.

namespace proalloc {

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance in km.
double haversine_km(GeoPoint a, GeoPoint b);

// Region id minimizing haversine distance; ties broken by lowest id.
int nearest_region(GeoPoint p, const RegionSet& regions);

inline constexpr double kDefaultRttBaseMs = 8.8;    // closest-region serving latency
inline constexpr double kDefaultRttMsPerKm = 0.02;  // ~ fiber round trip

// d[i][j] = base_ms + ms_per_km * haversine(i, j); diagonal = base_ms.
RttMatrix synthesize_rtt(const RegionSet& regions, double base_ms = kDefaultRttBaseMs,
                         double ms_per_km = kDefaultRttMsPerKm);

}  // namespace proalloc
