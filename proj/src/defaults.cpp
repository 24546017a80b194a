#include "proalloc/defaults.hpp"

#include <limits>

#include "proalloc/geo.hpp"

namespace proalloc {

namespace {

struct SiteSpec {
  const char* name;
  double lat, lon;
  double storage_monthly;  // $/GB/month, first tier
  double migrate;          // $/GB inter-site transfer out
  double serve;            // $/GB site-to-internet transfer
};

// Coordinates are the public city locations of the sites; prices follow the
// shape of public object-storage list prices (cheap US/EU, expensive South
// America, volume discounts after 50 TB and 500 TB).
constexpr SiteSpec kSites[] = {
    {"mumbai", 19.0760, 72.8777, 0.0250, 0.086, 0.1093},
    {"seoul", 37.5665, 126.9780, 0.0250, 0.080, 0.1260},
    {"singapore", 1.3521, 103.8198, 0.0250, 0.090, 0.1200},
    {"ningxia", 38.4872, 106.2309, 0.0280, 0.100, 0.1510},
    {"frankfurt", 50.1109, 8.6821, 0.0245, 0.020, 0.0900},
    {"paris", 48.8566, 2.3522, 0.0240, 0.020, 0.0900},
    {"sao_paulo", -23.5505, -46.6333, 0.0405, 0.138, 0.2500},
    {"ohio", 39.9612, -82.9988, 0.0230, 0.020, 0.0900},
    {"virginia", 39.0438, -77.4874, 0.0230, 0.020, 0.0900},
    {"california", 37.3382, -121.8863, 0.0260, 0.020, 0.0900},
};

constexpr double kTier1Gb = 50.0 * 1024.0;   // 50 TB
constexpr double kTier2Gb = 500.0 * 1024.0;  // 500 TB

}  // namespace

RegionSet default_region_set(bool with_synthesized_rtt) {
  RegionSet rs;
  int id = 0;
  for (const SiteSpec& s : kSites)
    rs.regions.push_back(Region{id++, s.name, s.lat, s.lon});
  if (with_synthesized_rtt) rs.rtt = synthesize_rtt(rs);
  rs.validate();
  return rs;
}

CostParams default_cost_params() {
  CostParams c;
  for (const SiteSpec& s : kSites) {
    const double hourly = s.storage_monthly * kMonthlyToHourly;
    c.storage_gb_period.push_back(hourly);
    c.migrate_gb.push_back(s.migrate);
    c.serve_gb.push_back(s.serve);
    c.tiers.push_back({
        StorageTier{kTier1Gb, hourly},
        StorageTier{kTier2Gb, (s.storage_monthly - 0.001) * kMonthlyToHourly},
        StorageTier{std::numeric_limits<double>::infinity(),
                    (s.storage_monthly - 0.002) * kMonthlyToHourly},
    });
  }
  c.validate();
  return c;
}

const std::vector<double>& default_thresholds() {
  static const std::vector<double> t{8.8, 60.0, 120.0, 171.0, 220.0, 371.0};
  return t;
}

}  // namespace proalloc
