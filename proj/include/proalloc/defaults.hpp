#pragma once

#include "proalloc/domain.hpp"

// Built-in configuration: the ten-region site universe, public-cloud-like
// price tables and the default latency threshold sweep. Everything here can
// be overridden from JSON config files; CLI flag > config file > built-in.

namespace proalloc {

// Ten cloud regions with public city coordinates, ids in listing order.
// RTT is synthesized (geo::synthesize_rtt defaults) unless a measured
// matrix is supplied.
RegionSet default_region_set(bool with_synthesized_rtt = true);

// Flat per-region prices, $/GB. Storage is prorated from monthly list
// prices to an hourly rate (1/730). Tier ladders (volume discounts) are
// carried at the same proration and used only for reporting.
CostParams default_cost_params();

inline constexpr double kMonthlyToHourly = 1.0 / 730.0;

inline constexpr int kDefaultPeriods = 24;

// Latency threshold sweep, ms.
const std::vector<double>& default_thresholds();

}  // namespace proalloc
