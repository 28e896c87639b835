#pragma once

#include "qrec/harness/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qrec {

struct FlightRow {
	int index{0};
	std::uint64_t seed{0};
	FlightMetrics metrics;
	std::string error;  // empty on success; failed flights never abort a campaign
};

struct CampaignStats {
	int n_flights{0};
	int crash_count{0};
	double success_rate{0};
	double drop_p50{0};
	double drop_p95{0};
	double drop_max{0};
	std::optional<double> mean_recovery_time;
	std::uint64_t master_seed{0};
	std::vector<FlightRow> flights;
};

/// Run n independent flights of the scenario with per-flight seeds derived
/// from the master seed. Results are reduced in flight order, so the
/// statistics are byte-identical for any worker count.
CampaignStats run_campaign(const ScenarioConfig& base, int n_flights, std::uint64_t master_seed,
                           int parallelism);

}  // namespace qrec
