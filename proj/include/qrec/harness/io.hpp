#pragma once

#include "qrec/harness/campaign.hpp"
#include "qrec/harness/scenario.hpp"

#include <string>

namespace qrec {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// The fixed trajectory CSV column set.
extern const char* const kTrajectoryCsvHeader;

void export_trajectory(const TrajectoryRecord& traj, const std::string& path);
TrajectoryRecord import_trajectory(const std::string& path);

std::string stats_to_json(const CampaignStats& stats);
void export_stats(const CampaignStats& stats, const std::string& path);

}  // namespace qrec
