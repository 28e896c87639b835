#include "qrec/harness/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qrec {

namespace {

double nearest_rank_percentile(const std::vector<double>& sorted, double p)
{
	const std::size_t n = sorted.size();
	const std::size_t rank = std::max<std::size_t>(
	    1, static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n))));
	return sorted[std::min(rank, n) - 1];
}

}  // namespace

CampaignStats run_campaign(const ScenarioConfig& base, int n_flights, std::uint64_t master_seed,
                           int parallelism)
{
	if (n_flights < 1) throw std::invalid_argument("run_campaign: n_flights must be >= 1");
	base.validate();

	std::vector<FlightRow> rows(n_flights);
	std::atomic<int> next{0};

	auto worker = [&]() {
		for (;;) {
			const int i = next.fetch_add(1);
			if (i >= n_flights) return;
			FlightRow& row = rows[i];
			row.index = i;
			row.seed = flight_seed(master_seed, static_cast<std::uint64_t>(i));
			ScenarioConfig cfg = base;
			cfg.rng_seed = row.seed;
			try {
				row.metrics = run_scenario(cfg).second;
			} catch (const std::exception& err) {
				row.error = err.what();
				row.metrics = FlightMetrics{};
				row.metrics.crashed = true;
			}
		}
	};

	const int workers = std::max(1, parallelism);
	if (workers == 1) {
		worker();
	} else {
		std::vector<std::thread> pool;
		pool.reserve(workers);
		for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
		for (std::thread& tr : pool) tr.join();
	}

	CampaignStats stats;
	stats.n_flights = n_flights;
	stats.master_seed = master_seed;
	stats.flights = std::move(rows);

	std::vector<double> drops;
	drops.reserve(n_flights);
	double recovery_sum = 0;
	int recovery_count = 0;
	for (const FlightRow& row : stats.flights) {
		if (row.metrics.crashed) ++stats.crash_count;
		drops.push_back(row.metrics.max_height_drop);
		if (row.metrics.recovery_time) {
			recovery_sum += *row.metrics.recovery_time;
			++recovery_count;
		}
	}
	std::sort(drops.begin(), drops.end());
	stats.success_rate = static_cast<double>(n_flights - stats.crash_count) / n_flights;
	stats.drop_p50 = nearest_rank_percentile(drops, 50);
	stats.drop_p95 = nearest_rank_percentile(drops, 95);
	stats.drop_max = drops.back();
	if (recovery_count > 0) stats.mean_recovery_time = recovery_sum / recovery_count;
	return stats;
}

}  // namespace qrec
