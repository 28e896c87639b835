#include "qrec/harness/campaign.hpp"
#include "qrec/harness/config.hpp"
#include "qrec/harness/io.hpp"
#include "qrec/harness/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace qrec;

ScenarioConfig load_scenario(const std::string& config_path, AllocationMode default_mode)
{
	ScenarioConfig base = monte_carlo_config(default_mode);
	if (config_path.empty()) return base;
	return apply_config(Config::from_file(config_path), base);
}

void print_metrics(const FlightMetrics& m)
{
	std::cout << "crashed: " << (m.crashed ? "yes" : "no") << "\n"
	          << "max_height_drop: " << format_double(m.max_height_drop) << " m\n"
	          << "recovery_time: "
	          << (m.recovery_time ? format_double(*m.recovery_time) + " s" : "none") << "\n"
	          << "attitude_recovery_time: "
	          << (m.attitude_recovery_time ? format_double(*m.attitude_recovery_time) + " s" : "none")
	          << "\n"
	          << "final_position_error: " << format_double(m.final_position_error) << " m\n"
	          << "min_n_z: " << format_double(m.min_n_z) << "\n";
}

void print_polygon(const std::vector<Vec2<double>>& hull)
{
	for (const Vec2<double>& v : hull)
		std::cout << format_double(v.x()) << " " << format_double(v.y()) << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Quadrotor single-rotor-failure upset recovery simulator"};
	app.require_subcommand(1);

	std::string config_path;
	std::string out_path;
	std::string allocator_name;
	int n_flights = 200;
	std::uint64_t seed = 1;
	int jobs = 1;

	CLI::App* run = app.add_subcommand("run", "Simulate one flight and export the trajectory CSV");
	run->add_option("--config", config_path, "Configuration file");
	run->add_option("--out", out_path, "Trajectory CSV path")->required();

	CLI::App* campaign = app.add_subcommand("campaign", "Run a recovery campaign and export JSON stats");
	campaign->add_option("--config", config_path, "Configuration file");
	campaign->add_option("--n", n_flights, "Number of flights");
	campaign->add_option("--seed", seed, "Master seed");
	campaign->add_option("--allocator", allocator_name, "Allocation mode: p1 or p2");
	campaign->add_option("--jobs", jobs, "Worker threads");
	campaign->add_option("--out", out_path, "Stats JSON path")->required();

	CLI::App* ams = app.add_subcommand("ams", "Print attainable-moment-set projection vertices");
	ams->add_option("--config", config_path, "Configuration file");

	CLI::App* case_study = app.add_subcommand("case-study", "Run the fixed upset-recovery comparison case");
	case_study->add_option("--allocator", allocator_name, "Allocation mode: p1 or p2")->required();
	case_study->add_option("--out", out_path, "Optional trajectory CSV path");

	CLI11_PARSE(app, argc, argv);

	try {
		auto parse_mode = [&](AllocationMode fallback) {
			if (allocator_name.empty()) return fallback;
			if (allocator_name == "p1" || allocator_name == "P1") return AllocationMode::P1;
			if (allocator_name == "p2" || allocator_name == "P2") return AllocationMode::P2;
			throw std::runtime_error("--allocator must be p1 or p2");
		};

		if (run->parsed()) {
			const ScenarioConfig cfg = load_scenario(config_path, AllocationMode::P2);
			const auto [traj, metrics] = run_scenario(cfg);
			export_trajectory(traj, out_path);
			print_metrics(metrics);
		} else if (campaign->parsed()) {
			ScenarioConfig cfg = load_scenario(config_path, AllocationMode::P2);
			cfg.allocator.mode = parse_mode(cfg.allocator.mode);
			const CampaignStats stats = run_campaign(cfg, n_flights, seed, jobs);
			export_stats(stats, out_path);
			std::cout << "flights: " << stats.n_flights << "\n"
			          << "crashes: " << stats.crash_count << "\n"
			          << "drop_p50: " << format_double(stats.drop_p50) << " m\n"
			          << "drop_p95: " << format_double(stats.drop_p95) << " m\n";
		} else if (ams->parsed()) {
			const ScenarioConfig cfg = load_scenario(config_path, AllocationMode::P2);
			const EffectivenessModel<double> eff = build_effectiveness(cfg.vehicle);
			std::cout << "# healthy\n";
			print_polygon(ams_projection(cfg.vehicle, eff));
			if (cfg.allocator.failed_rotor > 0) {
				const VehicleParams<double> failed =
				    apply_failure(cfg.vehicle, cfg.allocator.failed_rotor);
				std::cout << "# rotor " << cfg.allocator.failed_rotor << " failed\n";
				print_polygon(ams_projection(failed, eff));
				const RowVec2<double> phi = unrecoverable_axis(failed, eff);
				std::cout << "# unrecoverable axis\n"
				          << format_double(phi[0]) << " " << format_double(phi[1]) << "\n";
			}
		} else if (case_study->parsed()) {
			const ScenarioConfig cfg = case_study_config(parse_mode(AllocationMode::P2));
			const auto [traj, metrics] = run_scenario(cfg);
			if (!out_path.empty()) export_trajectory(traj, out_path);
			std::cout << "initial_omega_tilde: " << format_double(traj.samples.front().omega_tilde)
			          << " rad/s\n";
			print_metrics(metrics);
		}
	} catch (const std::exception& err) {
		std::cerr << "error: " << err.what() << "\n";
		return 1;
	}
	return 0;
}
