#pragma once

#include "qrec/allocator.hpp"
#include "qrec/controller.hpp"
#include "qrec/dynamics.hpp"
#include "qrec/harness/rng.hpp"
#include "qrec/vehicle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qrec {

using Vec3d = Vec3<double>;
using Vec4d = Vec4<double>;

/// Initial condition: either a fixed (thrust direction, body rate) pair or
/// the randomized distribution of the recovery campaign (Haar-uniform
/// attitude, componentwise-uniform body rates).
struct InitialStateSpec {
	bool randomize{true};
	Vec3d xi0{0, 0, -50};
	Vec3d v0{10, 0, 0};
	Vec3d n0{0, 0, -1};          // fixed-mode thrust axis
	Vec3d omega0{0, 0, 0};       // fixed-mode body rates
	Vec3d omega0_max{10, 10, 5}; // randomized-mode bounds
};

struct ScenarioConfig {
	VehicleParams<double> vehicle;
	DisturbanceModel<double> disturbance;
	ControlGains<double> gains;
	AllocatorConfig<double> allocator;

	double dt_dynamics{5e-4};
	double dt_control{2e-3};
	double duration{10};

	InitialStateSpec initial;
	Vec3d xi_ref{0, 0, -50};
	double failure_time{0};
	std::uint64_t rng_seed{1};
	bool position_loop{true};
	double actuator_tau{0};  // s, first-order thrust lag; 0 disables

	double recovery_angle{deg2rad(15.0)};  // rad
	double recovery_speed{2.0};            // m/s
	double recovery_hold{0.5};             // s

	void validate() const;
};

/// The fixed-initial-condition comparison scenario: thrust axis nearly
/// inverted, fast roll/pitch rates, rotor 4 out at t = 0, pure
/// attitude/velocity recovery (position feedback off).
ScenarioConfig case_study_config(AllocationMode mode);

/// The randomized recovery campaign scenario: forward flight at 10 m/s,
/// rotor 4 out at t = 0, altitude hold at the entry height.
ScenarioConfig monte_carlo_config(AllocationMode mode);

struct TrajectorySample {
	double t;
	Vec3d position;
	Vec3d velocity;
	Eigen::Quaterniond attitude;   // w >= 0 canonical form
	Vec3d omega_body;
	Vec4d u;
	double n_z;
	double omega_tilde;            // allocator's t_h-ahead prediction
	double slack;
	double thrust_des;
	double rho;
	Vec3d velocity_des;            // not exported; used by the recovery metric
};

struct TrajectoryRecord {
	std::vector<TrajectorySample> samples;
};

struct FlightMetrics {
	bool crashed{false};
	double max_height_drop{0};
	std::optional<double> recovery_time;
	std::optional<double> attitude_recovery_time;
	double final_position_error{0};
	double min_n_z{1};
};

RigidState<double> random_initial_state(Rng& rng, const InitialStateSpec& spec);

/// Build the state from a fixed spec: minimal rotation carrying straight-up
/// thrust onto n0.
RigidState<double> fixed_initial_state(const InitialStateSpec& spec);

FlightMetrics compute_metrics(const TrajectoryRecord& traj, const ScenarioConfig& cfg);

std::pair<TrajectoryRecord, FlightMetrics> run_scenario(const ScenarioConfig& cfg);

}  // namespace qrec
