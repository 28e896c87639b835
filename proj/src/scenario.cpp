#include "qrec/harness/scenario.hpp"

#include <cmath>
#include <sstream>

namespace qrec {

void ScenarioConfig::validate() const
{
	vehicle.validate();
	disturbance.validate();
	gains.validate();
	allocator.validate();
	if (!(dt_dynamics > 0) || !(dt_control > 0) || !(duration > 0))
		throw std::invalid_argument("scenario: time steps and duration must be > 0");
	if (dt_control + 1e-12 < dt_dynamics)
		throw std::invalid_argument("scenario: dt_control must be >= dt_dynamics");
	if (failure_time < 0) throw std::invalid_argument("scenario: failure_time must be >= 0");
	if (actuator_tau < 0) throw std::invalid_argument("scenario: actuator_tau must be >= 0");
	if (!(recovery_hold > 0) || !(recovery_angle > 0) || !(recovery_speed > 0))
		throw std::invalid_argument("scenario: recovery thresholds must be > 0");
}

ScenarioConfig case_study_config(AllocationMode mode)
{
	ScenarioConfig cfg;
	cfg.allocator.mode = mode;
	cfg.allocator.failed_rotor = 4;
	cfg.failure_time = 0;
	cfg.duration = 5;
	cfg.position_loop = false;
	cfg.initial.randomize = false;
	cfg.initial.xi0 = Vec3d(0, 0, -50);
	cfg.initial.v0 = Vec3d::Zero();
	cfg.initial.n0 = Vec3d(-0.2, 0.2, 0.98).normalized();
	cfg.initial.omega0 = Vec3d(-15, 15, 0);
	cfg.xi_ref = cfg.initial.xi0;
	return cfg;
}

ScenarioConfig monte_carlo_config(AllocationMode mode)
{
	ScenarioConfig cfg;
	cfg.allocator.mode = mode;
	cfg.allocator.failed_rotor = 4;
	cfg.failure_time = 0;
	cfg.duration = 10;
	cfg.position_loop = true;
	cfg.initial.randomize = true;
	cfg.xi_ref = Vec3d(0, 0, -50);
	return cfg;
}

RigidState<double> fixed_initial_state(const InitialStateSpec& spec)
{
	RigidState<double> state;
	state.position = spec.xi0;
	state.velocity = spec.v0;
	state.omega_body = spec.omega0;

	const Vec3d up(0, 0, -1);
	const Vec3d n = spec.n0.normalized();
	const Vec3d axis = up.cross(n);
	const double s = axis.norm();
	const double c = up.dot(n);
	if (s < 1e-12) {
		state.attitude = c > 0 ? Mat3<double>::Identity()
		                       : Eigen::AngleAxisd(EIGEN_PI, Vec3d::UnitX()).toRotationMatrix();
	} else {
		state.attitude = Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
	}
	return state;
}

RigidState<double> random_initial_state(Rng& rng, const InitialStateSpec& spec)
{
	RigidState<double> state;
	state.position = spec.xi0;
	state.velocity = spec.v0;
	state.attitude = random_rotation(rng);
	for (int i = 0; i < 3; ++i)
		state.omega_body[i] = rng.uniform(-spec.omega0_max[i], spec.omega0_max[i]);
	return state;
}

namespace {

Eigen::Quaterniond canonical_quaternion(const Mat3<double>& r)
{
	Eigen::Quaterniond q(r);
	q.normalize();
	if (q.w() < 0 || (q.w() == 0 && (q.x() < 0 || (q.x() == 0 && (q.y() < 0 || (q.y() == 0 && q.z() < 0))))))
		q.coeffs() = -q.coeffs();
	return q;
}

}  // namespace

std::pair<TrajectoryRecord, FlightMetrics> run_scenario(const ScenarioConfig& cfg)
{
	cfg.validate();

	const VehicleParams<double>& healthy = cfg.vehicle;
	const bool has_failure = cfg.allocator.failed_rotor > 0;
	const VehicleParams<double> failed =
	    has_failure ? apply_failure(healthy, cfg.allocator.failed_rotor) : healthy;
	const EffectivenessModel<double> eff = build_effectiveness(healthy);
	RowVec2<double> phi = RowVec2<double>::Zero();
	if (has_failure) phi = unrecoverable_axis(failed, eff);

	Rng rng(cfg.rng_seed);
	RigidState<double> state =
	    cfg.initial.randomize ? random_initial_state(rng, cfg.initial) : fixed_initial_state(cfg.initial);

	const int substeps = static_cast<int>(std::lround(cfg.dt_control / cfg.dt_dynamics));
	const int n_control = static_cast<int>(std::lround(cfg.duration / cfg.dt_control));

	OuterLoopState<double> ctl_state;
	QpResult<double> warm;
	Vec4d u_applied = Vec4d::Zero();
	bool lag_primed = false;

	TrajectoryRecord record;
	record.samples.reserve(n_control + 1);
	bool crashed = false;

	AllocationResult<double> alloc;
	OuterLoopOutput<double> outer;
	AttitudeLoopOutput<double> att;

	auto push_sample = [&](double t) {
		TrajectorySample s;
		s.t = t;
		s.position = state.position;
		s.velocity = state.velocity;
		s.attitude = canonical_quaternion(state.attitude);
		s.omega_body = state.omega_body;
		s.u = alloc.u;
		s.n_z = thrust_axis(state).z();
		s.omega_tilde = alloc.predicted_omega_tilde;
		s.slack = alloc.slack;
		s.thrust_des = outer.thrust_des;
		s.rho = att.rho;
		s.velocity_des = outer.velocity_des;
		record.samples.push_back(s);
	};

	double t_now = 0;
	try {
		for (int k = 0; k < n_control && !crashed; ++k) {
			const double t = k * cfg.dt_control;
			t_now = t;
			const bool failed_now = has_failure && t >= cfg.failure_time - 1e-12;
			const VehicleParams<double>& params_now = failed_now ? failed : healthy;

			std::tie(outer, ctl_state) = outer_loop(state, cfg.xi_ref, cfg.gains, params_now,
			                                        ctl_state, cfg.dt_control, cfg.position_loop);
			att = reduced_attitude_loop(state, outer.n_des, cfg.gains);
			Vec3d alpha_des;
			std::tie(alpha_des, ctl_state) =
			    rate_loop(att.omega_des, state.omega_body, cfg.gains, ctl_state, cfg.dt_control);
			const DesiredWrench<double> wrench =
			    desired_wrench(alpha_des, outer.thrust_des, state.omega_body, params_now);

			if (failed_now && cfg.allocator.mode == AllocationMode::P2)
				alloc = allocate_p2(wrench, state.omega_body, eff, params_now, cfg.allocator, phi,
				                    &warm);
			else
				alloc = allocate_p1(wrench, eff, params_now, cfg.allocator, &state.omega_body,
				                    failed_now ? &phi : nullptr, &warm);

			push_sample(t);

			for (int sub = 0; sub < substeps && !crashed; ++sub) {
				if (cfg.actuator_tau > 0 && lag_primed) {
					const double decay = std::exp(-cfg.dt_dynamics / cfg.actuator_tau);
					u_applied = alloc.u + decay * (u_applied - alloc.u);
				} else {
					u_applied = alloc.u;
					lag_primed = true;
				}
				const Vec4d rotor_speeds = cfg.disturbance.gyro_enabled
				                               ? rotor_speeds_from_thrust(u_applied, params_now)
				                               : Vec4d::Zero();
				state = step(state, u_applied, params_now, cfg.disturbance, rotor_speeds,
				             cfg.dt_dynamics, eff);
				t_now = t + (sub + 1) * cfg.dt_dynamics;
				if (state.position.z() >= 0) crashed = true;
			}
		}
	} catch (const std::exception& err) {
		std::ostringstream msg;
		msg << "scenario failed at t=" << t_now << " s: " << err.what();
		throw std::runtime_error(msg.str());
	}

	push_sample(t_now);

	FlightMetrics metrics = compute_metrics(record, cfg);
	return {std::move(record), metrics};
}

FlightMetrics compute_metrics(const TrajectoryRecord& traj, const ScenarioConfig& cfg)
{
	if (traj.samples.empty()) throw std::invalid_argument("compute_metrics: empty trajectory");

	FlightMetrics m;
	const double z0 = traj.samples.front().position.z();
	double max_z = z0;
	for (const TrajectorySample& s : traj.samples) {
		max_z = std::max(max_z, s.position.z());
		m.min_n_z = std::min(m.min_n_z, s.n_z);
		if (s.position.z() >= 0) m.crashed = true;
	}
	m.max_height_drop = std::max(0.0, max_z - z0);
	m.final_position_error = (traj.samples.back().position - cfg.xi_ref).norm();

	// First post-failure instant from which the compliance window holds for
	// recovery_hold seconds without interruption.
	const std::size_t n = traj.samples.size();
	auto first_sustained = [&](auto&& compliant) -> std::optional<double> {
		std::size_t window_start = 0;
		bool in_window = false;
		for (std::size_t i = 0; i < n; ++i) {
			const TrajectorySample& s = traj.samples[i];
			if (s.t < cfg.failure_time || !compliant(s)) {
				in_window = false;
				continue;
			}
			if (!in_window) {
				window_start = i;
				in_window = true;
			}
			if (s.t - traj.samples[window_start].t >= cfg.recovery_hold)
				return traj.samples[window_start].t;
		}
		return std::nullopt;
	};

	m.attitude_recovery_time =
	    first_sustained([&](const TrajectorySample& s) { return s.rho < cfg.recovery_angle; });
	m.recovery_time = first_sustained([&](const TrajectorySample& s) {
		return s.rho < cfg.recovery_angle &&
		       (s.velocity - s.velocity_des).norm() < cfg.recovery_speed;
	});
	return m;
}

}  // namespace qrec
