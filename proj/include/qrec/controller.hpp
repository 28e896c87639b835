#pragma once

#include "qrec/dynamics.hpp"
#include "qrec/types.hpp"
#include "qrec/vehicle.hpp"

namespace qrec {

/// Gains of the cascaded P + PI outer loop and the reduced-attitude / rate
/// loops, plus the two incline-angle thresholds of the thrust scheduler.
template <class Scalar>
struct ControlGains {
	Vec3<Scalar> kp_pos{Scalar(1), Scalar(1), Scalar(15)};
	Vec3<Scalar> kp_vel{Scalar(2), Scalar(2), Scalar(25)};
	Vec3<Scalar> ki_vel{Scalar(1), Scalar(1), Scalar(5)};
	Scalar kp_att{Scalar(8)};
	Vec3<Scalar> kp_rate{Scalar(15), Scalar(15), Scalar(1)};
	Scalar theta1{deg2rad(Scalar(30))};
	Scalar theta2{deg2rad(Scalar(70))};
	Vec3<Scalar> integrator_limit{Scalar(5), Scalar(5), Scalar(5)};
	bool ff_enabled{false};

	void validate() const
	{
		if (kp_pos.minCoeff() <= Scalar(0) || kp_vel.minCoeff() <= Scalar(0) ||
		    ki_vel.minCoeff() <= Scalar(0) || kp_rate.minCoeff() <= Scalar(0) ||
		    kp_att <= Scalar(0))
			throw std::invalid_argument("gains: all gains must be > 0");
		if (!(Scalar(0) < theta1 && theta1 < theta2 && theta2 <= static_cast<Scalar>(EIGEN_PI)))
			throw std::invalid_argument("gains: need 0 < theta1 < theta2 <= pi");
		if (integrator_limit.minCoeff() < Scalar(0))
			throw std::invalid_argument("gains: integrator_limit must be >= 0");
	}
};

/// Mutable controller memory, threaded explicitly by the caller.
template <class Scalar>
struct OuterLoopState {
	Vec3<Scalar> velocity_error_integral{Vec3<Scalar>::Zero()};
	Vec3<Scalar> prev_omega_des{Vec3<Scalar>::Zero()};
	Vec3<Scalar> omega_des_rate_filtered{Vec3<Scalar>::Zero()};
	bool has_prev_omega_des{false};
};

template <class Scalar>
struct OuterLoopOutput {
	Vec3<Scalar> n_des;        // unit desired thrust direction, inertial
	Scalar thrust_des;         // N, >= 0
	Vec3<Scalar> accel_des;    // m/s^2, after the tilt-cone clamp
	Vec3<Scalar> velocity_des; // m/s
	Scalar theta;              // rad, incline of the current thrust axis
	Scalar beta_scale;         // thrust scheduling factor in [0, 1]
	bool accel_degenerate;     // vertical command was clamped to keep n_des defined
};

template <class Scalar>
struct AttitudeLoopOutput {
	Scalar rho;                // rad, angle from n_des to n
	Vec3<Scalar> n_c;          // unit rotation vector, inertial
	Vec3<Scalar> omega_des;    // rad/s, body
};

/// Direction of the collective thrust in the inertial frame (-z_B).
template <class Scalar>
Vec3<Scalar> thrust_axis(const RigidState<Scalar>& state)
{
	return (state.attitude * Vec3<Scalar>(Scalar(0), Scalar(0), Scalar(-1))).normalized();
}

/// Piecewise-linear thrust scheduling over the incline angle: 1 below
/// theta1, 0 above theta2.
template <class Scalar>
Scalar beta_scale(Scalar theta, Scalar theta1, Scalar theta2)
{
	const Scalar clamped = std::min(std::max(theta, theta1), theta2);
	return (theta2 - clamped) / (theta2 - theta1);
}

/// Shrink the horizontal acceleration until the commanded thrust direction
/// lies within the theta1 cone around straight up. The vertical component
/// is clamped to at most -0.1 m/s^2 first so the direction stays defined
/// when the raw command points downward or vanishes.
template <class Scalar>
Vec3<Scalar> accel_clamp(const Vec3<Scalar>& accel_des0, Scalar theta1, bool* degenerate = nullptr)
{
	const Scalar az_limit = Scalar(-0.1);
	Scalar az = accel_des0.z();
	const bool clamped = !(az < az_limit);
	if (clamped) az = az_limit;
	if (degenerate) *degenerate = clamped;

	const Scalar horiz = std::hypot(accel_des0.x(), accel_des0.y());
	const Scalar eps = std::max(horiz / (-az * std::tan(theta1)), Scalar(1));
	return Vec3<Scalar>(accel_des0.x() / eps, accel_des0.y() / eps, az);
}

/// Position/velocity outer loop: produces the desired thrust direction and
/// scheduled thrust magnitude, and advances the velocity-error integral.
template <class Scalar>
std::pair<OuterLoopOutput<Scalar>, OuterLoopState<Scalar>> outer_loop(
    const RigidState<Scalar>& state, const Vec3<Scalar>& xi_ref, const ControlGains<Scalar>& gains,
    const VehicleParams<Scalar>& params, OuterLoopState<Scalar> os, Scalar dt_control,
    bool position_loop_enabled = true)
{
	const Vec3<Scalar> v_des = position_loop_enabled
	                               ? Vec3<Scalar>(gains.kp_pos.cwiseProduct(xi_ref - state.position))
	                               : Vec3<Scalar>::Zero();
	const Vec3<Scalar> v_err = v_des - state.velocity;

	os.velocity_error_integral += v_err * dt_control;
	os.velocity_error_integral =
	    os.velocity_error_integral.cwiseMax(-gains.integrator_limit).cwiseMin(gains.integrator_limit);

	const Vec3<Scalar> accel_des0 = gains.kp_vel.cwiseProduct(v_err) +
	                                gains.ki_vel.cwiseProduct(os.velocity_error_integral) -
	                                params.gravity_vec();

	OuterLoopOutput<Scalar> out;
	out.velocity_des = v_des;
	out.accel_des = accel_clamp(accel_des0, gains.theta1, &out.accel_degenerate);
	out.n_des = out.accel_des.normalized();

	const Vec3<Scalar> n = thrust_axis(state);
	out.theta = safe_acos(-n.z());
	out.beta_scale = beta_scale(out.theta, gains.theta1, gains.theta2);
	out.thrust_des = -out.beta_scale * params.mass * out.accel_des.z() /
	                 std::cos(std::min(out.theta, gains.theta1));
	return {out, os};
}

/// Outer-loop replacement for pure attitude-recovery tasks: hold a fixed
/// desired thrust direction and command the scheduled hover thrust, with no
/// position or velocity feedback.
template <class Scalar>
OuterLoopOutput<Scalar> direction_hold_outer(const RigidState<Scalar>& state,
                                             const Vec3<Scalar>& n_des_fixed,
                                             const ControlGains<Scalar>& gains,
                                             const VehicleParams<Scalar>& params)
{
	OuterLoopOutput<Scalar> out;
	out.velocity_des = Vec3<Scalar>::Zero();
	out.accel_des = -params.gravity_vec();
	out.n_des = n_des_fixed.normalized();
	out.accel_degenerate = false;

	const Vec3<Scalar> n = thrust_axis(state);
	out.theta = safe_acos(-n.z());
	out.beta_scale = beta_scale(out.theta, gains.theta1, gains.theta2);
	out.thrust_des = out.beta_scale * params.mass * params.gravity /
	                 std::cos(std::min(out.theta, gains.theta1));
	return out;
}

/// Reduced-attitude loop: rotation angle rho from n_des to n, the rotation
/// vector n_c perpendicular to both, and the body rate command about it.
/// At the rho = 0 / rho = pi singularities n_c falls back to a fixed rule:
/// project x_B onto the plane normal to n, or y_B if that degenerates.
template <class Scalar>
AttitudeLoopOutput<Scalar> reduced_attitude_loop(const RigidState<Scalar>& state,
                                                 const Vec3<Scalar>& n_des,
                                                 const ControlGains<Scalar>& gains)
{
	const Vec3<Scalar> n = thrust_axis(state);

	AttitudeLoopOutput<Scalar> out;
	out.rho = safe_acos(n_des.dot(n));

	const Scalar sin_rho = std::sin(out.rho);
	if (sin_rho < Scalar(1e-6)) {
		Vec3<Scalar> candidate = state.attitude.col(0);
		candidate -= candidate.dot(n) * n;
		if (candidate.norm() < Scalar(1e-9)) {
			candidate = state.attitude.col(1);
			candidate -= candidate.dot(n) * n;
		}
		out.n_c = candidate.normalized();
	} else {
		out.n_c = n.cross(n_des) / sin_rho;
	}

	out.omega_des = gains.kp_att * out.rho * (state.attitude.transpose() * out.n_c);
	return out;
}

/// Rate loop: proportional body-rate tracking plus an optional filtered
/// backward-difference feed-forward of omega_des (20 Hz first-order filter).
template <class Scalar>
std::pair<Vec3<Scalar>, OuterLoopState<Scalar>> rate_loop(const Vec3<Scalar>& omega_des,
                                                          const Vec3<Scalar>& omega_body,
                                                          const ControlGains<Scalar>& gains,
                                                          OuterLoopState<Scalar> os,
                                                          Scalar dt_control)
{
	Vec3<Scalar> ff = Vec3<Scalar>::Zero();
	if (gains.ff_enabled) {
		if (os.has_prev_omega_des) {
			const Vec3<Scalar> raw = (omega_des - os.prev_omega_des) / dt_control;
			const Scalar tau = Scalar(1) / (Scalar(2) * static_cast<Scalar>(EIGEN_PI) * Scalar(20));
			const Scalar alpha = dt_control / (tau + dt_control);
			os.omega_des_rate_filtered += alpha * (raw - os.omega_des_rate_filtered);
		}
		ff = os.omega_des_rate_filtered;
	}
	os.prev_omega_des = omega_des;
	os.has_prev_omega_des = true;

	const Vec3<Scalar> alpha_des = gains.kp_rate.cwiseProduct(omega_des - omega_body) + ff;
	return {alpha_des, os};
}

}  // namespace qrec
