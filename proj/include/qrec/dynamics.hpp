#pragma once

#include "qrec/types.hpp"
#include "qrec/vehicle.hpp"

namespace qrec {

/// Rigid-body state in NED coordinates. The attitude is carried as the full
/// body-to-inertial rotation matrix and re-orthonormalized after every
/// integration step.
template <class Scalar>
struct RigidState {
	Vec3<Scalar> position{Vec3<Scalar>::Zero()};   // m, inertial, z down
	Vec3<Scalar> velocity{Vec3<Scalar>::Zero()};   // m/s, inertial
	Mat3<Scalar> attitude{Mat3<Scalar>::Identity()};  // R, body -> inertial
	Vec3<Scalar> omega_body{Vec3<Scalar>::Zero()};  // rad/s
};

/// Simple disturbance terms added on top of the ideal rotor wrench:
/// diagonal linear drag on translation and rotation in body axes, and an
/// optional gyroscopic moment from spinning rotors. The angular term stands
/// in for the rotor/airframe drag torques that bound the post-failure yaw
/// spin-up; without it the unopposed reaction torque of the remaining
/// rotors accelerates yaw indefinitely and no relaxed-hover equilibrium
/// exists. Its z coefficient sets that equilibrium near 20 rad/s.
template <class Scalar>
struct DisturbanceModel {
	Vec3<Scalar> drag_coeff_linear{Scalar(0.1), Scalar(0.1), Scalar(0.15)};   // N s/m
	Vec3<Scalar> drag_coeff_angular{Scalar(1e-4), Scalar(1e-4), Scalar(2e-3)};  // N m s/rad
	Scalar rotor_inertia{Scalar(0)};  // kg m^2 per rotor
	bool drag_enabled{true};
	bool gyro_enabled{false};

	void validate() const
	{
		if (drag_coeff_linear.minCoeff() < Scalar(0) ||
		    drag_coeff_angular.minCoeff() < Scalar(0) || rotor_inertia < Scalar(0))
			throw std::invalid_argument("disturbance: coefficients must be >= 0");
	}

	static DisturbanceModel none()
	{
		DisturbanceModel d;
		d.drag_coeff_linear.setZero();
		d.drag_coeff_angular.setZero();
		d.drag_enabled = false;
		d.gyro_enabled = false;
		return d;
	}
};

template <class Scalar>
struct StateDerivative {
	Vec3<Scalar> dposition;
	Vec3<Scalar> dvelocity;
	Mat3<Scalar> dattitude;
	Vec3<Scalar> domega;
};

template <class Derived>
Mat3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& a)
{
	EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
	using Scalar = typename Derived::Scalar;
	Mat3<Scalar> s;
	s << Scalar(0), -a.z(), a.y(),
	     a.z(), Scalar(0), -a.x(),
	     -a.y(), a.x(), Scalar(0);
	return s;
}

/// Gyroscopic moment of the spinning rotors: J_r * sum_i(s_i * Omega_i)
/// about z_B crossed with the body rate.
template <class Scalar>
Vec3<Scalar> gyroscopic_moment(const Vec3<Scalar>& omega_body, const Vec4<Scalar>& rotor_speeds,
                               const VehicleParams<Scalar>& params,
                               const DisturbanceModel<Scalar>& dist)
{
	if (!dist.gyro_enabled || dist.rotor_inertia == Scalar(0)) return Vec3<Scalar>::Zero();
	const Scalar total = params.rotor_spin_signs.dot(rotor_speeds);
	return dist.rotor_inertia * total * Vec3<Scalar>::UnitZ().cross(omega_body);
}

/// Thrust coefficient such that hover thrust corresponds to 10,000 rpm,
/// used only to reconstruct rotor speeds for the gyroscopic term.
template <class Scalar>
Scalar hover_thrust_coefficient(const VehicleParams<Scalar>& params)
{
	const Scalar omega_hover = Scalar(10000) * Scalar(2) * static_cast<Scalar>(EIGEN_PI) / Scalar(60);
	return params.hover_thrust_per_rotor() / (omega_hover * omega_hover);
}

template <class Scalar>
Vec4<Scalar> rotor_speeds_from_thrust(const Vec4<Scalar>& u, const VehicleParams<Scalar>& params)
{
	const Scalar kf = hover_thrust_coefficient(params);
	return (u.cwiseMax(Scalar(0)) / kf).cwiseSqrt();
}

/// Continuous-time state derivative under rotor thrusts u.
template <class Scalar>
StateDerivative<Scalar> derivative(const RigidState<Scalar>& state, const Vec4<Scalar>& u,
                                   const VehicleParams<Scalar>& params,
                                   const DisturbanceModel<Scalar>& dist,
                                   const Vec4<Scalar>& rotor_speeds)
{
	const EffectivenessModel<Scalar> eff = build_effectiveness(params);
	return derivative(state, u, params, dist, rotor_speeds, eff);
}

template <class Scalar>
StateDerivative<Scalar> derivative(const RigidState<Scalar>& state, const Vec4<Scalar>& u,
                                   const VehicleParams<Scalar>& params,
                                   const DisturbanceModel<Scalar>& dist,
                                   const Vec4<Scalar>& rotor_speeds,
                                   const EffectivenessModel<Scalar>& eff)
{
	const BodyWrench<Scalar> rotor = rotor_wrench(u, eff);

	Vec3<Scalar> force_body = rotor.force;
	Vec3<Scalar> moment_body = rotor.moment;
	if (dist.drag_enabled) {
		const Vec3<Scalar> v_body = state.attitude.transpose() * state.velocity;
		force_body -= dist.drag_coeff_linear.cwiseProduct(v_body);
		moment_body -= dist.drag_coeff_angular.cwiseProduct(state.omega_body);
	}
	moment_body += gyroscopic_moment(state.omega_body, rotor_speeds, params, dist);

	const Vec3<Scalar> inertia_omega = params.inertia_diag.cwiseProduct(state.omega_body);

	StateDerivative<Scalar> d;
	d.dposition = state.velocity;
	d.dvelocity = params.gravity_vec() + state.attitude * force_body / params.mass;
	d.dattitude = state.attitude * skew(state.omega_body);
	d.domega = (moment_body - state.omega_body.cross(inertia_omega))
	               .cwiseQuotient(params.inertia_diag);
	return d;
}

/// Project a near-rotation matrix onto SO(3), returning the orthonormal
/// polar factor (Newton iteration, quadratic convergence from O(dt^2)
/// integration defects).
template <class Scalar>
Mat3<Scalar> orthonormalize_rotation(Mat3<Scalar> r)
{
	for (int iter = 0; iter < 8; ++iter) {
		const Mat3<Scalar> defect = r.transpose() * r - Mat3<Scalar>::Identity();
		if (defect.norm() < Scalar(1e-13)) break;
		r = Scalar(0.5) * (r + r.inverse().transpose());
	}
	return r;
}

/// One classical RK4 step with zero-order-hold thrusts, followed by
/// re-orthonormalization of the attitude.
template <class Scalar>
RigidState<Scalar> step(const RigidState<Scalar>& state, const Vec4<Scalar>& u,
                        const VehicleParams<Scalar>& params, const DisturbanceModel<Scalar>& dist,
                        const Vec4<Scalar>& rotor_speeds, Scalar dt)
{
	if (!(dt > Scalar(0))) throw std::invalid_argument("step: dt must be > 0");
	const EffectivenessModel<Scalar> eff = build_effectiveness(params);
	return step(state, u, params, dist, rotor_speeds, dt, eff);
}

template <class Scalar>
RigidState<Scalar> step(const RigidState<Scalar>& state, const Vec4<Scalar>& u,
                        const VehicleParams<Scalar>& params, const DisturbanceModel<Scalar>& dist,
                        const Vec4<Scalar>& rotor_speeds, Scalar dt,
                        const EffectivenessModel<Scalar>& eff)
{
	auto advance = [&](const RigidState<Scalar>& s, const StateDerivative<Scalar>& d, Scalar h) {
		RigidState<Scalar> out;
		out.position = s.position + h * d.dposition;
		out.velocity = s.velocity + h * d.dvelocity;
		out.attitude = s.attitude + h * d.dattitude;
		out.omega_body = s.omega_body + h * d.domega;
		return out;
	};

	const StateDerivative<Scalar> k1 = derivative(state, u, params, dist, rotor_speeds, eff);
	const StateDerivative<Scalar> k2 =
	    derivative(advance(state, k1, dt / Scalar(2)), u, params, dist, rotor_speeds, eff);
	const StateDerivative<Scalar> k3 =
	    derivative(advance(state, k2, dt / Scalar(2)), u, params, dist, rotor_speeds, eff);
	const StateDerivative<Scalar> k4 = derivative(advance(state, k3, dt), u, params, dist, rotor_speeds, eff);

	const Scalar w = dt / Scalar(6);
	RigidState<Scalar> out;
	out.position = state.position + w * (k1.dposition + Scalar(2) * k2.dposition +
	                                     Scalar(2) * k3.dposition + k4.dposition);
	out.velocity = state.velocity + w * (k1.dvelocity + Scalar(2) * k2.dvelocity +
	                                     Scalar(2) * k3.dvelocity + k4.dvelocity);
	out.attitude = state.attitude + w * (k1.dattitude + Scalar(2) * k2.dattitude +
	                                     Scalar(2) * k3.dattitude + k4.dattitude);
	out.omega_body = state.omega_body +
	                 w * (k1.domega + Scalar(2) * k2.domega + Scalar(2) * k3.domega + k4.domega);
	out.attitude = orthonormalize_rotation(out.attitude);
	return out;
}

}  // namespace qrec
