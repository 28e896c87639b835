#pragma once

#include "qrec/types.hpp"

namespace qrec {

/// Mass, inertia and rotor-geometry description of a quadrotor.
///
/// Frames follow the NED / forward-right-down convention: gravity is a
/// positive scalar acting along +z, rotor thrust acts along -z of the body.
/// Rotor thrust bounds are per-rotor; a failed rotor is expressed by
/// collapsing its bounds to [0, 0] (see apply_failure).
template <class Scalar>
struct VehicleParams {
	Scalar mass{Scalar(0.41)};  // kg
	Vec3<Scalar> inertia_diag{Scalar(1.45e-3), Scalar(1.26e-3), Scalar(2.52e-3)};  // kg m^2
	Scalar arm_length{Scalar(0.145)};            // m
	Scalar arm_angle{deg2rad(Scalar(52.6))};     // rad, rotor arm azimuth measured from x_B
	Scalar torque_thrust_ratio{Scalar(0.01)};    // sigma, m
	Vec4<Scalar> rotor_spin_signs{Scalar(1), Scalar(-1), Scalar(1), Scalar(-1)};
	Vec4<Scalar> u_min{Vec4<Scalar>::Zero()};    // N
	Vec4<Scalar> u_max{Vec4<Scalar>::Constant(Scalar(4.5))};  // N
	Scalar gravity{Scalar(9.81)};                // m/s^2, down-positive

	void validate() const
	{
		if (!(mass > Scalar(0))) throw std::invalid_argument("vehicle: mass must be > 0");
		if (!(inertia_diag.minCoeff() > Scalar(0)))
			throw std::invalid_argument("vehicle: inertia_diag must be > 0");
		if (!(arm_length > Scalar(0))) throw std::invalid_argument("vehicle: arm_length must be > 0");
		if (!(arm_angle > Scalar(0)) || !(arm_angle < deg2rad(Scalar(90))))
			throw std::invalid_argument("vehicle: arm_angle must lie in (0, 90) deg");
		for (int i = 0; i < 4; ++i) {
			const Scalar s = rotor_spin_signs[i];
			if (s != Scalar(1) && s != Scalar(-1))
				throw std::invalid_argument("vehicle: rotor_spin_signs must be +-1");
			if (!(Scalar(0) <= u_min[i] && u_min[i] <= u_max[i]))
				throw std::invalid_argument("vehicle: need 0 <= u_min <= u_max");
		}
		if (!(gravity > Scalar(0))) throw std::invalid_argument("vehicle: gravity must be > 0");
	}

	Mat3<Scalar> inertia() const { return inertia_diag.asDiagonal(); }
	Vec3<Scalar> gravity_vec() const { return Vec3<Scalar>(Scalar(0), Scalar(0), gravity); }
	Scalar hover_thrust_per_rotor() const { return mass * gravity / Scalar(4); }
};

/// Maps from rotor thrusts to body wrench components.
///
/// thrust_map is the single row producing the (signed, -z_B) collective
/// thrust; moment_map the 3x4 map onto body moments. moment_map_normalized
/// is diag(1/Ix, 1/Iy) times the roll/pitch rows, i.e. the input matrix of
/// the planar angular-rate dynamics used by the allocation constraint.
template <class Scalar>
struct EffectivenessModel {
	Eigen::Matrix<Scalar, 1, 4> thrust_map;       // G_t
	Mat34<Scalar> moment_map;                     // G_m
	Mat4<Scalar> combined;                        // [G_m; G_t]
	Mat24<Scalar> moment_map_normalized;          // G_m_hat
};

template <class Scalar>
struct BodyWrench {
	Vec3<Scalar> force;   // N, body frame
	Vec3<Scalar> moment;  // N m, body frame
};

/// Build the control-effectiveness matrices from the vehicle geometry.
///
/// Roll/pitch columns follow the fixed X-layout sign pattern; the yaw row
/// carries sigma with each rotor's spin sign.
template <class Scalar>
EffectivenessModel<Scalar> build_effectiveness(const VehicleParams<Scalar>& params)
{
	const Scalar kx = params.arm_length * std::sin(params.arm_angle);
	const Scalar ky = params.arm_length * std::cos(params.arm_angle);
	const Scalar sigma = params.torque_thrust_ratio;

	EffectivenessModel<Scalar> eff;
	eff.thrust_map = Eigen::Matrix<Scalar, 1, 4>::Constant(Scalar(-1));
	eff.moment_map.row(0) << kx, -kx, -kx, kx;
	eff.moment_map.row(1) << ky, ky, -ky, -ky;
	for (int i = 0; i < 4; ++i) eff.moment_map(2, i) = sigma * params.rotor_spin_signs[i];
	eff.combined.template topRows<3>() = eff.moment_map;
	eff.combined.row(3) = eff.thrust_map;
	eff.moment_map_normalized =
	    Vec2<Scalar>(Scalar(1) / params.inertia_diag.x(), Scalar(1) / params.inertia_diag.y())
	        .asDiagonal() *
	    eff.moment_map.template topRows<2>();
	return eff;
}

/// Body wrench produced by rotor thrusts u.
template <class Scalar>
BodyWrench<Scalar> rotor_wrench(const Vec4<Scalar>& u, const EffectivenessModel<Scalar>& eff)
{
	BodyWrench<Scalar> w;
	w.force = Vec3<Scalar>(Scalar(0), Scalar(0), eff.thrust_map * u);
	w.moment = eff.moment_map * u;
	return w;
}

/// Zero out the thrust range of one rotor (1-based index). Idempotent.
template <class Scalar>
VehicleParams<Scalar> apply_failure(const VehicleParams<Scalar>& params, int rotor_index)
{
	if (rotor_index < 1 || rotor_index > 4)
		throw std::invalid_argument("apply_failure: rotor index must be in 1..4");
	VehicleParams<Scalar> out = params;
	out.u_min[rotor_index - 1] = Scalar(0);
	out.u_max[rotor_index - 1] = Scalar(0);
	return out;
}

}  // namespace qrec
