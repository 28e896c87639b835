#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qrec/dynamics.hpp"
#include "qrec/harness/rng.hpp"

using namespace qrec;

namespace {

const VehicleParams<double> kParams;
const Vec4<double> kNoSpeeds = Vec4<double>::Zero();
const Vec4<double> kZeroU = Vec4<double>::Zero();

RigidState<double> tumbling_state()
{
	RigidState<double> s;
	s.omega_body = Vec3<double>(3.0, -2.0, 1.0);
	return s;
}

double state_distance(const RigidState<double>& a, const RigidState<double>& b)
{
	return (a.position - b.position).norm() + (a.velocity - b.velocity).norm() +
	       (a.attitude - b.attitude).norm() + (a.omega_body - b.omega_body).norm();
}

}  // namespace

TEST_CASE("skew matrix reproduces the cross product")
{
	CHECK(skew(Vec3<double>::Zero()).norm() == 0.0);

	const Vec3<double> ex(1, 0, 0), ey(0, 1, 0);
	CHECK(((skew(ex) * ey) - Vec3<double>(0, 0, 1)).norm() == 0.0);

	Rng rng(7);
	for (int i = 0; i < 100; ++i) {
		Vec3<double> a, b;
		for (int k = 0; k < 3; ++k) {
			a[k] = rng.uniform(-5, 5);
			b[k] = rng.uniform(-5, 5);
		}
		CHECK((skew(a) * b - oracle::cross_product(a, b)).norm() <= 1e-14);
		CHECK((skew(a) + skew(a).transpose()).norm() == 0.0);
	}
}

TEST_CASE("derivative at hover, free fall and principal-axis spin")
{
	const DisturbanceModel<double> none = DisturbanceModel<double>::none();

	RigidState<double> hover;
	const Vec4<double> u_hover = Vec4<double>::Constant(kParams.hover_thrust_per_rotor());
	const StateDerivative<double> at_hover = derivative(hover, u_hover, kParams, none, kNoSpeeds);
	CHECK(at_hover.dvelocity.norm() <= 1e-12);
	CHECK(at_hover.domega.norm() == 0.0);
	CHECK(at_hover.dposition.norm() == 0.0);

	const StateDerivative<double> falling =
	    derivative(hover, kZeroU, kParams, none, kNoSpeeds);
	CHECK((falling.dvelocity - Vec3<double>(0, 0, 9.81)).norm() == 0.0);

	RigidState<double> spinning;
	spinning.omega_body = Vec3<double>(0, 0, 10);
	const StateDerivative<double> spin =
	    derivative(spinning, kZeroU, kParams, none, kNoSpeeds);
	CHECK(spin.domega.norm() == 0.0);
	CHECK((spin.dattitude - spinning.attitude * skew(spinning.omega_body)).norm() == 0.0);
}

TEST_CASE("gyroscopic moment model")
{
	DisturbanceModel<double> dist = DisturbanceModel<double>::none();
	const Vec4<double> speeds = Vec4<double>::Constant(1000.0);

	CHECK(gyroscopic_moment(Vec3<double>(1, 2, 3), speeds, kParams, dist).norm() == 0.0);

	dist.gyro_enabled = true;
	dist.rotor_inertia = 1e-6;
	CHECK(gyroscopic_moment(Vec3<double>(0, 0, 7), speeds, kParams, dist).norm() == 0.0);

	Rng rng(11);
	for (int i = 0; i < 50; ++i) {
		Vec3<double> omega;
		Vec4<double> rotor_speeds;
		for (int k = 0; k < 3; ++k) omega[k] = rng.uniform(-20, 20);
		for (int k = 0; k < 4; ++k) rotor_speeds[k] = rng.uniform(0, 2000);
		const double total = kParams.rotor_spin_signs.dot(rotor_speeds);
		const Vec3<double> expected =
		    dist.rotor_inertia * total *
		    oracle::cross_product(Vec3<double>(0, 0, 1), omega);
		CHECK((gyroscopic_moment(omega, rotor_speeds, kParams, dist) - expected).norm() <= 1e-12);
	}
}

TEST_CASE("hover equilibrium is a fixed point of the integrator")
{
	const DisturbanceModel<double> none = DisturbanceModel<double>::none();
	const Vec4<double> u_hover = Vec4<double>::Constant(kParams.hover_thrust_per_rotor());
	RigidState<double> s;
	for (int i = 0; i < 2000; ++i) s = step(s, u_hover, kParams, none, kNoSpeeds, 5e-4);
	CHECK(s.position.norm() <= 1e-12);
	CHECK(s.velocity.norm() <= 1e-11);
	CHECK((s.attitude - Mat3<double>::Identity()).norm() <= 1e-12);
}

TEST_CASE("one second of free fall matches the ballistic solution")
{
	const DisturbanceModel<double> none = DisturbanceModel<double>::none();
	RigidState<double> s;
	for (int i = 0; i < 1000; ++i) s = step(s, kZeroU, kParams, none, kNoSpeeds, 1e-3);
	CHECK(s.velocity.z() == doctest::Approx(9.81).epsilon(1e-10));
	CHECK(s.position.z() == doctest::Approx(4.905).epsilon(1e-7));

	// Energy consistency: kinetic-energy gain equals m g dz.
	const double kinetic = 0.5 * kParams.mass * s.velocity.squaredNorm();
	const double potential = kParams.mass * 9.81 * s.position.z();
	CHECK(std::abs(kinetic - potential) <= 1e-8 * potential);
}

TEST_CASE("torque-free tumble conserves angular momentum and orthonormality")
{
	const DisturbanceModel<double> none = DisturbanceModel<double>::none();
	RigidState<double> s;
	s.omega_body = Vec3<double>(10, -4, 6);
	const Vec3<double> l0 = s.attitude * kParams.inertia_diag.cwiseProduct(s.omega_body);
	for (int i = 0; i < 1000; ++i) s = step(s, kZeroU, kParams, none, kNoSpeeds, 1e-3);
	const Vec3<double> l1 = s.attitude * kParams.inertia_diag.cwiseProduct(s.omega_body);
	CHECK((l1 - l0).norm() <= 1e-6 * l0.norm());
	CHECK((s.attitude.transpose() * s.attitude - Mat3<double>::Identity()).norm() <= 1e-9);
	CHECK(s.attitude.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("step converges at fourth order")
{
	const DisturbanceModel<double> none = DisturbanceModel<double>::none();
	const Vec4<double> u(0.9, 1.1, 1.0, 1.05);  // mild thrust asymmetry for a smooth curved path
	auto integrate = [&](double dt) {
		RigidState<double> s = tumbling_state();
		const int steps = static_cast<int>(std::llround(0.5 / dt));
		for (int i = 0; i < steps; ++i) s = step(s, u, kParams, none, kNoSpeeds, dt);
		return s;
	};

	const RigidState<double> reference = integrate(4e-5);
	const double e1 = state_distance(integrate(4e-3), reference);
	const double e2 = state_distance(integrate(2e-3), reference);
	const double order = std::log2(e1 / e2);
	CHECK(order >= 3.9);
	CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("drag decelerates translation in body axes")
{
	DisturbanceModel<double> dist;  // defaults: drag on
	RigidState<double> s;
	s.velocity = Vec3<double>(10, 0, 0);
	const StateDerivative<double> d =
	    derivative(s, kZeroU, kParams, dist, kNoSpeeds);
	CHECK(d.dvelocity.x() == doctest::Approx(-0.1 * 10 / kParams.mass).epsilon(1e-12));
}

TEST_CASE("orthonormalization repairs a perturbed rotation")
{
	Rng rng(3);
	Mat3<double> r = Mat3<double>::Identity();
	for (int i = 0; i < 9; ++i) r(i / 3, i % 3) += 1e-4 * rng.uniform(-1, 1);
	const Mat3<double> fixed = orthonormalize_rotation(r);
	CHECK((fixed.transpose() * fixed - Mat3<double>::Identity()).norm() <= 1e-12);
	CHECK(fixed.determinant() == doctest::Approx(1.0).epsilon(1e-12));
	CHECK((fixed - r).norm() <= 1e-3);
}
