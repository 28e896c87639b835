#pragma once

#include "qrec/qp.hpp"
#include "qrec/types.hpp"
#include "qrec/vehicle.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace qrec {

enum class AllocationMode { P1, P2 };

template <class Scalar>
struct AllocatorConfig {
	Vec4<Scalar> weights{Scalar(1e4), Scalar(1e4), Scalar(1e2), Scalar(4)};  // W_x, W_y, W_z, W_t
	Scalar lambda{Scalar(0.1)};
	Scalar gamma{Scalar(1e5)};
	Scalar t_h{Scalar(0.1)};             // s, prediction horizon
	Scalar omega_tilde_max{Scalar(5)};   // rad/s
	int failed_rotor{0};                 // 1..4, 0 = none
	AllocationMode mode{AllocationMode::P2};
	int qp_max_iter{50};
	Scalar qp_tol{Scalar(1e-8)};

	void validate() const
	{
		if (weights.minCoeff() <= Scalar(0))
			throw std::invalid_argument("allocator: weights must be > 0");
		if (!(lambda > Scalar(0)) || !(gamma > Scalar(0)) || !(t_h > Scalar(0)))
			throw std::invalid_argument("allocator: lambda, gamma, t_h must be > 0");
		if (omega_tilde_max < Scalar(0))
			throw std::invalid_argument("allocator: omega_tilde_max must be >= 0");
		if (failed_rotor < 0 || failed_rotor > 4)
			throw std::invalid_argument("allocator: failed_rotor must be 0..4");
	}
};

/// Desired body moments stacked with the collective-thrust magnitude.
template <class Scalar>
struct DesiredWrench {
	Vec4<Scalar> mu_des;  // [m_x, m_y, m_z (N m); T (N)]
};

/// Moment command from the angular-acceleration reference, including the
/// gyroscopic coupling term.
template <class Scalar>
DesiredWrench<Scalar> desired_wrench(const Vec3<Scalar>& alpha_des, Scalar thrust_des,
                                     const Vec3<Scalar>& omega_body,
                                     const VehicleParams<Scalar>& params)
{
	const Vec3<Scalar> moment = params.inertia_diag.cwiseProduct(alpha_des) +
	                            omega_body.cross(params.inertia_diag.cwiseProduct(omega_body));
	DesiredWrench<Scalar> w;
	w.mu_des << moment, thrust_des;
	return w;
}

enum class PhiRegime { Oscillatory, Hyperbolic, Degenerate };

template <class Scalar>
struct PhiMatrices {
	Mat2<Scalar> Phi0;  // state-transition matrix over t_h
	Mat2<Scalar> Phi1;  // input-integral matrix over t_h
	Scalar b;           // lower-left entry of the rate-coupling matrix
	Scalar c;           // |eigenvalue| magnitude of the coupling matrix
	PhiRegime regime;
};

/// Closed-form transition matrices of the frozen-yaw roll/pitch rate ODE
///   d/dt [wx, wy] = [[0, a], [b, 0]] [wx, wy] + G_m_hat u,
/// a = (Iy-Iz)/Ix wz, b = (Iz-Ix)/Iy wz. With A^2 = ab I the exponential
/// reduces to f(t) I + g(t) A and its integral to g(t) I + h(t) A; the three
/// coefficient functions switch between trigonometric, hyperbolic and series
/// forms depending on the sign and size of ab.
template <class Scalar>
PhiMatrices<Scalar> phi_matrices(Scalar omega_z, const VehicleParams<Scalar>& params, Scalar t_h)
{
	if (!(t_h > Scalar(0))) throw std::invalid_argument("phi_matrices: t_h must be > 0");
	const Scalar ix = params.inertia_diag.x();
	const Scalar iy = params.inertia_diag.y();
	const Scalar iz = params.inertia_diag.z();
	const Scalar a = (iy - iz) / ix * omega_z;
	const Scalar b = (iz - ix) / iy * omega_z;
	const Scalar d = a * b;
	const Scalar c = std::sqrt(std::abs(d));

	Mat2<Scalar> coupling;
	coupling << Scalar(0), a, b, Scalar(0);

	PhiMatrices<Scalar> out;
	out.b = b;
	out.c = c;

	Scalar f, g, h;
	const Scalar ct = c * t_h;
	if (std::abs(ct) < Scalar(1e-4)) {
		out.regime = PhiRegime::Degenerate;
		const Scalar t2 = t_h * t_h;
		f = Scalar(1) + d * t2 / Scalar(2) + d * d * t2 * t2 / Scalar(24);
		g = t_h * (Scalar(1) + d * t2 / Scalar(6) + d * d * t2 * t2 / Scalar(120));
		h = t2 * (Scalar(0.5) + d * t2 / Scalar(24) + d * d * t2 * t2 / Scalar(720));
	} else if (d < Scalar(0)) {
		out.regime = PhiRegime::Oscillatory;
		f = std::cos(ct);
		g = std::sin(ct) / c;
		h = (Scalar(1) - std::cos(ct)) / (c * c);
	} else {
		out.regime = PhiRegime::Hyperbolic;
		f = std::cosh(ct);
		g = std::sinh(ct) / c;
		h = (std::cosh(ct) - Scalar(1)) / (c * c);
	}
	out.Phi0 = f * Mat2<Scalar>::Identity() + g * coupling;
	out.Phi1 = g * Mat2<Scalar>::Identity() + h * coupling;
	return out;
}

/// Vertices (counterclockwise) of the projection of the attainable moment
/// set {G_m u : u_min <= u <= u_max} onto the roll/pitch moment plane,
/// from enumeration of the 16 bound combinations and a planar convex hull.
/// Degenerate sets collapse to fewer than 3 vertices.
template <class Scalar>
std::vector<Vec2<Scalar>> ams_projection(const VehicleParams<Scalar>& params,
                                         const EffectivenessModel<Scalar>& eff)
{
	std::vector<Vec2<Scalar>> points;
	points.reserve(16);
	for (int mask = 0; mask < 16; ++mask) {
		Vec4<Scalar> u;
		for (int i = 0; i < 4; ++i) u[i] = (mask >> i) & 1 ? params.u_max[i] : params.u_min[i];
		points.push_back(eff.moment_map.template topRows<2>() * u);
	}

	std::sort(points.begin(), points.end(), [](const Vec2<Scalar>& p, const Vec2<Scalar>& q) {
		return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
	});
	points.erase(std::unique(points.begin(), points.end(),
	                         [](const Vec2<Scalar>& p, const Vec2<Scalar>& q) { return p == q; }),
	             points.end());
	if (points.size() < 3) return points;

	auto cross = [](const Vec2<Scalar>& o, const Vec2<Scalar>& p, const Vec2<Scalar>& q) {
		return (p.x() - o.x()) * (q.y() - o.y()) - (p.y() - o.y()) * (q.x() - o.x());
	};

	// Monotone chain; collinear points are dropped.
	std::vector<Vec2<Scalar>> hull(2 * points.size());
	std::size_t k = 0;
	for (const Vec2<Scalar>& p : points) {
		while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= Scalar(0)) --k;
		hull[k++] = p;
	}
	const std::size_t lower_end = k + 1;
	for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
		while (k >= lower_end && cross(hull[k - 2], hull[k - 1], *it) <= Scalar(0)) --k;
		hull[k++] = *it;
	}
	hull.resize(k - 1);
	return hull;
}

/// Unit direction in the roll/pitch rate plane along which the remaining
/// rotors cannot decelerate rotation: the normal of the nearest boundary
/// edge of the post-failure attainable moment set, oriented toward the side
/// the attainable moments lie on. Requires exactly one failed rotor.
template <class Scalar>
RowVec2<Scalar> unrecoverable_axis(const VehicleParams<Scalar>& params_failed,
                                   const EffectivenessModel<Scalar>& eff)
{
	int failed = 0;
	for (int i = 0; i < 4; ++i)
		if (params_failed.u_min[i] == Scalar(0) && params_failed.u_max[i] == Scalar(0)) ++failed;
	if (failed != 1)
		throw std::invalid_argument("unrecoverable_axis: exactly one failed rotor required");

	const std::vector<Vec2<Scalar>> hull = ams_projection(params_failed, eff);
	if (hull.size() < 2)
		throw std::invalid_argument("unrecoverable_axis: degenerate attainable moment set");

	auto segment_distance = [](const Vec2<Scalar>& p, const Vec2<Scalar>& q) {
		const Vec2<Scalar> d = q - p;
		const Scalar len2 = d.squaredNorm();
		const Scalar t = len2 > Scalar(0)
		                     ? std::min(Scalar(1), std::max(Scalar(0), -p.dot(d) / len2))
		                     : Scalar(0);
		return (p + t * d).norm();
	};

	std::size_t best = 0;
	Scalar best_dist = std::numeric_limits<Scalar>::infinity();
	for (std::size_t i = 0; i < hull.size(); ++i) {
		const Scalar dist = segment_distance(hull[i], hull[(i + 1) % hull.size()]);
		if (dist < best_dist) {
			best_dist = dist;
			best = i;
		}
	}

	// Counterclockwise hull: rotating the edge direction by +90 deg points
	// into the polygon.
	const Vec2<Scalar> d = (hull[(best + 1) % hull.size()] - hull[best]).normalized();
	return RowVec2<Scalar>(-d.y(), d.x());
}

template <class Scalar>
struct AllocationResult {
	Vec4<Scalar> u;
	Scalar slack{Scalar(0)};              // d of the rate-constrained problem
	Vec4<Scalar> achieved_mu;             // [G_m u; sum(u)]
	int qp_iterations{0};
	std::vector<int> active_set;
	Scalar predicted_omega_tilde{Scalar(0)};  // rad/s after t_h under this u
	Scalar kkt_residual{Scalar(0)};
	bool degraded{false};
};

namespace detail {

/// Tracking matrix used by both allocation problems: moment rows of G with
/// the thrust row replaced by +1s so that sum(u) tracks the commanded
/// magnitude (the -z_B force convention would otherwise pin thrust at zero).
template <class Scalar>
Mat4<Scalar> allocation_matrix(const EffectivenessModel<Scalar>& eff)
{
	Mat4<Scalar> g = eff.combined;
	g.row(3) = -eff.thrust_map;
	return g;
}

template <class Scalar>
Scalar predict_omega_tilde(const RowVec2<Scalar>& phi, const PhiMatrices<Scalar>& tm,
                           const Vec2<Scalar>& omega_xy, const Mat24<Scalar>& g_hat,
                           const Vec4<Scalar>& u)
{
	return (phi * (tm.Phi0 * omega_xy + tm.Phi1 * (g_hat * u))).value();
}

}  // namespace detail

/// Box-constrained weighted least-squares allocation (no rate constraint).
/// `omega_body`, when given together with a single-failure configuration,
/// is only used to fill the predicted-rate diagnostic.
template <class Scalar>
AllocationResult<Scalar> allocate_p1(const DesiredWrench<Scalar>& wrench,
                                     const EffectivenessModel<Scalar>& eff,
                                     const VehicleParams<Scalar>& params,
                                     const AllocatorConfig<Scalar>& cfg,
                                     const Vec3<Scalar>* omega_body = nullptr,
                                     const RowVec2<Scalar>* phi = nullptr,
                                     QpResult<Scalar>* warm = nullptr)
{
	const Mat4<Scalar> g = detail::allocation_matrix(eff);

	QpProblem<Scalar> qp;
	qp.H = Scalar(2) * (g.transpose() * cfg.weights.asDiagonal() * g +
	                    cfg.lambda * Mat4<Scalar>::Identity()) +
	       Scalar(1e-12) * Mat4<Scalar>::Identity();
	qp.f = Scalar(-2) * g.transpose() * (cfg.weights.asDiagonal() * wrench.mu_des);
	qp.A_in.resize(0, 4);
	qp.b_in.resize(0);
	qp.lb = params.u_min;
	qp.ub = params.u_max;

	const QpResult<Scalar> sol =
	    solve_qp<Scalar>(qp, {cfg.qp_max_iter, cfg.qp_tol}, warm);
	if (warm) *warm = sol;

	AllocationResult<Scalar> out;
	out.u = sol.x;
	out.achieved_mu = g * out.u;
	out.qp_iterations = sol.iterations;
	out.active_set = sol.active_set;
	out.kkt_residual = sol.kkt_residual;
	out.degraded = sol.degraded;
	if (omega_body && phi) {
		const PhiMatrices<Scalar> tm = phi_matrices(omega_body->z(), params, cfg.t_h);
		out.predicted_omega_tilde = detail::predict_omega_tilde(
		    *phi, tm, Vec2<Scalar>(omega_body->x(), omega_body->y()),
		    eff.moment_map_normalized, out.u);
	}
	return out;
}

/// Allocation with the slack-relaxed unrecoverable-rate constraint:
/// phi Phi1 G_m_hat u <= -phi Phi0 [wx, wy]' + omega_tilde_max + d, d >= 0.
template <class Scalar>
AllocationResult<Scalar> allocate_p2(const DesiredWrench<Scalar>& wrench,
                                     const Vec3<Scalar>& omega_body,
                                     const EffectivenessModel<Scalar>& eff,
                                     const VehicleParams<Scalar>& params,
                                     const AllocatorConfig<Scalar>& cfg,
                                     const RowVec2<Scalar>& phi,
                                     QpResult<Scalar>* warm = nullptr)
{
	const Mat4<Scalar> g = detail::allocation_matrix(eff);
	const PhiMatrices<Scalar> tm = phi_matrices(omega_body.z(), params, cfg.t_h);
	const Vec2<Scalar> omega_xy(omega_body.x(), omega_body.y());
	const Scalar inf = std::numeric_limits<Scalar>::infinity();

	QpProblem<Scalar> qp;
	qp.H = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(5, 5);
	qp.H.template topLeftCorner<4, 4>() =
	    Scalar(2) * (g.transpose() * cfg.weights.asDiagonal() * g +
	                 cfg.lambda * Mat4<Scalar>::Identity());
	qp.H(4, 4) = Scalar(2) * cfg.gamma;
	qp.H += Scalar(1e-12) *
	        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(5, 5);
	qp.f.resize(5);
	qp.f.template head<4>() = Scalar(-2) * g.transpose() * (cfg.weights.asDiagonal() * wrench.mu_des);
	qp.f[4] = Scalar(0);

	const RowVec2<Scalar> phi_phi1 = phi * tm.Phi1;
	qp.A_in.resize(1, 5);
	qp.A_in.template leftCols<4>() = phi_phi1 * eff.moment_map_normalized;
	qp.A_in(0, 4) = Scalar(-1);
	qp.b_in.resize(1);
	qp.b_in[0] = cfg.omega_tilde_max - (phi * (tm.Phi0 * omega_xy)).value();

	qp.lb.resize(5);
	qp.ub.resize(5);
	qp.lb.template head<4>() = params.u_min;
	qp.ub.template head<4>() = params.u_max;
	qp.lb[4] = Scalar(0);
	qp.ub[4] = inf;

	const QpResult<Scalar> sol =
	    solve_qp<Scalar>(qp, {cfg.qp_max_iter, cfg.qp_tol}, warm);
	if (warm) *warm = sol;

	AllocationResult<Scalar> out;
	out.u = sol.x.template head<4>();
	out.slack = sol.x[4];
	out.achieved_mu = g * out.u;
	out.qp_iterations = sol.iterations;
	out.active_set = sol.active_set;
	out.kkt_residual = sol.kkt_residual;
	out.degraded = sol.degraded;
	out.predicted_omega_tilde =
	    detail::predict_omega_tilde(phi, tm, omega_xy, eff.moment_map_normalized, out.u);
	return out;
}

/// Convenience overload computing the unrecoverable axis on the fly.
template <class Scalar>
AllocationResult<Scalar> allocate_p2(const DesiredWrench<Scalar>& wrench,
                                     const Vec3<Scalar>& omega_body,
                                     const EffectivenessModel<Scalar>& eff,
                                     const VehicleParams<Scalar>& params,
                                     const AllocatorConfig<Scalar>& cfg)
{
	const RowVec2<Scalar> phi = unrecoverable_axis(params, eff);
	return allocate_p2(wrench, omega_body, eff, params, cfg, phi);
}

}  // namespace qrec
