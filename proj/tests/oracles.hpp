// Test-only reference implementations, kept independent of the library code
// paths they are used to check.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace oracle {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline Vector3d cross_product(const Vector3d& a, const Vector3d& b)
{
	return Vector3d(a.y() * b.z() - a.z() * b.y(),
	                a.z() * b.x() - a.x() * b.z(),
	                a.x() * b.y() - a.y() * b.x());
}

/// RK4 integration of dy/dt = A y + q over [0, t] with fixed step dt.
inline Vector2d integrate_planar_ode(const Matrix2d& a, const Vector2d& q, Vector2d y, double t,
                                     double dt)
{
	const int steps = static_cast<int>(std::llround(t / dt));
	auto f = [&](const Vector2d& v) -> Vector2d { return a * v + q; };
	for (int i = 0; i < steps; ++i) {
		const Vector2d k1 = f(y);
		const Vector2d k2 = f(y + 0.5 * dt * k1);
		const Vector2d k3 = f(y + 0.5 * dt * k2);
		const Vector2d k4 = f(y + dt * k3);
		y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
	}
	return y;
}

/// Transition matrices of the planar ODE by columnwise integration.
inline void integrate_transition_matrices(const Matrix2d& a, double t, double dt, Matrix2d& phi0,
                                          Matrix2d& phi1)
{
	for (int col = 0; col < 2; ++col) {
		const Vector2d e = Matrix2d::Identity().col(col);
		phi0.col(col) = integrate_planar_ode(a, Vector2d::Zero(), e, t, dt);
		phi1.col(col) = integrate_planar_ode(a, e, Vector2d::Zero(), t, dt);
	}
}

/// Euclidean projection onto {lb <= x <= ub} intersected with {a'x <= b}
/// (a may be zero for a pure box): clamp, then walk the scalar dual variable
/// until the halfspace is tight.
inline VectorXd project_feasible(const VectorXd& x, const VectorXd& lb, const VectorXd& ub,
                                 const VectorXd& a, double b)
{
	auto clamp = [&](const VectorXd& v) { return v.cwiseMax(lb).cwiseMin(ub).eval(); };
	VectorXd y = clamp(x);
	if (a.size() == 0 || a.dot(y) <= b) return y;
	double t_hi = 1.0;
	while (a.dot(clamp(x - t_hi * a)) > b && t_hi < 1e18) t_hi *= 2.0;
	double t_lo = 0.0;
	for (int i = 0; i < 200; ++i) {
		const double t = 0.5 * (t_lo + t_hi);
		(a.dot(clamp(x - t * a)) <= b ? t_hi : t_lo) = t;
	}
	return clamp(x - t_hi * a);
}

/// Accelerated projected gradient (FISTA with restart) for
/// min 1/2 x'Hx + f'x over the box intersected with one halfspace.
/// Returns the solution; iterates until the gradient mapping is tiny.
inline VectorXd projected_gradient_qp(const MatrixXd& h, const VectorXd& f, const VectorXd& lb,
                                      const VectorXd& ub, const VectorXd& a, double b,
                                      int max_iter = 200000, double tol = 1e-12)
{
	const double lip = Eigen::SelfAdjointEigenSolver<MatrixXd>(h).eigenvalues().maxCoeff();
	const double step = 1.0 / lip;
	VectorXd x = project_feasible(VectorXd::Zero(f.size()), lb, ub, a, b);
	VectorXd y = x;
	double momentum = 1.0;
	for (int i = 0; i < max_iter; ++i) {
		const VectorXd grad = h * y + f;
		const VectorXd x_next = project_feasible(y - step * grad, lb, ub, a, b);
		const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
		VectorXd y_next = x_next + (momentum - 1.0) / t_next * (x_next - x);
		// Restart on non-descent to keep the iteration monotone.
		if ((x_next - x).dot(y - x_next) > 0) {
			y_next = x_next;
			momentum = 1.0;
		} else {
			momentum = t_next;
		}
		const double move = (x_next - x).lpNorm<Eigen::Infinity>();
		x = x_next;
		y = y_next;
		if (move < tol && i > 10) break;
	}
	return x;
}

inline double polygon_area(const std::vector<Vector2d>& hull)
{
	double twice = 0;
	for (std::size_t i = 0; i < hull.size(); ++i) {
		const Vector2d& p = hull[i];
		const Vector2d& q = hull[(i + 1) % hull.size()];
		twice += p.x() * q.y() - p.y() * q.x();
	}
	return 0.5 * twice;
}

/// Point containment for a counterclockwise convex polygon.
inline bool point_in_convex_polygon(const Vector2d& point, const std::vector<Vector2d>& hull,
                                    double tol)
{
	if (hull.size() < 3) {
		if (hull.empty()) return false;
		if (hull.size() == 1) return (point - hull[0]).norm() <= tol;
		const Vector2d d = hull[1] - hull[0];
		const Vector2d r = point - hull[0];
		const double t = std::min(1.0, std::max(0.0, r.dot(d) / d.squaredNorm()));
		return (r - t * d).norm() <= tol;
	}
	for (std::size_t i = 0; i < hull.size(); ++i) {
		const Vector2d& p = hull[i];
		const Vector2d& q = hull[(i + 1) % hull.size()];
		const Vector2d edge = q - p;
		if (edge.x() * (point.y() - p.y()) - edge.y() * (point.x() - p.x()) < -tol) return false;
	}
	return true;
}

}  // namespace oracle
