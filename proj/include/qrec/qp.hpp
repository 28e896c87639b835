#pragma once

#include "qrec/types.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace qrec {

/// min 1/2 x'Hx + f'x  s.t.  A_in x <= b_in,  lb <= x <= ub.
/// H must be positive definite after the caller's regularization.
/// Bounds may be +-infinity; lb == ub pins a variable.
template <class Scalar>
struct QpProblem {
	Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> H;
	Eigen::Matrix<Scalar, Eigen::Dynamic, 1> f;
	Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A_in;  // may have zero rows
	Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b_in;
	Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lb;
	Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ub;
};

template <class Scalar>
struct QpOptions {
	int max_iter{50};
	Scalar tol{Scalar(1e-8)};
};

/// Constraint identifiers in active_set: i in [0,n) lower bound i,
/// [n,2n) upper bound i-n, [2n,2n+m) general inequality i-2n.
template <class Scalar>
struct QpResult {
	Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
	std::vector<int> active_set;
	int iterations{0};
	bool degraded{false};
	Scalar kkt_residual{Scalar(0)};
	Scalar objective{Scalar(0)};
};

namespace detail {

/// Euclidean projection onto {lb <= y <= ub, a'y <= b}: y = clamp(x - t a)
/// with the smallest t >= 0 restoring a'y <= b (monotone in t, bisected).
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> project_box_halfspace(
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& a, Scalar b,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lb,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& ub)
{
	auto clamp = [&](const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
		return v.cwiseMax(lb).cwiseMin(ub).eval();
	};
	Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y = clamp(x);
	if (a.dot(y) <= b) return y;

	Scalar t_hi = Scalar(1);
	for (int grow = 0; grow < 200; ++grow) {
		y = clamp(x - t_hi * a);
		if (a.dot(y) <= b) break;
		t_hi *= Scalar(2);
	}
	Scalar t_lo = Scalar(0);
	for (int it = 0; it < 200; ++it) {
		const Scalar t = (t_lo + t_hi) / Scalar(2);
		y = clamp(x - t * a);
		(a.dot(y) <= b ? t_hi : t_lo) = t;
	}
	return clamp(x - t_hi * a);
}

}  // namespace detail

/// Dense primal active-set solver for small strictly convex QPs.
///
/// The working set holds bound and general-inequality constraints treated as
/// equalities; each iteration solves the equality-constrained KKT system,
/// steps to the nearest blocking constraint, and at a stationary point drops
/// the constraint with the most negative multiplier. Ties break on the
/// lowest constraint index, so the path is deterministic. `warm_start`
/// (a previous active set) seeds the working set.
template <class Scalar>
QpResult<Scalar> solve_qp(const QpProblem<Scalar>& problem, const QpOptions<Scalar>& options = {},
                          const QpResult<Scalar>* warm_start = nullptr)
{
	using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
	using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
	const int n = static_cast<int>(problem.H.rows());
	const int m = static_cast<int>(problem.A_in.rows());
	const Scalar inf = std::numeric_limits<Scalar>::infinity();

	for (int i = 0; i < n; ++i)
		if (!(problem.lb[i] <= problem.ub[i]))
			throw std::invalid_argument("solve_qp: infeasible box (lb > ub)");

	const MatX H = ((problem.H + problem.H.transpose()) / Scalar(2)).eval();
	const VecX& f = problem.f;

	enum class BoundState { Free, Lower, Upper, Fixed };
	std::vector<BoundState> bound(n, BoundState::Free);
	std::vector<bool> gen_active(m, false);

	// Feasible start: the previous solution (or zero) clamped into the box,
	// then projected through each violated general halfspace.
	VecX x = (warm_start && warm_start->x.size() == n) ? warm_start->x : VecX::Zero(n);
	for (int i = 0; i < n; ++i) {
		Scalar v = x[i];
		if (std::isfinite(problem.lb[i])) v = std::max(v, problem.lb[i]);
		if (std::isfinite(problem.ub[i])) v = std::min(v, problem.ub[i]);
		x[i] = v;
	}
	for (int pass = 0; pass < 200 && m > 0; ++pass) {
		bool ok = true;
		for (int j = 0; j < m; ++j) {
			const Scalar feas_tol =
			    Scalar(1e-12) * std::max(Scalar(1), std::abs(problem.b_in[j]));
			if (problem.A_in.row(j).dot(x) > problem.b_in[j] + feas_tol) {
				ok = false;
				x = detail::project_box_halfspace<Scalar>(x, problem.A_in.row(j).transpose(),
				                                          problem.b_in[j], problem.lb, problem.ub);
			}
		}
		if (ok) break;
		if (pass == 199) throw std::invalid_argument("solve_qp: could not find a feasible start");
	}

	const Scalar scale = std::max(Scalar(1), x.template lpNorm<Eigen::Infinity>());
	const Scalar edge_tol = Scalar(1e-12) * scale;

	for (int i = 0; i < n; ++i) {
		if (problem.lb[i] == problem.ub[i]) {
			bound[i] = BoundState::Fixed;
			x[i] = problem.lb[i];
		} else if (std::isfinite(problem.lb[i]) && x[i] - problem.lb[i] <= edge_tol) {
			bound[i] = BoundState::Lower;
			x[i] = problem.lb[i];
		} else if (std::isfinite(problem.ub[i]) && problem.ub[i] - x[i] <= edge_tol) {
			bound[i] = BoundState::Upper;
			x[i] = problem.ub[i];
		}
	}
	for (int j = 0; j < m; ++j)
		if (std::abs(problem.A_in.row(j).dot(x) - problem.b_in[j]) <= edge_tol) gen_active[j] = true;

	QpResult<Scalar> result;
	result.degraded = true;

	// Solve the equality-constrained subproblem over the current working
	// set; returns the candidate point and general-constraint multipliers.
	auto solve_working_set = [&](VecX& x_star, VecX& nu) {
		std::vector<int> free_idx, act_idx;
		for (int i = 0; i < n; ++i)
			if (bound[i] == BoundState::Free) free_idx.push_back(i);
		for (int j = 0; j < m; ++j)
			if (gen_active[j]) act_idx.push_back(j);
		const int nf = static_cast<int>(free_idx.size());
		const int ng = static_cast<int>(act_idx.size());

		x_star = x;
		nu = VecX::Zero(m);
		if (nf == 0) return;

		MatX kkt = MatX::Zero(nf + ng, nf + ng);
		VecX rhs = VecX::Zero(nf + ng);
		for (int r = 0; r < nf; ++r) {
			for (int c = 0; c < nf; ++c) kkt(r, c) = H(free_idx[r], free_idx[c]);
			Scalar b = -f[free_idx[r]];
			for (int i = 0; i < n; ++i)
				if (bound[i] != BoundState::Free) b -= H(free_idx[r], i) * x[i];
			rhs[r] = b;
		}
		for (int r = 0; r < ng; ++r) {
			for (int c = 0; c < nf; ++c) {
				kkt(nf + r, c) = problem.A_in(act_idx[r], free_idx[c]);
				kkt(c, nf + r) = problem.A_in(act_idx[r], free_idx[c]);
			}
			Scalar b = problem.b_in[act_idx[r]];
			for (int i = 0; i < n; ++i)
				if (bound[i] != BoundState::Free) b -= problem.A_in(act_idx[r], i) * x[i];
			rhs[nf + r] = b;
		}
		const VecX sol = kkt.fullPivLu().solve(rhs);
		for (int r = 0; r < nf; ++r) x_star[free_idx[r]] = sol[r];
		for (int r = 0; r < ng; ++r) nu[act_idx[r]] = sol[nf + r];
	};

	for (int iter = 0; iter < options.max_iter; ++iter) {
		result.iterations = iter + 1;
		VecX x_star(n), nu(m);
		solve_working_set(x_star, nu);
		const VecX p = x_star - x;

		if (p.template lpNorm<Eigen::Infinity>() <= Scalar(1e-13) * scale) {
			// Stationary on the working set: check multipliers.
			const VecX g = H * x + f + problem.A_in.transpose() * nu;
			Scalar worst = -options.tol;
			int worst_id = -1;
			for (int i = 0; i < n; ++i) {
				if (bound[i] == BoundState::Lower && g[i] < worst) {
					worst = g[i];
					worst_id = i;
				} else if (bound[i] == BoundState::Upper && -g[i] < worst) {
					worst = -g[i];
					worst_id = n + i;
				}
			}
			for (int j = 0; j < m; ++j)
				if (gen_active[j] && nu[j] < worst) {
					worst = nu[j];
					worst_id = 2 * n + j;
				}
			if (worst_id < 0) {
				result.degraded = false;
				break;
			}
			if (worst_id < n)
				bound[worst_id] = BoundState::Free;
			else if (worst_id < 2 * n)
				bound[worst_id - n] = BoundState::Free;
			else
				gen_active[worst_id - 2 * n] = false;
			continue;
		}

		// Step toward the candidate, stopping at the first blocking constraint.
		Scalar alpha = Scalar(1);
		int blocking = -1;
		for (int i = 0; i < n; ++i) {
			if (bound[i] != BoundState::Free) continue;
			if (p[i] > Scalar(0) && std::isfinite(problem.ub[i])) {
				const Scalar a = (problem.ub[i] - x[i]) / p[i];
				if (a < alpha - Scalar(1e-14)) {
					alpha = std::max(a, Scalar(0));
					blocking = n + i;
				}
			} else if (p[i] < Scalar(0) && std::isfinite(problem.lb[i])) {
				const Scalar a = (problem.lb[i] - x[i]) / p[i];
				if (a < alpha - Scalar(1e-14)) {
					alpha = std::max(a, Scalar(0));
					blocking = i;
				}
			}
		}
		for (int j = 0; j < m; ++j) {
			if (gen_active[j]) continue;
			const Scalar along = problem.A_in.row(j).dot(p);
			if (along > Scalar(0)) {
				const Scalar a = (problem.b_in[j] - problem.A_in.row(j).dot(x)) / along;
				if (a < alpha - Scalar(1e-14)) {
					alpha = std::max(a, Scalar(0));
					blocking = 2 * n + j;
				}
			}
		}

		x += alpha * p;
		if (blocking < 0) {
			x = x_star;
		} else if (blocking < n) {
			bound[blocking] = BoundState::Lower;
			x[blocking] = problem.lb[blocking];
		} else if (blocking < 2 * n) {
			bound[blocking - n] = BoundState::Upper;
			x[blocking - n] = problem.ub[blocking - n];
		} else {
			gen_active[blocking - 2 * n] = true;
		}
	}

	// Assemble diagnostics: working set, multipliers and the KKT residual.
	VecX x_star(n), nu(m);
	solve_working_set(x_star, nu);
	result.x = x;
	for (int i = 0; i < n; ++i) {
		if (bound[i] == BoundState::Lower || bound[i] == BoundState::Fixed)
			result.active_set.push_back(i);
		else if (bound[i] == BoundState::Upper)
			result.active_set.push_back(n + i);
	}
	for (int j = 0; j < m; ++j)
		if (gen_active[j]) result.active_set.push_back(2 * n + j);

	const VecX g = H * x + f + problem.A_in.transpose() * nu;
	Scalar res = Scalar(0);
	for (int i = 0; i < n; ++i) {
		const Scalar lo = std::isfinite(problem.lb[i]) ? problem.lb[i] : -inf;
		const Scalar hi = std::isfinite(problem.ub[i]) ? problem.ub[i] : inf;
		res = std::max(res, lo - x[i]);
		res = std::max(res, x[i] - hi);
		switch (bound[i]) {
			case BoundState::Free:
				res = std::max(res, std::abs(g[i]));
				break;
			case BoundState::Lower:
				res = std::max(res, -g[i]);  // dual feasibility
				break;
			case BoundState::Upper:
				res = std::max(res, g[i]);
				break;
			case BoundState::Fixed:
				break;
		}
	}
	for (int j = 0; j < m; ++j) {
		const Scalar slack = problem.b_in[j] - problem.A_in.row(j).dot(x);
		res = std::max(res, -slack);
		if (gen_active[j])
			res = std::max(res, -nu[j]);
		else
			res = std::max(res, std::abs(nu[j] * slack));
	}
	result.kkt_residual = std::max(res, Scalar(0));
	result.objective = Scalar(0.5) * x.dot(problem.H * x) + f.dot(x);
	return result;
}

}  // namespace qrec
