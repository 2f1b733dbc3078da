#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace darima::optim {

struct Options {
	/// Stop when one accepted step improves the objective by less than this.
	double f_tol = 5e-10;
	int max_iter = 500;
	/// Central-difference step, relative to max(|x_i|, 1).
	double fd_step = 1e-6;
	/// Largest infinity-norm of a trial step.
	double max_step = 1.0;
};

struct Result {
	std::vector<double> x;
	double value = std::numeric_limits<double>::infinity();
	int iterations = 0;
	int evaluations = 0;
	bool converged = false;
	bool used_fallback = false;
};

namespace detail {

template <class F>
double eval(F &f, const std::vector<double> &x, int &count) {
	++count;
	const double v = f(x);
	return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

template <class F>
bool gradient(F &f, const std::vector<double> &x, double h_rel, std::vector<double> &g, int &count) {
	std::vector<double> probe = x;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double h = h_rel * std::max(std::abs(x[i]), 1.0);
		probe[i] = x[i] + h;
		const double up = eval(f, probe, count);
		probe[i] = x[i] - h;
		const double down = eval(f, probe, count);
		probe[i] = x[i];
		g[i] = (up - down) / (2.0 * h);
		if (!std::isfinite(g[i])) {
			return false;
		}
	}
	return true;
}

inline double dot(const std::vector<double> &a, const std::vector<double> &b) {
	return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

} // namespace detail

/// Derivative-free simplex search.
template <class F>
Result nelder_mead(F &&f, std::vector<double> x0, const Options &opt = {}) {
	const std::size_t n = x0.size();
	Result res;
	if (n == 0) {
		res.x = x0;
		res.value = detail::eval(f, x0, res.evaluations);
		res.converged = true;
		return res;
	}
	std::vector<std::vector<double>> simplex(n + 1, x0);
	std::vector<double> values(n + 1);
	for (std::size_t i = 0; i < n; ++i) {
		simplex[i + 1][i] += 0.1 * std::max(std::abs(x0[i]), 1.0);
	}
	for (std::size_t i = 0; i <= n; ++i) {
		values[i] = detail::eval(f, simplex[i], res.evaluations);
	}
	std::vector<std::size_t> order(n + 1);
	const int max_iter = opt.max_iter * static_cast<int>(std::max<std::size_t>(n, 4));
	for (; res.iterations < max_iter; ++res.iterations) {
		std::iota(order.begin(), order.end(), 0);
		std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
		const std::size_t best = order.front();
		const std::size_t worst = order.back();
		const std::size_t second = order[n - 1];
		if (std::isfinite(values[worst]) && values[worst] - values[best] < opt.f_tol) {
			res.converged = true;
			break;
		}
		std::vector<double> centroid(n, 0.0);
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == worst) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				centroid[j] += simplex[i][j] / static_cast<double>(n);
			}
		}
		auto along = [&](double t) {
			std::vector<double> p(n);
			for (std::size_t j = 0; j < n; ++j) {
				p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
			}
			return p;
		};
		auto reflected = along(-1.0);
		const double fr = detail::eval(f, reflected, res.evaluations);
		if (fr < values[best]) {
			auto expanded = along(-2.0);
			const double fe = detail::eval(f, expanded, res.evaluations);
			if (fe < fr) {
				simplex[worst] = std::move(expanded);
				values[worst] = fe;
			} else {
				simplex[worst] = std::move(reflected);
				values[worst] = fr;
			}
			continue;
		}
		if (fr < values[second]) {
			simplex[worst] = std::move(reflected);
			values[worst] = fr;
			continue;
		}
		auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
		const double fc = detail::eval(f, contracted, res.evaluations);
		if (fc < std::min(fr, values[worst])) {
			simplex[worst] = std::move(contracted);
			values[worst] = fc;
			continue;
		}
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == best) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
			}
			values[i] = detail::eval(f, simplex[i], res.evaluations);
		}
	}
	const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
	res.x = simplex[best];
	res.value = values[best];
	return res;
}

/// Quasi-Newton (BFGS inverse-Hessian update) with central finite-difference
/// gradients and Armijo backtracking. A failed line search away from a
/// stationary point hands over to nelder_mead from the current iterate.
template <class F>
Result minimize(F &&f, std::vector<double> x0, const Options &opt = {}) {
	const std::size_t n = x0.size();
	Result res;
	res.x = std::move(x0);
	res.value = detail::eval(f, res.x, res.evaluations);
	if (n == 0) {
		res.converged = std::isfinite(res.value);
		return res;
	}
	auto fallback = [&](Result &current) {
		Result nm = nelder_mead(f, current.x, opt);
		nm.evaluations += current.evaluations;
		nm.iterations += current.iterations;
		nm.used_fallback = true;
		if (!(nm.value <= current.value)) {
			nm.x = current.x;
			nm.value = current.value;
		}
		return nm;
	};
	if (!std::isfinite(res.value)) {
		return fallback(res);
	}

	std::vector<double> g(n), g_new(n), d(n), x_new(n), s(n), y(n), hy(n);
	std::vector<double> H(n * n, 0.0);
	auto reset_h = [&](double scale) {
		std::fill(H.begin(), H.end(), 0.0);
		for (std::size_t i = 0; i < n; ++i) {
			H[i * n + i] = scale;
		}
	};
	reset_h(1.0);
	if (!detail::gradient(f, res.x, opt.fd_step, g, res.evaluations)) {
		return fallback(res);
	}
	bool first_update = true;

	for (; res.iterations < opt.max_iter; ++res.iterations) {
		if (*std::max_element(g.begin(), g.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) ==
		    0.0) {
			res.converged = true;
			return res;
		}
		for (std::size_t i = 0; i < n; ++i) {
			d[i] = 0.0;
			for (std::size_t j = 0; j < n; ++j) {
				d[i] -= H[i * n + j] * g[j];
			}
		}
		double slope = detail::dot(g, d);
		if (!(slope < 0.0)) {
			reset_h(1.0);
			first_update = true;
			for (std::size_t i = 0; i < n; ++i) {
				d[i] = -g[i];
			}
			slope = detail::dot(g, d);
		}
		double dmax = 0.0;
		for (double v : d) {
			dmax = std::max(dmax, std::abs(v));
		}
		double t = dmax > opt.max_step ? opt.max_step / dmax : 1.0;
		double f_new = std::numeric_limits<double>::infinity();
		bool accepted = false;
		for (int k = 0; k < 60; ++k) {
			for (std::size_t i = 0; i < n; ++i) {
				x_new[i] = res.x[i] + t * d[i];
			}
			f_new = detail::eval(f, x_new, res.evaluations);
			if (f_new <= res.value + 1e-4 * t * slope) {
				accepted = true;
				break;
			}
			t *= 0.5;
		}
		if (!accepted) {
			return fallback(res);
		}
		if (!detail::gradient(f, x_new, opt.fd_step, g_new, res.evaluations)) {
			return fallback(res);
		}
		const double improvement = res.value - f_new;
		for (std::size_t i = 0; i < n; ++i) {
			s[i] = x_new[i] - res.x[i];
			y[i] = g_new[i] - g[i];
		}
		res.x = x_new;
		res.value = f_new;
		g = g_new;
		if (improvement < opt.f_tol) {
			res.converged = true;
			++res.iterations;
			return res;
		}
		const double sy = detail::dot(s, y);
		const double yy = detail::dot(y, y);
		if (sy > 1e-12 * std::sqrt(detail::dot(s, s) * yy)) {
			if (first_update) {
				reset_h(sy / yy);
				first_update = false;
			}
			for (std::size_t i = 0; i < n; ++i) {
				hy[i] = 0.0;
				for (std::size_t j = 0; j < n; ++j) {
					hy[i] += H[i * n + j] * y[j];
				}
			}
			const double yhy = detail::dot(y, hy);
			const double rho = 1.0 / sy;
			for (std::size_t i = 0; i < n; ++i) {
				for (std::size_t j = 0; j < n; ++j) {
					H[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
				}
			}
		}
	}
	return fallback(res);
}

} // namespace darima::optim
