#pragma once

#include "darima/arima/optim.hpp"
#include "darima/arima/roots.hpp"
#include "darima/arima/types.hpp"
#include "darima/polynomial.hpp"
#include "darima/series.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace darima {

struct ArmaCoefficients {
	std::vector<double> phi;
	std::vector<double> theta;
	std::vector<double> sphi;
	std::vector<double> stheta;
};

/// (1-B)^d (1-B^m)^D applied to the sequence.
inline std::vector<double> difference(std::span<const double> y, int d, int D, int m) {
	if (d < 0 || D < 0 || m < 1) {
		fail(ErrorCode::invalid_argument, "differencing orders must be non-negative and m >= 1");
	}
	const std::size_t loss = static_cast<std::size_t>(d) + static_cast<std::size_t>(D) * static_cast<std::size_t>(m);
	if (y.size() <= loss) {
		fail(ErrorCode::series_too_short,
		     "series of length " + std::to_string(y.size()) + " cannot be differenced " + std::to_string(loss) + " times");
	}
	std::vector<double> x(y.begin(), y.end());
	auto apply = [&x](std::size_t lag) {
		for (std::size_t i = x.size() - 1; i >= lag; --i) {
			x[i] -= x[i - lag];
			if (i == lag) {
				break;
			}
		}
		x.erase(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(lag));
	};
	for (int i = 0; i < D; ++i) {
		apply(static_cast<std::size_t>(m));
	}
	for (int i = 0; i < d; ++i) {
		apply(1);
	}
	return x;
}

namespace detail {

/// Non-zero terms of a backshift polynomial except the constant, as (lag, coefficient).
struct LagTerms {
	std::vector<std::size_t> lag;
	std::vector<double> coef;
	std::size_t max_lag = 0;
};

/// Expansion of (1-sum phi B^i)(1-sum Phi B^{im}) written as 1 - sum a_l B^l.
inline LagTerms ar_terms(const ArmaCoefficients &c, int m) {
	const Polynomial poly = Polynomial::ar(c.phi) * Polynomial::ar(c.sphi, static_cast<std::size_t>(m));
	LagTerms out;
	for (std::size_t l = 1; l < poly.coeffs().size(); ++l) {
		if (poly[l] != 0.0) {
			out.lag.push_back(l);
			out.coef.push_back(-poly[l]);
		}
	}
	out.max_lag = c.phi.size() + c.sphi.size() * static_cast<std::size_t>(m);
	return out;
}

/// Expansion of (1+sum theta B^i)(1+sum Theta B^{im}) written as 1 + sum b_l B^l.
inline LagTerms ma_terms(const ArmaCoefficients &c, int m) {
	const Polynomial poly = Polynomial::ma(c.theta) * Polynomial::ma(c.stheta, static_cast<std::size_t>(m));
	LagTerms out;
	for (std::size_t l = 1; l < poly.coeffs().size(); ++l) {
		if (poly[l] != 0.0) {
			out.lag.push_back(l);
			out.coef.push_back(poly[l]);
		}
	}
	out.max_lag = c.theta.size() + c.stheta.size() * static_cast<std::size_t>(m);
	return out;
}

/// Residual recursion shared by css_residuals and the fit objective. Writes
/// zeros for the first `ncond` positions and returns the sum of squares of the rest.
inline double css_recursion(std::span<const double> x, const LagTerms &ar, const LagTerms &ma, std::size_t ncond,
                            double constant, std::vector<double> &resid) {
	const std::size_t n = x.size();
	resid.assign(n, 0.0);
	double ssq = 0.0;
	for (std::size_t t = ncond; t < n; ++t) {
		double e = x[t] - constant;
		for (std::size_t j = 0; j < ar.lag.size(); ++j) {
			e -= ar.coef[j] * (x[t - ar.lag[j]] - constant);
		}
		for (std::size_t j = 0; j < ma.lag.size(); ++j) {
			const std::size_t l = ma.lag[j];
			if (l > t) {
				break;
			}
			e -= ma.coef[j] * resid[t - l];
		}
		resid[t] = e;
		ssq += e * e;
	}
	return ssq;
}

inline std::vector<double> yule_walker(std::span<const double> x, int p) {
	std::vector<double> phi(static_cast<std::size_t>(p), 0.0);
	if (p == 0 || x.size() <= static_cast<std::size_t>(p)) {
		return phi;
	}
	const double n = static_cast<double>(x.size());
	const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
	std::vector<double> r(static_cast<std::size_t>(p) + 1, 0.0);
	for (std::size_t lag = 0; lag < r.size(); ++lag) {
		for (std::size_t t = lag; t < x.size(); ++t) {
			r[lag] += (x[t] - mean) * (x[t - lag] - mean);
		}
		r[lag] /= n;
	}
	if (!(r[0] > 0.0)) {
		return phi;
	}
	// Levinson-Durbin
	std::vector<double> prev;
	double err = r[0];
	for (int k = 1; k <= p; ++k) {
		double acc = r[static_cast<std::size_t>(k)];
		for (int j = 1; j < k; ++j) {
			acc -= phi[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(k - j)];
		}
		const double kappa = acc / err;
		prev.assign(phi.begin(), phi.begin() + k - 1);
		for (int j = 1; j < k; ++j) {
			phi[static_cast<std::size_t>(j - 1)] = prev[static_cast<std::size_t>(j - 1)] - kappa * prev[static_cast<std::size_t>(k - j - 1)];
		}
		phi[static_cast<std::size_t>(k - 1)] = kappa;
		err *= (1.0 - kappa * kappa);
		if (!(err > 0.0)) {
			break;
		}
	}
	return phi;
}

} // namespace detail

/// Conditional residuals of the (already differenced) sequence. Pre-sample
/// values and residuals are zero; the first p + P*m entries are reported as 0
/// and excluded from the sum of squares.
inline std::vector<double> css_residuals(std::span<const double> x, const ArimaOrders &orders,
                                         const ArmaCoefficients &coef, double constant = 0.0) {
	const auto ncond = static_cast<std::size_t>(orders.conditioning());
	std::vector<double> resid;
	if (x.size() <= ncond) {
		resid.assign(x.size(), 0.0);
		return resid;
	}
	detail::css_recursion(x, detail::ar_terms(coef, orders.m), detail::ma_terms(coef, orders.m), ncond, constant, resid);
	return resid;
}

inline double aicc_from_css(double css, std::size_t n_obs, int n_coefficients) {
	const double n = static_cast<double>(n_obs);
	const double k = static_cast<double>(n_coefficients + 1);
	return n * std::log(css / n) + 2.0 * k * n / (n - k - 1.0);
}

struct CssOptions {
	bool constant = false;
	/// Warm start in natural units: phi, theta, sphi, stheta, then the constant (mu0 or mu1).
	std::vector<double> start;
	double rel_tol = 1e-9;
	int max_iter = 500;
	double root_tol = 1e-3;
};

/// Whether a constant (mean when d+D=0, drift when d+D=1) is admissible and enabled.
inline bool constant_allowed(const ArimaOrders &o, const SelectionConfig &cfg) {
	const int total = o.d + o.D;
	return (total == 0 && cfg.allow_mean) || (total == 1 && cfg.allow_drift);
}

/// Conditional-sum-of-squares fit of a fixed-order seasonal ARIMA model.
inline ArimaFit fit_css(const TimeSeries &series, const ArimaOrders &orders, const CssOptions &opt) {
	if (orders.p < 0 || orders.q < 0 || orders.P < 0 || orders.Q < 0 || orders.d < 0 || orders.D < 0) {
		fail(ErrorCode::invalid_argument, "orders must be non-negative");
	}
	if (orders.m != series.period() && (orders.P + orders.Q + orders.D) > 0) {
		fail(ErrorCode::invalid_argument, "model period does not match the series period");
	}
	const std::size_t needed =
	    static_cast<std::size_t>(orders.diff_loss()) + static_cast<std::size_t>(orders.conditioning()) + 1;
	if (series.size() <= needed) {
		fail(ErrorCode::series_too_short, "series of length " + std::to_string(series.size()) +
		                                      " is too short for ARIMA" + orders.to_string());
	}
	const auto y = series.values();
	const std::vector<double> x = difference(y, orders.d, orders.D, orders.m);
	const std::size_t n = x.size();
	const auto ncond = static_cast<std::size_t>(orders.conditioning());
	const std::size_t n_obs = n - ncond;

	const int total_diff = orders.d + orders.D;
	const bool has_mean = opt.constant && total_diff == 0;
	const bool has_drift = opt.constant && total_diff == 1;
	const bool has_constant = has_mean || has_drift;
	const int k = orders.arma_count() + (has_constant ? 1 : 0);
	if (static_cast<double>(n_obs) <= static_cast<double>(k) + 2.0) {
		fail(ErrorCode::series_too_short, "not enough observations for " + std::to_string(k) + " coefficients");
	}
	// Drift mu1 enters the differenced series as mu1 (d=1) or m*mu1 (D=1).
	const double drift_factor = orders.d == 1 ? 1.0 : static_cast<double>(orders.m);

	const double xmean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
	double xvar = 0.0;
	for (double v : x) {
		xvar += (v - xmean) * (v - xmean);
	}
	xvar /= static_cast<double>(n);

	const auto np = static_cast<std::size_t>(orders.p);
	const auto nq = static_cast<std::size_t>(orders.q);
	const auto nP = static_cast<std::size_t>(orders.P);
	const auto nQ = static_cast<std::size_t>(orders.Q);
	const std::size_t arma_n = np + nq + nP + nQ;

	std::vector<double> start(arma_n + (has_constant ? 1 : 0), 0.0);
	double constant_init = 0.0;
	if (!opt.start.empty()) {
		if (opt.start.size() != start.size()) {
			fail(ErrorCode::invalid_argument, "warm start has the wrong length");
		}
		std::copy(opt.start.begin(), opt.start.begin() + static_cast<std::ptrdiff_t>(arma_n), start.begin());
		if (has_constant) {
			constant_init = opt.start.back() * (has_drift ? drift_factor : 1.0);
		}
	} else {
		if (has_mean) {
			constant_init = xmean;
		} else if (has_drift) {
			// least-squares slope of y on t
			const double nn = static_cast<double>(y.size());
			const double tbar = (nn + 1.0) / 2.0;
			const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / nn;
			double sxy = 0.0;
			double sxx = 0.0;
			for (std::size_t i = 0; i < y.size(); ++i) {
				const double dt = static_cast<double>(i + 1) - tbar;
				sxy += dt * (y[i] - ybar);
				sxx += dt * dt;
			}
			constant_init = sxy / sxx * drift_factor;
		}
		std::vector<double> centred(x.size());
		for (std::size_t i = 0; i < n; ++i) {
			centred[i] = x[i] - (has_constant ? constant_init : 0.0);
		}
		const auto phi0 = detail::yule_walker(centred, orders.p);
		std::copy(phi0.begin(), phi0.end(), start.begin());
	}
	// The constant is optimized as constant_init + scale * u with u starting at 0.
	const double constant_scale = xvar > 0.0 ? 10.0 * std::sqrt(xvar / static_cast<double>(n)) : 1.0;
	if (has_constant) {
		start.back() = 0.0;
	}

	auto unpack = [&](const std::vector<double> &par, ArmaCoefficients &c) {
		auto it = par.begin();
		c.phi.assign(it, it + static_cast<std::ptrdiff_t>(np));
		it += static_cast<std::ptrdiff_t>(np);
		c.theta.assign(it, it + static_cast<std::ptrdiff_t>(nq));
		it += static_cast<std::ptrdiff_t>(nq);
		c.sphi.assign(it, it + static_cast<std::ptrdiff_t>(nP));
		it += static_cast<std::ptrdiff_t>(nP);
		c.stheta.assign(it, it + static_cast<std::ptrdiff_t>(nQ));
		return has_constant ? constant_init + constant_scale * par.back() : 0.0;
	};

	const double css_floor = std::numeric_limits<double>::min() * static_cast<double>(n_obs);
	ArmaCoefficients coef;
	std::vector<double> resid;
	auto objective = [&](const std::vector<double> &par) {
		const double constant = unpack(par, coef);
		const double css = detail::css_recursion(x, detail::ar_terms(coef, orders.m), detail::ma_terms(coef, orders.m),
		                                         ncond, constant, resid);
		if (!std::isfinite(css)) {
			return std::numeric_limits<double>::infinity();
		}
		return 0.5 * std::log(std::max(css, css_floor) / static_cast<double>(n_obs));
	};

	optim::Options oo;
	// Objective is 0.5*log(css/n): a relative CSS improvement r is an absolute drop of -0.5*log(1-r).
	oo.f_tol = -0.5 * std::log1p(-opt.rel_tol);
	oo.max_iter = opt.max_iter;
	const optim::Result res = optim::minimize(objective, start, oo);
	if (!res.converged || !std::isfinite(res.value)) {
		fail(ErrorCode::fit_failed, "optimizer did not converge for ARIMA" + orders.to_string());
	}

	ArimaFit fit;
	fit.orders = orders;
	const double constant = unpack(res.x, coef);
	const double css = detail::css_recursion(x, detail::ar_terms(coef, orders.m), detail::ma_terms(coef, orders.m),
	                                         ncond, constant, resid);
	if (!std::isfinite(css)) {
		fail(ErrorCode::fit_failed, "non-finite sum of squares for ARIMA" + orders.to_string());
	}
	if (!check_roots(coef.phi, opt.root_tol, -1.0) ||
	    !check_roots(coef.sphi, opt.root_tol, -1.0, static_cast<std::size_t>(orders.m))) {
		fail(ErrorCode::non_stationary, "AR roots inside or near the unit circle for ARIMA" + orders.to_string());
	}
	if (!check_roots(coef.theta, opt.root_tol, 1.0) ||
	    !check_roots(coef.stheta, opt.root_tol, 1.0, static_cast<std::size_t>(orders.m))) {
		fail(ErrorCode::non_invertible, "MA roots inside or near the unit circle for ARIMA" + orders.to_string());
	}
	fit.phi = std::move(coef.phi);
	fit.theta = std::move(coef.theta);
	fit.sphi = std::move(coef.sphi);
	fit.stheta = std::move(coef.stheta);
	fit.has_mean = has_mean;
	fit.has_drift = has_drift;
	fit.mu0 = has_mean ? constant : 0.0;
	fit.mu1 = has_drift ? constant / drift_factor : 0.0;
	fit.css = css;
	fit.n_obs = n_obs;
	fit.sigma2 = css / static_cast<double>(n_obs);
	if (!(fit.sigma2 > 0.0)) {
		// exact fit (e.g. a deterministic ramp); keep a positive variance
		fit.sigma2 = std::numeric_limits<double>::min();
		fit.css = fit.sigma2 * static_cast<double>(n_obs);
	}
	fit.aicc = aicc_from_css(fit.css, n_obs, fit.n_coefficients());
	fit.length = series.size();
	fit.origin = series.origin();
	return fit;
}

inline ArimaFit fit_css(const TimeSeries &series, const ArimaOrders &orders, const SelectionConfig &config) {
	CssOptions opt;
	opt.constant = constant_allowed(orders, config);
	opt.root_tol = config.root_tol;
	return fit_css(series, orders, opt);
}

/// Coefficients of a fit in the warm-start layout of CssOptions::start.
inline std::vector<double> packed_coefficients(const ArimaFit &fit) {
	std::vector<double> out;
	out.insert(out.end(), fit.phi.begin(), fit.phi.end());
	out.insert(out.end(), fit.theta.begin(), fit.theta.end());
	out.insert(out.end(), fit.sphi.begin(), fit.sphi.end());
	out.insert(out.end(), fit.stheta.begin(), fit.stheta.end());
	if (fit.has_mean) {
		out.push_back(fit.mu0);
	} else if (fit.has_drift) {
		out.push_back(fit.mu1);
	}
	return out;
}

inline ArmaCoefficients arma_coefficients(const ArimaFit &fit) {
	return {fit.phi, fit.theta, fit.sphi, fit.stheta};
}

} // namespace darima
