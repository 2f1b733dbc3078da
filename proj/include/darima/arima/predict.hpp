#pragma once

#include "darima/arima/css.hpp"

#include <vector>

namespace darima {

namespace detail {

struct DirectRecursion {
	Polynomial ar; // full AR side including differencing
	Polynomial ma;
	std::vector<double> x;     // y minus the deterministic part
	std::vector<double> resid; // conditional residuals, zero over the conditioning window
};

inline double deterministic(const ArimaFit &fit, std::int64_t global_t) {
	const double local_t = static_cast<double>(global_t - fit.origin + 1);
	return fit.mu0 + fit.mu1 * local_t;
}

inline DirectRecursion direct_recursion(const ArimaFit &fit, const TimeSeries &history) {
	const auto m = static_cast<std::size_t>(fit.orders.m);
	DirectRecursion r;
	r.ar = Polynomial::ar(fit.phi) * Polynomial::ar(fit.sphi, m) * Polynomial::difference(1, fit.orders.d) *
	       Polynomial::difference(m, fit.orders.D);
	r.ma = Polynomial::ma(fit.theta) * Polynomial::ma(fit.stheta, m);
	const auto y = history.values();
	r.x.resize(y.size());
	for (std::size_t i = 0; i < y.size(); ++i) {
		r.x[i] = y[i] - deterministic(fit, history.origin() + static_cast<std::int64_t>(i));
	}
	const std::size_t start = r.ar.degree();
	r.resid.assign(y.size(), 0.0);
	for (std::size_t t = start; t < y.size(); ++t) {
		double e = 0.0;
		for (std::size_t j = 0; j <= r.ar.degree(); ++j) {
			e += r.ar[j] * r.x[t - j];
		}
		for (std::size_t j = 1; j <= r.ma.degree() && j <= t; ++j) {
			e -= r.ma[j] * r.resid[t - j];
		}
		r.resid[t] = e;
	}
	return r;
}

} // namespace detail

/// One-step in-sample predictions y_t - e_t from the full ARIMA recursion on the
/// original scale; entries inside the conditioning window are NaN.
inline std::vector<double> arima_fitted(const ArimaFit &fit, const TimeSeries &history) {
	const auto r = detail::direct_recursion(fit, history);
	std::vector<double> out(history.size(), std::numeric_limits<double>::quiet_NaN());
	for (std::size_t t = r.ar.degree(); t < history.size(); ++t) {
		out[t] = history[t] - r.resid[t];
	}
	return out;
}

/// Point forecasts by running the ARIMA difference equation forward with
/// future shocks set to zero.
inline std::vector<double> arima_forecast(const ArimaFit &fit, const TimeSeries &history, std::size_t H) {
	auto r = detail::direct_recursion(fit, history);
	if (history.size() <= r.ar.degree()) {
		fail(ErrorCode::insufficient_history, "history shorter than the ARIMA recursion order");
	}
	const std::size_t n = history.size();
	r.x.resize(n + H, 0.0);
	r.resid.resize(n + H, 0.0);
	std::vector<double> out(H);
	for (std::size_t h = 0; h < H; ++h) {
		const std::size_t t = n + h;
		double v = 0.0;
		for (std::size_t j = 1; j <= r.ar.degree(); ++j) {
			v -= r.ar[j] * r.x[t - j];
		}
		for (std::size_t j = 1; j <= r.ma.degree() && j <= t; ++j) {
			v += r.ma[j] * r.resid[t - j];
		}
		r.x[t] = v;
		out[h] = v + detail::deterministic(fit, history.last_index() + static_cast<std::int64_t>(h) + 1);
	}
	return out;
}

} // namespace darima
