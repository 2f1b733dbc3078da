#pragma once

#include "darima/arima/css.hpp"
#include "darima/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace darima {

/// KPSS level-stationarity statistic with a Bartlett-window long-run variance
/// and lag truncation floor(3*sqrt(n)/13). A constant sequence yields 0.
inline double kpss_stat(std::span<const double> x) {
	const std::size_t n = x.size();
	if (n < 12) {
		fail(ErrorCode::series_too_short, "KPSS needs at least 12 observations");
	}
	const double nn = static_cast<double>(n);
	const double mean = std::accumulate(x.begin(), x.end(), 0.0) / nn;
	std::vector<double> e(n);
	for (std::size_t i = 0; i < n; ++i) {
		e[i] = x[i] - mean;
	}
	double partial = 0.0;
	double eta = 0.0;
	double gamma0 = 0.0;
	for (double v : e) {
		partial += v;
		eta += partial * partial;
		gamma0 += v * v;
	}
	const auto lags = static_cast<std::size_t>(std::floor(3.0 * std::sqrt(nn) / 13.0));
	double lrv = gamma0;
	for (std::size_t s = 1; s <= lags; ++s) {
		double acc = 0.0;
		for (std::size_t t = s; t < n; ++t) {
			acc += e[t] * e[t - s];
		}
		lrv += 2.0 * (1.0 - static_cast<double>(s) / static_cast<double>(lags + 1)) * acc;
	}
	lrv /= nn;
	if (!(lrv > 1e-300) || gamma0 <= 1e-20 * std::max(1.0, mean * mean) * nn) {
		return 0.0;
	}
	return eta / (nn * nn * lrv);
}

/// Number of first differences until the KPSS statistic drops to the critical value.
inline int select_d(std::span<const double> x, int max_d = 2, double critical = 0.463) {
	std::vector<double> cur(x.begin(), x.end());
	int d = 0;
	while (d < max_d && cur.size() >= 12 && kpss_stat(cur) > critical) {
		cur = difference(cur, 1, 0, 1);
		++d;
	}
	return d;
}

/// Strength of seasonality, max(0, 1 - Var(remainder)/Var(detrended)), from a
/// moving-average trend and per-phase seasonal means.
inline double seasonal_strength(std::span<const double> y, int m) {
	if (m <= 1) {
		return 0.0;
	}
	const auto period = static_cast<std::size_t>(m);
	const std::size_t n = y.size();
	if (n < 2 * period) {
		fail(ErrorCode::series_too_short, "seasonal strength needs at least two full periods");
	}
	// centred moving average of window m (2 x m for even m)
	const std::size_t half = period / 2;
	std::vector<double> detrended;
	std::vector<std::size_t> phase;
	detrended.reserve(n);
	phase.reserve(n);
	double window = 0.0;
	for (std::size_t t = half; t + half < n; ++t) {
		double trend = 0.0;
		if (period % 2 == 1) {
			if (t == half) {
				for (std::size_t j = 0; j < period; ++j) {
					window += y[j];
				}
			} else {
				window += y[t + half] - y[t - half - 1];
			}
			trend = window / static_cast<double>(period);
		} else {
			if (t == half) {
				for (std::size_t j = t - half + 1; j < t + half; ++j) {
					window += y[j];
				}
			} else {
				window += y[t + half - 1] - y[t - half];
			}
			trend = (window + 0.5 * (y[t - half] + y[t + half])) / static_cast<double>(period);
		}
		detrended.push_back(y[t] - trend);
		phase.push_back(t % period);
	}
	std::vector<double> sums(period, 0.0);
	std::vector<double> counts(period, 0.0);
	for (std::size_t i = 0; i < detrended.size(); ++i) {
		sums[phase[i]] += detrended[i];
		counts[phase[i]] += 1.0;
	}
	std::vector<double> seasonal(period, 0.0);
	double seasonal_mean = 0.0;
	for (std::size_t j = 0; j < period; ++j) {
		seasonal[j] = counts[j] > 0.0 ? sums[j] / counts[j] : 0.0;
		seasonal_mean += seasonal[j] / static_cast<double>(period);
	}
	auto variance = [](const std::vector<double> &v) {
		const double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
		double acc = 0.0;
		for (double a : v) {
			acc += (a - mu) * (a - mu);
		}
		return acc / static_cast<double>(v.size());
	};
	std::vector<double> remainder(detrended.size());
	for (std::size_t i = 0; i < detrended.size(); ++i) {
		remainder[i] = detrended[i] - (seasonal[phase[i]] - seasonal_mean);
	}
	const double vd = variance(detrended);
	if (!(vd > 0.0)) {
		return 0.0;
	}
	return std::clamp(1.0 - variance(remainder) / vd, 0.0, 1.0);
}

inline int select_D(std::span<const double> y, int m, double threshold = 0.64) {
	if (m <= 1 || y.size() < 2 * static_cast<std::size_t>(m)) {
		return 0;
	}
	return seasonal_strength(y, m) > threshold ? 1 : 0;
}

} // namespace darima
