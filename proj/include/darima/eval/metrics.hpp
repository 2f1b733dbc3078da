#pragma once

#include "darima/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>

namespace darima {

/// In-sample seasonal-naive MAE, (1/(T-m)) sum_{t=m+1}^{T} |y_t - y_{t-m}|.
inline double seasonal_naive_scale(std::span<const double> train, int m) {
	if (m < 1) {
		fail(ErrorCode::invalid_argument, "seasonal period must be >= 1");
	}
	const auto lag = static_cast<std::size_t>(m);
	if (train.size() <= lag) {
		fail(ErrorCode::undefined_metric, "training set must be longer than the seasonal period");
	}
	double s = 0.0;
	for (std::size_t t = lag; t < train.size(); ++t) {
		s += std::abs(train[t] - train[t - lag]);
	}
	s /= static_cast<double>(train.size() - lag);
	if (!(s > 0.0)) {
		fail(ErrorCode::undefined_metric, "seasonal-naive scale is zero");
	}
	return s;
}

namespace detail {

inline void check_lengths(std::size_t a, std::size_t b, const char *what) {
	if (a != b || a == 0) {
		fail(ErrorCode::invalid_argument, std::string(what) + " must be non-empty and of equal length");
	}
}

} // namespace detail

inline double mase_scaled(std::span<const double> actual, std::span<const double> forecast, double scale) {
	detail::check_lengths(actual.size(), forecast.size(), "actual and forecast");
	double s = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		s += std::abs(actual[i] - forecast[i]);
	}
	return s / static_cast<double>(actual.size()) / scale;
}

inline double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> train,
                   int m) {
	return mase_scaled(actual, forecast, seasonal_naive_scale(train, m));
}

inline double msis_scaled(std::span<const double> actual, std::span<const double> lower,
                          std::span<const double> upper, double alpha, double scale) {
	detail::check_lengths(actual.size(), lower.size(), "actual and lower");
	detail::check_lengths(actual.size(), upper.size(), "actual and upper");
	if (!(alpha > 0.0 && alpha < 1.0)) {
		fail(ErrorCode::invalid_argument, "alpha must lie in (0,1)");
	}
	const double penalty = 2.0 / alpha;
	double s = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (lower[i] > upper[i]) {
			fail(ErrorCode::invalid_argument, "lower bound above upper bound");
		}
		s += upper[i] - lower[i];
		if (actual[i] < lower[i]) {
			s += penalty * (lower[i] - actual[i]);
		} else if (actual[i] > upper[i]) {
			s += penalty * (actual[i] - upper[i]);
		}
	}
	return s / static_cast<double>(actual.size()) / scale;
}

/// Mean scaled interval score of a (1 - alpha) prediction interval.
inline double msis(std::span<const double> actual, std::span<const double> lower, std::span<const double> upper,
                   std::span<const double> train, int m, double alpha) {
	return msis_scaled(actual, lower, upper, alpha, seasonal_naive_scale(train, m));
}

/// Fraction of actuals inside [lower, upper].
inline double coverage(std::span<const double> actual, std::span<const double> lower, std::span<const double> upper) {
	detail::check_lengths(actual.size(), lower.size(), "actual and lower");
	detail::check_lengths(actual.size(), upper.size(), "actual and upper");
	std::size_t in = 0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		in += (actual[i] >= lower[i] && actual[i] <= upper[i]) ? 1 : 0;
	}
	return static_cast<double>(in) / static_cast<double>(actual.size());
}

/// Absolute coverage difference |coverage - nominal|.
inline double acd(std::span<const double> actual, std::span<const double> lower, std::span<const double> upper,
                  double nominal) {
	if (!(nominal > 0.0 && nominal < 1.0)) {
		fail(ErrorCode::invalid_argument, "nominal coverage must lie in (0,1)");
	}
	return std::abs(coverage(actual, lower, upper) - nominal);
}

struct HorizonSlices {
	/// Half-open step ranges [first, last) into the forecast horizon.
	std::size_t short_first = 0;
	std::size_t short_last = 0;
	std::size_t long_first = 0;
	std::size_t long_last = 0;
	/// False when the frequency has no known short window; only the total is reported.
	bool split = false;
};

/// Steps in four weeks for the frequencies with a known week length.
inline std::optional<std::size_t> four_week_steps(int m) {
	switch (m) {
	case 7: return 28;
	case 24: return 4 * 7 * 24;
	case 48: return 4 * 7 * 48;
	default: return std::nullopt;
	}
}

inline std::optional<int> period_for_label(const std::string &label) {
	if (label == "daily") {
		return 7;
	}
	if (label == "hourly") {
		return 24;
	}
	if (label == "half-hourly" || label == "half_hourly") {
		return 48;
	}
	return std::nullopt;
}

/// Short-term (first four weeks) and long-term (remaining) parts of an H-step horizon.
inline HorizonSlices horizon_slices(std::size_t H, int m) {
	if (H < 1) {
		fail(ErrorCode::invalid_argument, "horizon must be >= 1");
	}
	HorizonSlices s;
	const auto window = four_week_steps(m);
	if (!window) {
		s.short_last = 0;
		s.long_first = 0;
		s.long_last = 0;
		return s;
	}
	s.split = true;
	s.short_last = std::min(H, *window);
	s.long_first = s.short_last;
	s.long_last = H;
	return s;
}

inline HorizonSlices horizon_slices(std::size_t H, const std::string &frequency_label) {
	const auto m = period_for_label(frequency_label);
	return horizon_slices(H, m ? *m : 0);
}

} // namespace darima
