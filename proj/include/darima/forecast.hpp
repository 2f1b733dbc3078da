#pragma once

#include "darima/combine.hpp"
#include "darima/error.hpp"
#include "darima/linrep.hpp"
#include "darima/series.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace darima {

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley step against erfc, good to ~1e-15 relative in double precision.
inline double normal_quantile(double p) {
	if (!(p > 0.0 && p < 1.0)) {
		fail(ErrorCode::invalid_argument, "normal quantile needs 0 < p < 1");
	}
	static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
	                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
	static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
	                               6.680131188771972e+01,  -1.328068155288572e+01};
	static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
	                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
	static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
	                               3.754408661907416e+00};
	constexpr double p_low = 0.02425;
	double x = 0.0;
	if (p < p_low) {
		const double q = std::sqrt(-2.0 * std::log(p));
		x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
		    ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
	} else if (p <= 1.0 - p_low) {
		const double q = p - 0.5;
		const double r = q * q;
		x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
		    (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
	} else {
		const double q = std::sqrt(-2.0 * std::log1p(-p));
		x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
		    ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
	}
	const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
	const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
	return x - u / (1.0 + x * u / 2.0);
}

struct ForecastResult {
	std::vector<double> mean;
	std::vector<double> sigma_h;
	std::vector<double> levels;
	std::vector<std::vector<double>> lower; // one H-vector per level
	std::vector<std::vector<double>> upper;

	std::size_t horizon() const noexcept { return mean.size(); }
};

namespace diagnostics {

/// Number of interval forecasts whose invariants were verified in this process.
inline std::atomic<std::uint64_t> &forecasts_checked() {
	static std::atomic<std::uint64_t> counter{0};
	return counter;
}

} // namespace diagnostics

/// Future and past covariate values: values[j][i] is covariate j at global time first_index + i.
struct Covariates {
	std::int64_t first_index = 1;
	std::vector<std::vector<double>> values;

	double at(std::size_t j, std::int64_t t) const {
		const auto &v = values.at(j);
		if (t < first_index || t - first_index >= static_cast<std::int64_t>(v.size())) {
			fail(ErrorCode::missing_covariates, "covariate " + std::to_string(j + 1) + " has no value at t=" +
			                                        std::to_string(t));
		}
		return v[static_cast<std::size_t>(t - first_index)];
	}
};

/// Recursive h-step point forecasts from the global linear model: lagged
/// values come from the history when observed and from earlier forecasts otherwise.
inline std::vector<double> point_forecasts(const CombinedModel &model, const TimeSeries &history, std::size_t H,
                                           const std::optional<Covariates> &covariates = std::nullopt) {
	const std::size_t p = model.p_star;
	if (H < 1) {
		fail(ErrorCode::invalid_argument, "forecast horizon must be >= 1");
	}
	if (history.size() < p) {
		fail(ErrorCode::insufficient_history, "history of length " + std::to_string(history.size()) +
		                                          " is shorter than p* = " + std::to_string(p));
	}
	const std::size_t l = model.n_covariates();
	if (l > 0 && (!covariates || covariates->values.size() < l)) {
		fail(ErrorCode::missing_covariates, "model has " + std::to_string(l) + " covariates but none were supplied");
	}
	const auto pi = model.pi();
	const auto eta = model.eta();
	const std::int64_t T = history.last_index();

	// window[k] holds y at global time T - p + 1 + k
	std::vector<double> window(history.data().end() - static_cast<std::ptrdiff_t>(p), history.data().end());
	window.reserve(p + H);
	std::vector<double> out(H);
	for (std::size_t h = 1; h <= H; ++h) {
		const std::int64_t t = T + static_cast<std::int64_t>(h);
		double v = model.beta0() + model.beta1() * static_cast<double>(t);
		const std::size_t newest = window.size() - 1;
		for (std::size_t i = 1; i <= p; ++i) {
			v += pi[i - 1] * window[newest + 1 - i];
		}
		for (std::size_t j = 0; j < l; ++j) {
			double g = covariates->at(j, t);
			for (std::size_t i = 1; i <= p; ++i) {
				g -= pi[i - 1] * covariates->at(j, t - static_cast<std::int64_t>(i));
			}
			v += eta[j] * g;
		}
		out[h - 1] = v;
		window.push_back(v);
	}
	return out;
}

/// Normal prediction intervals with sigma_h^2 = sigma^2 (1 + sum_{i<h} psi_i^2).
inline ForecastResult interval_forecasts(const CombinedModel &model, std::vector<double> mean,
                                         std::span<const double> levels) {
	const std::size_t H = mean.size();
	if (H < 1) {
		fail(ErrorCode::invalid_argument, "forecast horizon must be >= 1");
	}
	for (double level : levels) {
		if (!(level > 0.0 && level < 1.0)) {
			fail(ErrorCode::invalid_argument, "confidence levels must lie in (0,1)");
		}
	}
	ForecastResult out;
	out.levels.assign(levels.begin(), levels.end());
	out.sigma_h.resize(H);
	const auto psi = ar_to_ma(model.pi(), H);
	double acc = 1.0;
	out.sigma_h[0] = std::sqrt(model.sigma_tilde2);
	for (std::size_t h = 2; h <= H; ++h) {
		acc += psi[h - 2] * psi[h - 2];
		out.sigma_h[h - 1] = std::sqrt(model.sigma_tilde2 * acc);
	}
	for (double level : out.levels) {
		const double z = normal_quantile(0.5 + level / 2.0);
		std::vector<double> lo(H);
		std::vector<double> hi(H);
		for (std::size_t h = 0; h < H; ++h) {
			lo[h] = mean[h] - z * out.sigma_h[h];
			hi[h] = mean[h] + z * out.sigma_h[h];
		}
		out.lower.push_back(std::move(lo));
		out.upper.push_back(std::move(hi));
	}
	out.mean = std::move(mean);

	// invariants every produced forecast must satisfy
	if (out.sigma_h[0] != std::sqrt(model.sigma_tilde2)) {
		fail(ErrorCode::job_failed, "one-step standard error differs from the global residual SD");
	}
	for (std::size_t h = 1; h < H; ++h) {
		if (!(out.sigma_h[h] >= out.sigma_h[h - 1])) {
			fail(ErrorCode::job_failed, "forecast standard errors decrease at h=" + std::to_string(h + 1));
		}
	}
	diagnostics::forecasts_checked().fetch_add(1, std::memory_order_relaxed);
	return out;
}

inline ForecastResult forecast(const CombinedModel &model, const TimeSeries &history, std::size_t H,
                               std::span<const double> levels,
                               const std::optional<Covariates> &covariates = std::nullopt) {
	return interval_forecasts(model, point_forecasts(model, history, H, covariates), levels);
}

/// Whole-series ARIMA forecast routed through its own linear representation (K = 1).
inline ForecastResult forecast_benchmark_arima(const ArimaFit &fit, const TimeSeries &history, std::size_t H,
                                               std::span<const double> levels, std::size_t p_star = kDefaultPStar) {
	const LinearRep rep = rep_from_fit(fit, p_star);
	const CombinedModel model = dlsa_combine(std::span<const LinearRep>(&rep, 1));
	return forecast(model, history, H, levels);
}

} // namespace darima
