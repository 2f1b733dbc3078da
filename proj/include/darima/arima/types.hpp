#pragma once

#include "darima/error.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace darima {

/// Seasonal ARIMA orders (p,d,q)(P,D,Q)_m.
struct ArimaOrders {
	int p = 0;
	int d = 0;
	int q = 0;
	int P = 0;
	int D = 0;
	int Q = 0;
	int m = 1;

	int arma_count() const noexcept { return p + q + P + Q; }
	/// Observations consumed by differencing.
	int diff_loss() const noexcept { return d + D * m; }
	/// Leading residuals excluded from the conditional sum of squares.
	int conditioning() const noexcept { return p + P * m; }

	std::string to_string() const {
		return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")(" +
		       std::to_string(P) + "," + std::to_string(D) + "," + std::to_string(Q) + ")_" + std::to_string(m);
	}

	friend bool operator==(const ArimaOrders &, const ArimaOrders &) = default;
	friend auto operator<=>(const ArimaOrders &, const ArimaOrders &) = default;
};

/// Limits and switches of the automatic order search.
struct SelectionConfig {
	int max_p = 5;
	int max_q = 5;
	int max_P = 2;
	int max_Q = 2;
	int max_order = 5;
	int max_d = 2;
	int max_D = 1;
	bool stepwise = true;
	// Search with a loose optimizer tolerance, then refit the winner at full tolerance.
	bool approx_ic = true;
	bool allow_drift = true;
	bool allow_mean = true;
	double root_tol = 1e-3;
	double kpss_critical = 0.463;
	double seasonal_threshold = 0.64;
	int max_models = 94;

	void validate() const {
		if (max_p < 0 || max_q < 0 || max_P < 0 || max_Q < 0 || max_order < 0) {
			fail(ErrorCode::invalid_argument, "selection maxima must be non-negative");
		}
		if (max_d < 0 || max_d > 2 || max_D < 0 || max_D > 1) {
			fail(ErrorCode::invalid_argument, "differencing limits must satisfy 0 <= max_d <= 2, 0 <= max_D <= 1");
		}
		if (!(root_tol > 0.0)) {
			fail(ErrorCode::invalid_argument, "root_tol must be positive");
		}
		if (max_models < 1) {
			fail(ErrorCode::invalid_argument, "max_models must be >= 1");
		}
	}

	friend bool operator==(const SelectionConfig &, const SelectionConfig &) = default;
};

/// A fitted seasonal ARIMA model.
///
/// mu0/mu1 are on the fit's local clock: observation i (1-based) of the fitted
/// series sits at local time i, i.e. global time origin + i - 1.
struct ArimaFit {
	ArimaOrders orders;
	std::vector<double> phi;
	std::vector<double> theta;
	std::vector<double> sphi;   // seasonal AR
	std::vector<double> stheta; // seasonal MA
	bool has_mean = false;
	bool has_drift = false;
	double mu0 = 0.0;
	double mu1 = 0.0;
	double sigma2 = 0.0;
	double css = 0.0;
	double aicc = 0.0;
	std::size_t n_obs = 0;
	std::size_t length = 0;
	std::int64_t origin = 1;
	bool fallback = false;

	int n_coefficients() const noexcept {
		return orders.arma_count() + (has_mean || has_drift ? 1 : 0);
	}
};

} // namespace darima
