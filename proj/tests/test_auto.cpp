#include "darima/arima/auto.hpp"
#include "darima/arima/predict.hpp"
#include "darima/arima/simulate.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

using namespace darima;

namespace {

bool roots_ok(const ArimaFit &fit, double tol) {
	const auto m = static_cast<std::size_t>(fit.orders.m);
	return check_roots(fit.phi, tol, -1.0) && check_roots(fit.sphi, tol, -1.0, m) && check_roots(fit.theta, tol, 1.0) &&
	       check_roots(fit.stheta, tol, 1.0, m);
}

} // namespace

TEST(AutoArima, AR1ResidualVariance) {
	std::mt19937_64 rng(17);
	const ArimaOrders gen{1, 0, 0, 0, 0, 0, 1};
	const auto s = simulate_arima(gen, {{0.7}, {}, {}, {}}, 2000, 100, 1.0, rng);
	const auto fit = auto_arima(s);
	EXPECT_FALSE(fit.fallback);
	EXPECT_TRUE(roots_ok(fit, 1e-3));
	// one-step in-sample residual variance through the full recursion
	const auto fitted = arima_fitted(fit, s);
	double ss = 0.0;
	std::size_t n = 0;
	for (std::size_t t = 0; t < s.size(); ++t) {
		if (!std::isnan(fitted[t])) {
			ss += (s[t] - fitted[t]) * (s[t] - fitted[t]);
			++n;
		}
	}
	EXPECT_LT(std::abs(ss / static_cast<double>(n) - 1.0), 0.1);
	EXPECT_LT(std::abs(fit.sigma2 - 1.0), 0.1);
}

TEST(AutoArima, ConstantSeries) {
	const TimeSeries s(std::vector<double>(200, 4.5), 1);
	const auto fit = auto_arima(s);
	EXPECT_EQ(fit.orders, (ArimaOrders{0, 0, 0, 0, 0, 0, 1}));
	EXPECT_TRUE(fit.has_mean);
	EXPECT_EQ(fit.mu0, 4.5);
	EXPECT_GT(fit.sigma2, 0.0);
}

TEST(AutoArima, TooShort) {
	const TimeSeries s(std::vector<double>(30, 1.0), 12);
	try {
		auto_arima(s);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::series_too_short);
	}
}

TEST(AutoArima, HourlySubseriesWithinOrderLimits) {
	std::mt19937_64 rng(2024);
	const ArimaOrders gen{1, 0, 1, 1, 1, 1, 24};
	const auto s = simulate_arima(gen, {{0.5}, {0.3}, {0.3}, {-0.4}}, 800, 240, 1.0, rng);
	const SelectionConfig cfg;
	const auto start = std::chrono::steady_clock::now();
	const auto fit = auto_arima(s, cfg);
	const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	EXPECT_LE(fit.orders.p, cfg.max_p);
	EXPECT_LE(fit.orders.q, cfg.max_q);
	EXPECT_LE(fit.orders.P, cfg.max_P);
	EXPECT_LE(fit.orders.Q, cfg.max_Q);
	EXPECT_LE(fit.orders.arma_count(), cfg.max_order);
	EXPECT_EQ(fit.orders.m, 24);
	EXPECT_TRUE(roots_ok(fit, cfg.root_tol));
	EXPECT_LT(secs, 60.0);
}

TEST(AutoArima, ExhaustiveIsNoWorseThanStepwise) {
	std::mt19937_64 rng(77);
	const ArimaOrders gen{2, 0, 1, 0, 0, 0, 1};
	const auto s = simulate_arima(gen, {{0.4, 0.3}, {-0.5}, {}, {}}, 600, 100, 1.0, rng);
	SelectionConfig cfg;
	cfg.max_p = 3;
	cfg.max_q = 3;
	cfg.max_order = 4;
	cfg.approx_ic = false;
	const auto step = auto_arima(s, cfg);
	cfg.stepwise = false;
	const auto grid = auto_arima(s, cfg);
	EXPECT_LE(grid.aicc, step.aicc + 1e-9);
}

TEST(AutoArima, RandomDgpFitsAlwaysPassRootCheck) {
	std::mt19937_64 rng(99);
	for (int i = 0; i < 8; ++i) {
		const auto g = draw_random_dgp(7, rng);
		const auto s = simulate_arima(g, 300, 70, 1.0, rng);
		const auto fit = auto_arima(s);
		EXPECT_TRUE(roots_ok(fit, 1e-3)) << fit.orders.to_string();
		EXPECT_GT(fit.sigma2, 0.0);
		EXPECT_LE(fit.orders.d, 2);
		EXPECT_LE(fit.orders.D, 1);
	}
}

TEST(SelectionConfig, Validation) {
	SelectionConfig cfg;
	EXPECT_NO_THROW(cfg.validate());
	cfg.max_p = -1;
	EXPECT_THROW(cfg.validate(), Error);
}
