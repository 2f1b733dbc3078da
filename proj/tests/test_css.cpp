#include "darima/arima/css.hpp"
#include "darima/arima/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace darima;

namespace {

TimeSeries white_noise(std::size_t n, std::uint64_t seed, double mean = 0.0) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> z(mean, 1.0);
	std::vector<double> v(n);
	for (auto &x : v) {
		x = z(rng);
	}
	return TimeSeries(std::move(v));
}

} // namespace

TEST(Difference, FirstDifferenceOfRamp) {
	const std::vector<double> y{1, 2, 3, 4};
	EXPECT_EQ(difference(y, 1, 0, 1), (std::vector<double>{1, 1, 1}));
}

TEST(Difference, SeasonalLagTwo) {
	const std::vector<double> y{1, 2, 3, 4, 5, 6};
	EXPECT_EQ(difference(y, 0, 1, 2), (std::vector<double>{2, 2, 2, 2}));
}

TEST(Difference, MatchesPolynomialConvolution) {
	const std::vector<double> y{1, 4, 9, 16, 25, 36};
	const auto x = difference(y, 1, 1, 2);
	const auto poly = Polynomial::difference(1, 1) * Polynomial::difference(2, 1);
	ASSERT_EQ(x.size(), y.size() - 3);
	for (std::size_t t = 3; t < y.size(); ++t) {
		double v = 0.0;
		for (std::size_t j = 0; j <= poly.degree(); ++j) {
			v += poly[j] * y[t - j];
		}
		EXPECT_DOUBLE_EQ(x[t - 3], v);
	}
	EXPECT_THROW(difference(y, 2, 2, 2), Error);
}

TEST(CssResiduals, ZeroCoefficientAR1) {
	const std::vector<double> x{3, 1, 4, 1, 5};
	const ArimaOrders o{1, 0, 0, 0, 0, 0, 1};
	const auto e = css_residuals(x, o, {{0.0}, {}, {}, {}});
	for (std::size_t t = 1; t < x.size(); ++t) {
		EXPECT_EQ(e[t], x[t]);
	}
}

TEST(CssResiduals, MA1HandRecursion) {
	const std::vector<double> x{1, 0, 0};
	const ArimaOrders o{0, 0, 1, 0, 0, 0, 1};
	const auto e = css_residuals(x, o, {{}, {0.5}, {}, {}});
	EXPECT_DOUBLE_EQ(e[0], 1.0);
	EXPECT_DOUBLE_EQ(e[1], -0.5);
	EXPECT_DOUBLE_EQ(e[2], 0.25);
}

TEST(CssResiduals, SeasonalAR1) {
	const std::vector<double> x{1, 1, 1, 1};
	const ArimaOrders o{0, 0, 0, 1, 0, 0, 2};
	const auto e = css_residuals(x, o, {{}, {}, {0.5}, {}});
	EXPECT_DOUBLE_EQ(e[2], 0.5);
	EXPECT_DOUBLE_EQ(e[3], 0.5);
}

TEST(CssResiduals, MultiplicativeCrossTerm) {
	// (1 - 0.5B)(1 - 0.4B^2) x_t = e_t  =>  e_t = x_t - 0.5 x_{t-1} - 0.4 x_{t-2} + 0.2 x_{t-3}
	const std::vector<double> x{1.0, -2.0, 0.5, 3.0, 1.5, -1.0};
	const ArimaOrders o{1, 0, 0, 1, 0, 0, 2};
	const auto e = css_residuals(x, o, {{0.5}, {}, {0.4}, {}});
	for (std::size_t t = 3; t < x.size(); ++t) {
		EXPECT_NEAR(e[t], x[t] - 0.5 * x[t - 1] - 0.4 * x[t - 2] + 0.2 * x[t - 3], 1e-14);
	}
}

TEST(FitCss, WhiteNoiseMean) {
	const auto s = white_noise(2000, 42, 0.0);
	CssOptions opt;
	opt.constant = true;
	const auto fit = fit_css(s, ArimaOrders{0, 0, 0, 0, 0, 0, 1}, opt);
	EXPECT_TRUE(fit.has_mean);
	EXPECT_LT(std::abs(fit.mu0), 0.1);
	EXPECT_LT(std::abs(fit.sigma2 - 1.0), 0.15);
	EXPECT_EQ(fit.sigma2, fit.css / static_cast<double>(fit.n_obs));
}

TEST(FitCss, AR1Consistency) {
	std::mt19937_64 rng(7);
	const ArimaOrders o{1, 0, 0, 0, 0, 0, 1};
	const auto s = simulate_arima(o, {{0.6}, {}, {}, {}}, 5000, 100, 1.0, rng);
	CssOptions opt;
	opt.constant = true;
	const auto fit = fit_css(s, o, opt);
	ASSERT_EQ(fit.phi.size(), 1u);
	EXPECT_LT(std::abs(fit.phi[0] - 0.6), 0.05);
	EXPECT_EQ(fit.n_obs, 4999u);
	EXPECT_EQ(fit.sigma2, fit.css / static_cast<double>(fit.n_obs));
}

TEST(FitCss, SeasonalMA) {
	std::mt19937_64 rng(8);
	const ArimaOrders o{0, 0, 1, 0, 0, 1, 12};
	const auto s = simulate_arima(o, {{}, {0.4}, {}, {0.5}}, 4000, 120, 1.0, rng);
	const auto fit = fit_css(s, o, CssOptions{});
	EXPECT_NEAR(fit.theta[0], 0.4, 0.06);
	EXPECT_NEAR(fit.stheta[0], 0.5, 0.06);
}

TEST(FitCss, DriftOnRandomWalk) {
	std::mt19937_64 rng(9);
	std::normal_distribution<double> z(0.0, 1.0);
	std::vector<double> v(3000);
	double level = 0.0;
	for (auto &x : v) {
		level += 0.5 + z(rng);
		x = level;
	}
	CssOptions opt;
	opt.constant = true;
	const auto fit = fit_css(TimeSeries(v), ArimaOrders{0, 1, 0, 0, 0, 0, 1}, opt);
	EXPECT_TRUE(fit.has_drift);
	EXPECT_FALSE(fit.has_mean);
	EXPECT_NEAR(fit.mu1, 0.5, 0.07);
}

TEST(FitCss, OrdersExceedingLengthFail) {
	const auto s = white_noise(10, 1);
	try {
		fit_css(s, ArimaOrders{5, 1, 5, 0, 0, 0, 1}, CssOptions{});
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::series_too_short);
	}
}

TEST(FitCss, AiccFormula) {
	const double css = 123.0;
	const std::size_t n = 200;
	const int coef = 3;
	const double k = 4.0;
	EXPECT_DOUBLE_EQ(aicc_from_css(css, n, coef), 200.0 * std::log(css / 200.0) + 2.0 * k * 200.0 / (200.0 - k - 1.0));
}

TEST(FitCss, NestedModelsDoNotIncreaseCss) {
	std::mt19937_64 rng(21);
	const ArimaOrders gen{2, 0, 1, 0, 0, 0, 1};
	const auto s = simulate_arima(gen, {{0.5, -0.2}, {0.3}, {}, {}}, 1500, 100, 1.0, rng);
	CssOptions small_opt;
	const ArimaOrders small{1, 0, 0, 0, 0, 0, 1};
	const ArimaOrders big{2, 0, 0, 0, 0, 0, 1};
	const auto fs = fit_css(s, small, small_opt);
	CssOptions big_opt;
	big_opt.start = {fs.phi[0], 0.0};
	const auto fb = fit_css(s, big, big_opt);
	// compare on the common conditioning window
	const std::vector<double> x(s.values().begin(), s.values().end());
	const auto es = css_residuals(x, big, {{fs.phi[0], 0.0}, {}, {}, {}});
	double css_small = 0.0;
	for (std::size_t t = 2; t < es.size(); ++t) {
		css_small += es[t] * es[t];
	}
	EXPECT_LE(fb.css, css_small + 1e-8);
}

TEST(FitCss, RandomDgpResidualsAreFinite) {
	std::mt19937_64 rng(1234);
	for (int draw = 0; draw < 200; ++draw) {
		const auto g = draw_random_dgp(7, rng);
		const auto s = simulate_arima(g, 400, 70, 1.0, rng);
		const auto x = difference(s.values(), g.orders.d, g.orders.D, g.orders.m);
		const auto e = css_residuals(x, g.orders, g.coef);
		double css = 0.0;
		for (double v : e) {
			css += v * v;
		}
		EXPECT_TRUE(std::isfinite(css)) << g.orders.to_string();
	}
}
