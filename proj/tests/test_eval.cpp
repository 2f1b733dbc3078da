#include "darima/arima/simulate.hpp"
#include "darima/eval/benchmark.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace darima;

namespace {

std::vector<double> scaled(const std::vector<double> &v, double c) {
	std::vector<double> out(v);
	for (auto &x : out) {
		x *= c;
	}
	return out;
}

SelectionConfig small_search() {
	SelectionConfig c;
	c.max_p = 2;
	c.max_q = 2;
	c.max_P = 1;
	c.max_Q = 1;
	c.max_order = 3;
	return c;
}

TimeSeries seasonal_series(std::uint64_t seed, std::size_t T, int m) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> noise(0.0, 1.0);
	std::vector<double> y(T);
	double level = 0.0;
	for (std::size_t t = 0; t < T; ++t) {
		level = 0.7 * level + noise(rng);
		y[t] = 10.0 + 3.0 * std::sin(2.0 * M_PI * static_cast<double>(t % static_cast<std::size_t>(m)) / m) + level;
	}
	return TimeSeries(y, m);
}

} // namespace

TEST(Mase, HandExample) {
	const std::vector<double> train{1, 2, 3, 4};
	const std::vector<double> actual{5, 6};
	const std::vector<double> fc{4, 4};
	EXPECT_EQ(mase(actual, fc, train, 1), 1.5);
}

TEST(Mase, SeasonalNaiveTwoPass) {
	const int m = 7;
	const auto s = seasonal_series(3, 200, m);
	const auto [train, test] = train_test_split(s, 21);
	const auto fc = seasonal_naive_forecast(train, 21, std::vector<double>{0.95});
	double test_mae = 0.0;
	for (std::size_t h = 0; h < 21; ++h) {
		test_mae += std::abs(test[h] - train[train.size() - 7 + h % 7]);
	}
	test_mae /= 21.0;
	double train_mae = 0.0;
	for (std::size_t t = 7; t < train.size(); ++t) {
		train_mae += std::abs(train[t] - train[t - 7]);
	}
	train_mae /= static_cast<double>(train.size() - 7);
	EXPECT_NEAR(mase(test.values(), fc.mean, train.values(), m), test_mae / train_mae, 1e-12);
}

TEST(Mase, ZeroDenominator) {
	const std::vector<double> train{2, 2, 2, 2};
	const std::vector<double> v{1};
	try {
		(void)mase(v, v, train, 1);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::undefined_metric);
	}
	EXPECT_THROW((void)msis(v, v, v, train, 1, 0.05), Error);
	const std::vector<double> too_short{1, 2};
	EXPECT_THROW((void)mase(v, v, too_short, 2), Error);
}

TEST(Msis, HandExample) {
	const std::vector<double> train{0, 1, 2};
	const std::vector<double> actual{3};
	const std::vector<double> lo{0};
	const std::vector<double> hi{2};
	EXPECT_EQ(msis(actual, lo, hi, train, 1, 0.05), 42.0);
}

TEST(Msis, NoPenaltyInsideInterval) {
	const std::vector<double> train{0, 2, 4, 6};
	const std::vector<double> actual{1, 2};
	const std::vector<double> lo{0, 1};
	const std::vector<double> hi{3, 2.5};
	EXPECT_DOUBLE_EQ(msis(actual, lo, hi, train, 1, 0.2), (3.0 + 1.5) / 2.0 / 2.0);
}

TEST(Msis, ShrinkingCoveringIntervalDecreases) {
	const std::vector<double> train{0, 1, 2};
	const std::vector<double> actual{0.0};
	double prev = 1e300;
	for (double w = 4.0; w >= 0.0; w -= 0.25) {
		const std::vector<double> lo{-w};
		const std::vector<double> hi{w};
		const double s = msis(actual, lo, hi, train, 1, 0.05);
		EXPECT_LT(s, prev);
		prev = s;
	}
}

TEST(Msis, RejectsCrossedBounds) {
	const std::vector<double> train{0, 1, 2};
	const std::vector<double> a{1};
	const std::vector<double> lo{2};
	const std::vector<double> hi{1};
	EXPECT_THROW((void)msis(a, lo, hi, train, 1, 0.05), Error);
}

TEST(Acd, Examples) {
	const std::vector<double> a{0, 1, 2, 3};
	const std::vector<double> lo{-1, -1, -1, -1};
	const std::vector<double> hi{1.5, 1.5, 1.5, 1.5};
	EXPECT_DOUBLE_EQ(acd(a, lo, hi, 0.5), 0.0);
	EXPECT_DOUBLE_EQ(acd(a, lo, hi, 0.95), 0.45);
	const std::vector<double> wide{10, 10, 10, 10};
	EXPECT_NEAR(acd(a, lo, wide, 0.95), 0.05, 1e-15);
}

TEST(MetricProperties, ScaleInvarianceAndBounds) {
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> u(-10.0, 10.0);
	std::uniform_real_distribution<double> logc(-6.0, 6.0);
	std::uniform_int_distribution<int> len(1, 30);
	std::uniform_int_distribution<int> period(1, 4);
	for (int rep = 0; rep < 1000; ++rep) {
		const int m = period(rng);
		std::vector<double> train(static_cast<std::size_t>(m + len(rng)));
		for (auto &x : train) {
			x = u(rng);
		}
		const auto H = static_cast<std::size_t>(len(rng));
		std::vector<double> actual(H);
		std::vector<double> fc(H);
		std::vector<double> lo(H);
		std::vector<double> hi(H);
		for (std::size_t i = 0; i < H; ++i) {
			actual[i] = u(rng);
			fc[i] = u(rng);
			const double a = u(rng);
			const double b = u(rng);
			lo[i] = std::min(a, b);
			hi[i] = std::max(a, b);
		}
		const double c = std::exp(logc(rng));
		const double m1 = mase(actual, fc, train, m);
		const double m2 = mase(scaled(actual, c), scaled(fc, c), scaled(train, c), m);
		EXPECT_NEAR(m2, m1, 1e-12 * m1);
		const double s1 = msis(actual, lo, hi, train, m, 0.05);
		const double s2 = msis(scaled(actual, c), scaled(lo, c), scaled(hi, c), scaled(train, c), m, 0.05);
		EXPECT_NEAR(s2, s1, 1e-12 * s1);
		// powers of two scale without rounding
		EXPECT_EQ(mase(scaled(actual, 8.0), scaled(fc, 8.0), scaled(train, 8.0), m), m1);

		EXPECT_GE(m1, 0.0);
		double width = 0.0;
		for (std::size_t i = 0; i < H; ++i) {
			width += hi[i] - lo[i];
		}
		width /= static_cast<double>(H);
		EXPECT_GE(s1, width / seasonal_naive_scale(train, m) * (1.0 - 1e-12));
		const double d = acd(actual, lo, hi, 0.8);
		EXPECT_GE(d, 0.0);
		EXPECT_LE(d, 0.8);
	}
}

TEST(HorizonSlices, KnownAndUnknownFrequencies) {
	auto s = horizon_slices(1000, 24);
	EXPECT_TRUE(s.split);
	EXPECT_EQ(s.short_last, 672u);
	EXPECT_EQ(s.long_first, 672u);
	EXPECT_EQ(s.long_last, 1000u);
	s = horizon_slices(60, 7);
	EXPECT_EQ(s.short_last, 28u);
	s = horizon_slices(2000, 48);
	EXPECT_EQ(s.short_last, 1344u);
	s = horizon_slices(10, 24);
	EXPECT_EQ(s.short_last, 10u);
	EXPECT_EQ(s.long_last, s.long_first);
	EXPECT_FALSE(horizon_slices(100, 12).split);
	EXPECT_TRUE(horizon_slices(100, "hourly").split);
	EXPECT_FALSE(horizon_slices(100, "weekly").split);
	EXPECT_THROW((void)horizon_slices(0, 24), Error);
}

TEST(SeasonalNaive, ForecastShape) {
	const TimeSeries train({1, 2, 3, 1.5, 2.5, 3.5}, 3);
	const auto fc = seasonal_naive_forecast(train, 7, std::vector<double>{0.95});
	const std::vector<double> expect{1.5, 2.5, 3.5, 1.5, 2.5, 3.5, 1.5};
	EXPECT_EQ(fc.mean, expect);
	EXPECT_DOUBLE_EQ(fc.sigma_h[0], 0.5);
	EXPECT_DOUBLE_EQ(fc.sigma_h[3], 0.5 * std::sqrt(2.0));
	EXPECT_DOUBLE_EQ(fc.sigma_h[6], 0.5 * std::sqrt(3.0));
	EXPECT_LT(fc.lower[0][0], 1.5);
	EXPECT_GT(fc.upper[0][0], 1.5);
}

TEST(Benchmark, SingleSubseriesMatchesArima) {
	BenchmarkConfig cfg;
	cfg.H = 56;
	cfg.K = 1;
	cfg.p_star = 200;
	cfg.selection = small_search();
	cfg.selection.stepwise = false;
	const std::vector<BenchmarkSeries> data{{"a", seasonal_series(1, 400, 7)}, {"b", seasonal_series(2, 400, 7)}};
	const auto report = benchmark(data, cfg);
	ASSERT_EQ(report.n_failed, 0u);
	ASSERT_EQ(report.results.size(), 8u);
	for (std::size_t i = 0; i < 2; ++i) {
		const auto &d = report.results[4 * i];
		const auto &sa = report.results[4 * i + 1];
		const auto &ar = report.results[4 * i + 2];
		ASSERT_EQ(d.method, Method::darima);
		ASSERT_EQ(ar.method, Method::arima);
		ASSERT_EQ(d.slices.size(), 3u);
		for (std::size_t j = 0; j < d.slices.size(); ++j) {
			EXPECT_EQ(d.slices[j].mase, ar.slices[j].mase);
			EXPECT_EQ(d.slices[j].msis, ar.slices[j].msis);
			EXPECT_NEAR(sa.slices[j].msis, ar.slices[j].msis, 1e-12 * ar.slices[j].msis);
		}
	}
	// four methods, three slices each
	EXPECT_EQ(report.rows.size(), 12u);
	EXPECT_EQ(report.timings.size(), 4u);
	for (const auto &r : report.rows) {
		EXPECT_EQ(r.n_series, 2u);
		EXPECT_GE(r.acd, 0.0);
		EXPECT_LE(r.acd, 0.95);
	}
	std::ostringstream csv;
	write_scores_csv(csv, report);
	EXPECT_EQ(csv.str().rfind("method,slice,n_series,mase_mean", 0), 0u);
	EXPECT_NE(format_report(report).find("DARIMA_SA"), std::string::npos);
}

TEST(Benchmark, FailedSeriesAreCountedAndExcluded) {
	BenchmarkConfig cfg;
	cfg.H = 14;
	cfg.K = 2;
	cfg.p_star = 100;
	cfg.selection = small_search();
	cfg.methods = {Method::darima, Method::snaive};
	std::vector<double> flat(300, 5.0);
	flat.back() = 6.0;
	const std::vector<BenchmarkSeries> data{{"good", seasonal_series(4, 300, 7)}, {"flat", TimeSeries(flat, 7)}};
	const auto report = benchmark(data, cfg);
	EXPECT_EQ(report.n_failed, 2u);
	for (const auto &r : report.results) {
		EXPECT_EQ(r.failed, r.name == "flat");
		if (r.failed) {
			EXPECT_NE(r.error.find("undefined-metric"), std::string::npos);
		}
	}
	for (const auto &r : report.rows) {
		EXPECT_EQ(r.n_series, 1u);
	}
	for (const auto &t : report.timings) {
		EXPECT_EQ(t.n_failed, 1u);
	}
}

TEST(DefaultK, Policy) {
	EXPECT_EQ(cluster::default_subseries_count(20000, 24), 28u);
	EXPECT_EQ(cluster::default_subseries_count(500, 24), 1u);
	for (std::size_t T : {1500u, 5000u, 20000u, 100000u, 124171u}) {
		const auto K = cluster::default_subseries_count(T, 24);
		EXPECT_GE(T / K, 500u);
		EXPECT_LE(T / K, 1200u);
	}
	EXPECT_EQ(cluster::default_subseries_count(2100, 7), 10u);
	EXPECT_GE(5000 / cluster::default_subseries_count(5000, 12), 360u);
	EXPECT_EQ(cluster::default_subseries_count(50, 1), 1u);
}
