#pragma once

#include "darima/arima/auto.hpp"
#include "darima/cluster/job.hpp"
#include "darima/eval/metrics.hpp"
#include "darima/forecast.hpp"
#include "darima/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace darima {

enum class Method { darima, darima_sa, arima, snaive };

inline const char *method_name(Method m) {
	switch (m) {
	case Method::darima: return "DARIMA";
	case Method::darima_sa: return "DARIMA_SA";
	case Method::arima: return "ARIMA";
	case Method::snaive: return "SNAIVE";
	}
	return "?";
}

inline Method parse_method(const std::string &name) {
	for (Method m : {Method::darima, Method::darima_sa, Method::arima, Method::snaive}) {
		if (name == method_name(m)) {
			return m;
		}
	}
	fail(ErrorCode::invalid_argument, "unknown method '" + name + "'");
}

/// Seasonal-naive point forecasts with normal intervals whose SD grows with
/// the number of completed seasons, sigma_h = sigma sqrt(floor((h-1)/m) + 1).
inline ForecastResult seasonal_naive_forecast(const TimeSeries &train, std::size_t H, std::span<const double> levels) {
	const auto m = static_cast<std::size_t>(train.period());
	const std::size_t T = train.size();
	if (H < 1) {
		fail(ErrorCode::invalid_argument, "forecast horizon must be >= 1");
	}
	if (T <= m) {
		fail(ErrorCode::series_too_short, "seasonal naive needs more than one season of history");
	}
	double s2 = 0.0;
	for (std::size_t t = m; t < T; ++t) {
		const double e = train[t] - train[t - m];
		s2 += e * e;
	}
	s2 /= static_cast<double>(T - m);
	ForecastResult out;
	out.levels.assign(levels.begin(), levels.end());
	out.mean.resize(H);
	out.sigma_h.resize(H);
	for (std::size_t h = 0; h < H; ++h) {
		out.mean[h] = train[T - m + h % m];
		out.sigma_h[h] = std::sqrt(s2 * static_cast<double>(h / m + 1));
	}
	for (double level : out.levels) {
		if (!(level > 0.0 && level < 1.0)) {
			fail(ErrorCode::invalid_argument, "confidence levels must lie in (0,1)");
		}
		const double z = normal_quantile(0.5 + level / 2.0);
		std::vector<double> lo(H);
		std::vector<double> hi(H);
		for (std::size_t h = 0; h < H; ++h) {
			lo[h] = out.mean[h] - z * out.sigma_h[h];
			hi[h] = out.mean[h] + z * out.sigma_h[h];
		}
		out.lower.push_back(std::move(lo));
		out.upper.push_back(std::move(hi));
	}
	return out;
}

struct BenchmarkSeries {
	std::string name;
	/// Training part followed by the H held-out observations.
	TimeSeries series;
};

struct BenchmarkConfig {
	std::size_t H = 0;
	/// 0 selects the default subseries count for each series.
	std::size_t K = 0;
	std::size_t p_star = kDefaultPStar;
	SelectionConfig selection;
	/// The whole-series ARIMA searches every admissible order unless this is set.
	bool arima_stepwise = false;
	cluster::Executor executor;
	std::vector<Method> methods{Method::darima, Method::darima_sa, Method::arima, Method::snaive};
	double level = 0.95;
	/// Keep each method's forecast in its SeriesResult.
	bool keep_forecasts = false;
};

struct SliceScore {
	std::string slice;
	double mase = 0.0;
	double msis = 0.0;
	std::size_t covered = 0;
	std::size_t steps = 0;
};

struct SeriesResult {
	std::string name;
	Method method = Method::darima;
	bool failed = false;
	std::string error;
	double elapsed_ms = 0.0;
	std::vector<SliceScore> slices;
	std::optional<ForecastResult> forecast;

	const SliceScore *find(const std::string &slice) const {
		for (const auto &s : slices) {
			if (s.slice == slice) {
				return &s;
			}
		}
		return nullptr;
	}
};

struct ScoreRow {
	Method method = Method::darima;
	std::string slice;
	std::size_t n_series = 0;
	double mase_mean = 0.0;
	double mase_median = 0.0;
	double mase_sd = 0.0;
	double msis_mean = 0.0;
	double msis_median = 0.0;
	double msis_sd = 0.0;
	/// |pooled coverage - nominal| over every series and step in the slice.
	double acd = 0.0;
};

struct TimingRow {
	Method method = Method::darima;
	std::size_t n_series = 0;
	std::size_t n_failed = 0;
	double total_ms = 0.0;
	double mean_ms = 0.0;
};

struct BenchmarkReport {
	double level = 0.95;
	std::vector<SeriesResult> results;
	std::vector<ScoreRow> rows;
	std::vector<TimingRow> timings;
	std::size_t n_failed = 0;
};

/// MASE, MSIS and coverage counts of one forecast on each horizon slice plus the total.
inline std::vector<SliceScore> score_forecast(const TimeSeries &train, std::span<const double> test,
                                              const ForecastResult &fc, std::size_t level_index) {
	const std::size_t H = test.size();
	if (fc.horizon() != H || level_index >= fc.levels.size()) {
		fail(ErrorCode::invalid_argument, "forecast does not match the test set");
	}
	const double scale = seasonal_naive_scale(train.values(), train.period());
	const double alpha = 1.0 - fc.levels[level_index];
	const auto &lo = fc.lower[level_index];
	const auto &hi = fc.upper[level_index];
	auto score = [&](const std::string &name, std::size_t first, std::size_t last) {
		const std::size_t n = last - first;
		const auto a = test.subspan(first, n);
		const auto f = std::span<const double>(fc.mean).subspan(first, n);
		const auto l = std::span<const double>(lo).subspan(first, n);
		const auto u = std::span<const double>(hi).subspan(first, n);
		SliceScore s;
		s.slice = name;
		s.mase = mase_scaled(a, f, scale);
		s.msis = msis_scaled(a, l, u, alpha, scale);
		s.steps = n;
		s.covered = static_cast<std::size_t>(std::llround(coverage(a, l, u) * static_cast<double>(n)));
		return s;
	};
	std::vector<SliceScore> out;
	const auto sl = horizon_slices(H, train.period());
	if (sl.split) {
		out.push_back(score("short", sl.short_first, sl.short_last));
		if (sl.long_last > sl.long_first) {
			out.push_back(score("long", sl.long_first, sl.long_last));
		}
	}
	out.push_back(score("total", 0, H));
	return out;
}

namespace detail {

inline double median_of(std::vector<double> v) {
	std::sort(v.begin(), v.end());
	const std::size_t n = v.size();
	return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double sd_of(const std::vector<double> &v, double mean) {
	if (v.size() < 2) {
		return 0.0;
	}
	double s = 0.0;
	for (double x : v) {
		s += (x - mean) * (x - mean);
	}
	return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline void summarise(BenchmarkReport &report, const std::vector<Method> &methods) {
	for (Method method : methods) {
		TimingRow timing;
		timing.method = method;
		std::vector<std::string> slices;
		for (const auto &r : report.results) {
			if (r.method != method) {
				continue;
			}
			++timing.n_series;
			timing.total_ms += r.elapsed_ms;
			if (r.failed) {
				++timing.n_failed;
				continue;
			}
			for (const auto &s : r.slices) {
				if (std::find(slices.begin(), slices.end(), s.slice) == slices.end()) {
					slices.push_back(s.slice);
				}
			}
		}
		timing.mean_ms = timing.n_series > 0 ? timing.total_ms / static_cast<double>(timing.n_series) : 0.0;
		report.timings.push_back(timing);

		for (const auto &slice : slices) {
			std::vector<double> mases;
			std::vector<double> msises;
			std::size_t covered = 0;
			std::size_t steps = 0;
			for (const auto &r : report.results) {
				if (r.method != method || r.failed) {
					continue;
				}
				if (const auto *s = r.find(slice)) {
					mases.push_back(s->mase);
					msises.push_back(s->msis);
					covered += s->covered;
					steps += s->steps;
				}
			}
			ScoreRow row;
			row.method = method;
			row.slice = slice;
			row.n_series = mases.size();
			row.mase_mean = std::accumulate(mases.begin(), mases.end(), 0.0) / static_cast<double>(mases.size());
			row.mase_median = median_of(mases);
			row.mase_sd = sd_of(mases, row.mase_mean);
			row.msis_mean = std::accumulate(msises.begin(), msises.end(), 0.0) / static_cast<double>(msises.size());
			row.msis_median = median_of(msises);
			row.msis_sd = sd_of(msises, row.msis_mean);
			row.acd = std::abs(static_cast<double>(covered) / static_cast<double>(steps) - report.level);
			report.rows.push_back(row);
		}
	}
}

} // namespace detail

/// Scores each requested method on every series: the last H observations are
/// held out, the rest is used for fitting. DARIMA and DARIMA_SA share one Map step;
/// both timings include it. A method failing on a series is counted and left
/// out of that method's score rows.
inline BenchmarkReport benchmark(const std::vector<BenchmarkSeries> &series, const BenchmarkConfig &config) {
	if (config.H < 1) {
		fail(ErrorCode::invalid_argument, "forecast horizon must be >= 1");
	}
	if (config.methods.empty()) {
		fail(ErrorCode::invalid_argument, "no methods selected");
	}
	config.selection.validate();
	using clock = std::chrono::steady_clock;
	const double levels[] = {config.level};
	auto wants = [&](Method m) {
		return std::find(config.methods.begin(), config.methods.end(), m) != config.methods.end();
	};

	BenchmarkReport report;
	report.level = config.level;
	for (const auto &item : series) {
		const auto [train, test_series] = train_test_split(item.series, config.H);
		const auto test = test_series.values();
		auto record = [&](Method method, double ms, auto &&make_forecast) {
			SeriesResult r;
			r.name = item.name;
			r.method = method;
			r.elapsed_ms = ms;
			try {
				ForecastResult fc = make_forecast();
				r.slices = score_forecast(train, test, fc, 0);
				if (config.keep_forecasts) {
					r.forecast = std::move(fc);
				}
			} catch (const std::exception &e) {
				r.failed = true;
				r.error = e.what();
			}
			report.results.push_back(std::move(r));
		};

		if (wants(Method::darima) || wants(Method::darima_sa)) {
			const std::size_t K = config.K > 0 ? config.K : cluster::default_subseries_count(train.size(), train.period());
			std::vector<cluster::FitTask> tasks;
			std::vector<LinearRep> reps;
			std::string map_error;
			auto t0 = clock::now();
			try {
				tasks = cluster::make_tasks(train, partition(train, K), config.selection, config.p_star);
				reps = cluster::reps_from_outcomes(cluster::run_tasks(tasks, config.executor), tasks);
			} catch (const std::exception &e) {
				map_error = e.what();
			}
			const double map_ms = cluster::detail::elapsed_ms(t0);
			for (const auto &[method, how] : {std::pair{Method::darima, cluster::Combiner::dlsa},
			                                 std::pair{Method::darima_sa, cluster::Combiner::simple_average}}) {
				if (!wants(method)) {
					continue;
				}
				std::optional<ForecastResult> fc;
				std::string error = map_error;
				t0 = clock::now();
				if (error.empty()) {
					try {
						fc = forecast(cluster::combine(reps, how), train, config.H, levels);
					} catch (const std::exception &e) {
						error = e.what();
					}
				}
				const double ms = map_ms + cluster::detail::elapsed_ms(t0);
				record(method, ms, [&]() -> ForecastResult {
					if (!fc) {
						throw std::runtime_error(error);
					}
					return *fc;
				});
			}
		}
		if (wants(Method::arima)) {
			std::optional<ForecastResult> fc;
			std::string error;
			const auto t0 = clock::now();
			try {
				SelectionConfig whole = config.selection;
				whole.stepwise = config.arima_stepwise;
				fc = forecast_benchmark_arima(auto_arima(train, whole), train, config.H, levels, config.p_star);
			} catch (const std::exception &e) {
				error = e.what();
			}
			record(Method::arima, cluster::detail::elapsed_ms(t0), [&]() -> ForecastResult {
				if (!fc) {
					throw std::runtime_error(error);
				}
				return *fc;
			});
		}
		if (wants(Method::snaive)) {
			const auto t0 = clock::now();
			std::optional<ForecastResult> fc;
			std::string error;
			try {
				fc = seasonal_naive_forecast(train, config.H, levels);
			} catch (const std::exception &e) {
				error = e.what();
			}
			record(Method::snaive, cluster::detail::elapsed_ms(t0), [&]() -> ForecastResult {
				if (!fc) {
					throw std::runtime_error(error);
				}
				return *fc;
			});
		}
	}
	for (const auto &r : report.results) {
		report.n_failed += r.failed ? 1 : 0;
	}
	detail::summarise(report, config.methods);
	return report;
}

inline void write_scores_csv(std::ostream &out, const BenchmarkReport &report) {
	out << "method,slice,n_series,mase_mean,mase_median,mase_sd,msis_mean,msis_median,msis_sd,acd\n";
	for (const auto &r : report.rows) {
		out << method_name(r.method) << ',' << r.slice << ',' << r.n_series;
		for (double v : {r.mase_mean, r.mase_median, r.mase_sd, r.msis_mean, r.msis_median, r.msis_sd, r.acd}) {
			out << ',' << detail::format_double(v);
		}
		out << '\n';
	}
}

inline void write_series_scores_csv(std::ostream &out, const BenchmarkReport &report) {
	out << "series,method,slice,mase,msis,covered,steps,error\n";
	for (const auto &r : report.results) {
		if (r.failed) {
			std::string msg = r.error;
			std::replace(msg.begin(), msg.end(), ',', ';');
			std::replace(msg.begin(), msg.end(), '\n', ' ');
			out << r.name << ',' << method_name(r.method) << ",,,,,," << msg << '\n';
			continue;
		}
		for (const auto &s : r.slices) {
			out << r.name << ',' << method_name(r.method) << ',' << s.slice << ',' << detail::format_double(s.mase)
			    << ',' << detail::format_double(s.msis) << ',' << s.covered << ',' << s.steps << ",\n";
		}
	}
}

inline void write_timings_csv(std::ostream &out, const BenchmarkReport &report) {
	out << "method,n_series,n_failed,total_ms,mean_ms\n";
	for (const auto &t : report.timings) {
		out << method_name(t.method) << ',' << t.n_series << ',' << t.n_failed << ','
		    << detail::format_double(t.total_ms) << ',' << detail::format_double(t.mean_ms) << '\n';
	}
}

/// Aligned plain-text tables of the score and timing rows.
inline std::string format_report(const BenchmarkReport &report) {
	std::ostringstream out;
	char buf[256];
	std::snprintf(buf, sizeof buf, "%-10s %-6s %4s %10s %10s %10s %10s %10s %10s %8s\n", "method", "slice", "n",
	              "MASE mean", "MASE med", "MASE sd", "MSIS mean", "MSIS med", "MSIS sd", "ACD");
	out << buf;
	for (const auto &r : report.rows) {
		std::snprintf(buf, sizeof buf, "%-10s %-6s %4zu %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f %8.4f\n",
		              method_name(r.method), r.slice.c_str(), r.n_series, r.mase_mean, r.mase_median, r.mase_sd,
		              r.msis_mean, r.msis_median, r.msis_sd, r.acd);
		out << buf;
	}
	out << '\n';
	std::snprintf(buf, sizeof buf, "%-10s %8s %8s %12s %12s\n", "method", "series", "failed", "total s", "mean s");
	out << buf;
	for (const auto &t : report.timings) {
		std::snprintf(buf, sizeof buf, "%-10s %8zu %8zu %12.3f %12.3f\n", method_name(t.method), t.n_series,
		              t.n_failed, t.total_ms / 1000.0, t.mean_ms / 1000.0);
		out << buf;
	}
	return out.str();
}

} // namespace darima
