#pragma once

#include "darima/cluster/coordinator.hpp"
#include "darima/cluster/worker.hpp"
#include "darima/combine.hpp"
#include "darima/forecast.hpp"
#include "darima/series.hpp"

#include <atomic>
#include <cmath>
#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace darima::cluster {

/// Where the Map step runs: a local thread pool or remote TCP workers.
struct Executor {
	enum class Kind { in_process, tcp };

	Kind kind = Kind::in_process;
	std::size_t threads = 1;
	std::vector<std::string> workers;
	/// Channel constructor for remote execution; TCP when empty.
	ChannelFactory channels;

	static Executor in_process(std::size_t threads = 1) {
		Executor e;
		e.threads = threads;
		return e;
	}
	static Executor tcp(std::vector<std::string> workers, ChannelFactory channels = {}) {
		Executor e;
		e.kind = Kind::tcp;
		e.workers = std::move(workers);
		e.channels = std::move(channels);
		return e;
	}
};

enum class Combiner { dlsa, simple_average };

struct StageTimings {
	double partition_ms = 0.0;
	double fit_ms = 0.0;
	double combine_ms = 0.0;
	double forecast_ms = 0.0;

	double total_ms() const noexcept { return partition_ms + fit_ms + combine_ms + forecast_ms; }
};

struct JobReport {
	ForecastResult forecast;
	CombinedModel model;
	std::vector<FitOutcome> outcomes;
	Partition partition;
	StageTimings timings;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
	return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

} // namespace detail

/// Subseries count used when none is given: about 30 days per subseries for
/// hourly data, otherwise at least 30 seasonal cycles and 100 observations each.
inline std::size_t default_subseries_count(std::size_t T, int m) {
	if (T == 0 || m < 1) {
		fail(ErrorCode::invalid_argument, "series length and period must be positive");
	}
	if (m == 24) {
		return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(T) / 720.0)));
	}
	const std::size_t target = std::max<std::size_t>(100, 30 * static_cast<std::size_t>(m));
	return std::max<std::size_t>(1, T / target);
}

inline std::vector<FitTask> make_tasks(const TimeSeries &series, const Partition &part, const SelectionConfig &selection,
                                       std::size_t p_star) {
	std::vector<FitTask> tasks;
	tasks.reserve(part.K);
	for (std::size_t k = 0; k < part.K; ++k) {
		const auto &b = part.bounds[k];
		FitTask t;
		t.k = static_cast<std::uint32_t>(k + 1);
		t.values.assign(series.data().begin() + static_cast<std::ptrdiff_t>(b.lbound - 1),
		                series.data().begin() + static_cast<std::ptrdiff_t>(b.ubound));
		t.origin = series.origin() + static_cast<std::int64_t>(b.lbound) - 1;
		t.period_m = series.period();
		t.selection = selection;
		t.p_star = p_star;
		tasks.push_back(std::move(t));
	}
	return tasks;
}

/// Runs the tasks on a local pool; the first failure (lowest k) fails the job.
inline std::vector<FitOutcome> run_in_process(const std::vector<FitTask> &tasks, std::size_t threads) {
	const std::size_t n = tasks.size();
	std::vector<std::optional<FitOutcome>> results(n);
	std::vector<std::optional<std::string>> errors(n);
	std::atomic<std::size_t> next{0};
	auto work = [&] {
		for (std::size_t i = next++; i < n; i = next++) {
			try {
				results[i] = execute_task(tasks[i]);
			} catch (const std::exception &e) {
				errors[i] = e.what();
			}
		}
	};
	const std::size_t count = std::max<std::size_t>(1, std::min(threads, n));
	if (count == 1) {
		work();
	} else {
		std::vector<std::thread> pool;
		pool.reserve(count);
		for (std::size_t t = 0; t < count; ++t) {
			pool.emplace_back(work);
		}
		for (auto &t : pool) {
			t.join();
		}
	}
	std::vector<FitOutcome> out;
	out.reserve(n);
	for (std::size_t i = 0; i < n; ++i) {
		if (errors[i]) {
			fail(ErrorCode::job_failed, "task k=" + std::to_string(tasks[i].k) + " failed: " + *errors[i]);
		}
		out.push_back(std::move(*results[i]));
	}
	std::sort(out.begin(), out.end(), [](const FitOutcome &a, const FitOutcome &b) { return a.k < b.k; });
	return out;
}

inline std::vector<FitOutcome> run_tasks(const std::vector<FitTask> &tasks, const Executor &executor) {
	if (executor.kind == Executor::Kind::in_process) {
		return run_in_process(tasks, executor.threads);
	}
	return coordinate(executor.workers, tasks, executor.channels ? executor.channels : tcp_channels());
}

/// Local estimators in the layout the combiners expect, with origins from the tasks.
inline std::vector<LinearRep> reps_from_outcomes(const std::vector<FitOutcome> &outcomes,
                                                 const std::vector<FitTask> &tasks) {
	if (outcomes.size() != tasks.size()) {
		fail(ErrorCode::job_failed, "expected " + std::to_string(tasks.size()) + " outcomes, got " +
		                                std::to_string(outcomes.size()));
	}
	std::vector<LinearRep> reps;
	reps.reserve(outcomes.size());
	for (std::size_t i = 0; i < outcomes.size(); ++i) {
		const auto &o = outcomes[i];
		const auto &t = tasks[i];
		if (o.k != t.k) {
			fail(ErrorCode::job_failed, "outcome for k=" + std::to_string(o.k) + " does not match task k=" +
			                                std::to_string(t.k));
		}
		if (o.theta.size() != t.p_star + 2 || !(o.sigma2 > 0.0)) {
			fail(ErrorCode::job_failed, "malformed outcome for k=" + std::to_string(o.k));
		}
		reps.push_back(LinearRep::from_theta(o.theta, t.p_star, o.sigma2, o.T_k, t.origin));
	}
	return reps;
}

inline CombinedModel combine(const std::vector<LinearRep> &reps, Combiner how) {
	return how == Combiner::dlsa ? dlsa_combine(reps) : simple_average_combine(reps);
}

/// Partition, fit every subseries, combine the local estimators and forecast H steps ahead.
inline JobReport run_job(const TimeSeries &series, std::size_t K, const SelectionConfig &selection, std::size_t p_star,
                         std::size_t H, std::span<const double> levels, const Executor &executor,
                         Combiner how = Combiner::dlsa) {
	selection.validate();
	if (p_star < 1) {
		fail(ErrorCode::invalid_argument, "p* must be >= 1");
	}
	JobReport report;
	auto t0 = std::chrono::steady_clock::now();
	report.partition = partition(series, K);
	const auto tasks = make_tasks(series, report.partition, selection, p_star);
	report.timings.partition_ms = detail::elapsed_ms(t0);

	t0 = std::chrono::steady_clock::now();
	report.outcomes = run_tasks(tasks, executor);
	report.timings.fit_ms = detail::elapsed_ms(t0);

	t0 = std::chrono::steady_clock::now();
	report.model = combine(reps_from_outcomes(report.outcomes, tasks), how);
	report.timings.combine_ms = detail::elapsed_ms(t0);

	t0 = std::chrono::steady_clock::now();
	report.forecast = forecast(report.model, series, H, levels);
	report.timings.forecast_ms = detail::elapsed_ms(t0);
	return report;
}

} // namespace darima::cluster
