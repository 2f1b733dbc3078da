// Runs the same job on a local thread pool and on two TCP workers started in
// this process, then compares the forecasts.

#include "darima/darima.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

int main() {
	std::mt19937_64 rng(2024);
	const auto dgp = darima::draw_random_dgp(24, rng);
	const auto series = darima::simulate_arima(dgp, 6000, 500, 1.0, rng);
	std::printf("simulated %s, T = %zu\n", dgp.orders.to_string().c_str(), series.size());

	const double levels[] = {0.95};
	const auto local = darima::cluster::run_job(series, 8, {}, 2000, 240, levels,
	                                            darima::cluster::Executor::in_process(2));

	darima::cluster::WorkerServer a;
	darima::cluster::WorkerServer b;
	const auto remote = darima::cluster::run_job(series, 8, {}, 2000, 240, levels,
	                                             darima::cluster::Executor::tcp({a.address(), b.address()}));

	double worst = 0.0;
	for (std::size_t h = 0; h < local.forecast.horizon(); ++h) {
		worst = std::max(worst, std::abs(local.forecast.mean[h] - remote.forecast.mean[h]));
	}
	std::printf("workers %s and %s answered %llu and %llu tasks\n", a.address().c_str(), b.address().c_str(),
	            static_cast<unsigned long long>(a.responses()), static_cast<unsigned long long>(b.responses()));
	std::printf("fit stage: %.1f ms local, %.1f ms over TCP\n", local.timings.fit_ms, remote.timings.fit_ms);
	std::printf("largest difference between the two forecasts: %g\n", worst);
	return 0;
}
