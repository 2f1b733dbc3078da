// Splits an hourly series into subseries, fits each one, combines the local
// estimators and prints a week of forecasts.
//
//   forecast_hourly [csv] [K]

#include "darima/darima.hpp"

#include <cstdio>
#include <string>

int main(int argc, char **argv) {
	const std::string path = argc > 1 ? argv[1] : DARIMA_SAMPLE_CSV;
	const std::size_t K = argc > 2 ? std::stoul(argv[2]) : 3;
	try {
		const auto series = darima::read_csv(path, "y", 24);
		const double levels[] = {0.8, 0.95};
		const auto job = darima::cluster::run_job(series, K, {}, 1000, 168, levels,
		                                          darima::cluster::Executor::in_process(2));

		std::printf("T = %zu, K = %zu\n", series.size(), K);
		for (const auto &o : job.outcomes) {
			std::printf("  subseries %u: %s, sigma2 = %.4f\n", o.k, o.orders.to_string().c_str(), o.sigma2);
		}
		std::printf("combined sigma2 = %.4f\n\n", job.model.sigma_tilde2);
		std::printf("%5s %12s %12s %12s\n", "step", "mean", "lower 95", "upper 95");
		for (std::size_t h = 0; h < job.forecast.horizon(); h += 12) {
			std::printf("%5zu %12.4f %12.4f %12.4f\n", h + 1, job.forecast.mean[h], job.forecast.lower[1][h],
			            job.forecast.upper[1][h]);
		}
	} catch (const darima::Error &e) {
		std::fprintf(stderr, "%s\n", e.what());
		return 1;
	}
	return 0;
}
