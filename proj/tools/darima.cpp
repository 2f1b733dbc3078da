#include "darima/darima.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

namespace {

using darima::ErrorCode;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct EngineConfig {
	std::size_t K = 0;
	std::size_t p_star = darima::kDefaultPStar;
	darima::SelectionConfig selection;
	std::size_t H = 0;
	std::vector<double> levels{0.95};
	std::string executor = "in-process";
	std::vector<std::string> workers;
	std::size_t threads = 1;
	std::uint64_t seed = 1;
	std::string input;
	std::string output;
	std::string column = "y";
	int period = 1;

	void validate() const {
		if (p_star < 1) {
			darima::fail(ErrorCode::invalid_argument, "--p-star must be >= 1");
		}
		for (double l : levels) {
			if (!(l > 0.0 && l < 1.0)) {
				darima::fail(ErrorCode::invalid_argument, "--levels must lie in (0,1)");
			}
		}
		if (threads < 1) {
			darima::fail(ErrorCode::invalid_argument, "--threads must be >= 1");
		}
		selection.validate();
	}

	darima::cluster::Executor make_executor() const {
		if (executor == "tcp") {
			return darima::cluster::Executor::tcp(workers);
		}
		return darima::cluster::Executor::in_process(threads);
	}
};

void add_search_options(CLI::App &cmd, EngineConfig &cfg) {
	auto &s = cfg.selection;
	const std::string g = "Model search";
	cmd.add_option("--max-p", s.max_p, "Largest non-seasonal AR order")->capture_default_str()->group(g);
	cmd.add_option("--max-q", s.max_q, "Largest non-seasonal MA order")->capture_default_str()->group(g);
	cmd.add_option("--max-P", s.max_P, "Largest seasonal AR order")->capture_default_str()->group(g);
	cmd.add_option("--max-Q", s.max_Q, "Largest seasonal MA order")->capture_default_str()->group(g);
	cmd.add_option("--max-order", s.max_order, "Largest p+q+P+Q")->capture_default_str()->group(g);
	cmd.add_option("--max-d", s.max_d, "Largest regular differencing order")->capture_default_str()->group(g);
	cmd.add_option("--max-D", s.max_D, "Largest seasonal differencing order")->capture_default_str()->group(g);
	cmd.add_option("--max-models", s.max_models, "Model budget of the stepwise search")
	    ->capture_default_str()
	    ->group(g);
	cmd.add_option("--stepwise", s.stepwise, "Stepwise (true) or exhaustive (false) order search")
	    ->capture_default_str()
	    ->group(g);
	cmd.add_option("--approx-ic", s.approx_ic, "Rank candidates by their CSS information criterion")
	    ->capture_default_str()
	    ->group(g);
	cmd.add_option("--drift", s.allow_drift, "Allow a drift term when d+D = 1")->capture_default_str()->group(g);
	cmd.add_option("--mean", s.allow_mean, "Allow a mean term when d+D = 0")->capture_default_str()->group(g);
}

void add_model_options(CLI::App &cmd, EngineConfig &cfg) {
	cmd.add_option("--k", cfg.K, "Number of subseries (0 picks one from the series length and period)")
	    ->capture_default_str();
	cmd.add_option("--p-star", cfg.p_star, "Order of the truncated AR representation")->capture_default_str();
	cmd.add_option("--levels", cfg.levels, "Prediction interval levels in (0,1)")
	    ->delimiter(',')
	    ->capture_default_str();
	cmd.add_option("--executor", cfg.executor, "Where subseries are fitted")
	    ->check(CLI::IsMember({"in-process", "tcp"}))
	    ->capture_default_str();
	cmd.add_option("--workers", cfg.workers, "Worker addresses host:port for the tcp executor")->delimiter(',');
	cmd.add_option("--threads", cfg.threads, "Threads of the in-process executor")->capture_default_str();
	add_search_options(cmd, cfg);
}

json orders_json(const darima::ArimaOrders &o) {
	return json{{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}, {"m", o.m}};
}

json selection_json(const darima::SelectionConfig &s) {
	return json{{"max_p", s.max_p},
	            {"max_q", s.max_q},
	            {"max_P", s.max_P},
	            {"max_Q", s.max_Q},
	            {"max_order", s.max_order},
	            {"max_d", s.max_d},
	            {"max_D", s.max_D},
	            {"max_models", s.max_models},
	            {"stepwise", s.stepwise},
	            {"approx_ic", s.approx_ic},
	            {"allow_drift", s.allow_drift},
	            {"allow_mean", s.allow_mean}};
}

void write_text(const std::string &path, const std::string &text) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		darima::fail(ErrorCode::io_error, "cannot write " + path);
	}
	out << text;
	if (!out) {
		darima::fail(ErrorCode::io_error, "write to " + path + " failed");
	}
}

void ensure_dir(const std::string &dir) {
	std::error_code ec;
	fs::create_directories(dir, ec);
	if (ec) {
		darima::fail(ErrorCode::io_error, "cannot create directory " + dir + ": " + ec.message());
	}
}

int cmd_forecast(const EngineConfig &cfg, const std::string &report_path, bool with_timings, bool simple_average) {
	cfg.validate();
	if (cfg.H < 1) {
		darima::fail(ErrorCode::invalid_argument, "--horizon must be >= 1");
	}
	const auto series = darima::read_csv(cfg.input, cfg.column, cfg.period);
	const std::size_t K = cfg.K > 0 ? cfg.K : darima::cluster::default_subseries_count(series.size(), cfg.period);
	const auto how = simple_average ? darima::cluster::Combiner::simple_average : darima::cluster::Combiner::dlsa;
	const auto job =
	    darima::cluster::run_job(series, K, cfg.selection, cfg.p_star, cfg.H, cfg.levels, cfg.make_executor(), how);

	if (cfg.output.empty() || cfg.output == "-") {
		darima::write_forecast_csv(std::cout, job.forecast);
	} else {
		darima::write_forecast_csv(cfg.output, job.forecast);
	}
	if (!report_path.empty()) {
		json subseries = json::array();
		for (std::size_t i = 0; i < job.outcomes.size(); ++i) {
			const auto &o = job.outcomes[i];
			const auto &b = job.partition.bounds[i];
			json row{{"k", o.k},
			         {"lbound", b.lbound},
			         {"ubound", b.ubound},
			         {"orders", orders_json(o.orders)},
			         {"model", o.orders.to_string()},
			         {"fallback", o.fallback},
			         {"sigma2", o.sigma2},
			         {"T_k", o.T_k}};
			if (with_timings) {
				row["elapsed_ms"] = o.elapsed_ms;
			}
			subseries.push_back(std::move(row));
		}
		json report{{"input", cfg.input},
		            {"column", cfg.column},
		            {"T", series.size()},
		            {"period", cfg.period},
		            {"K", K},
		            {"p_star", cfg.p_star},
		            {"horizon", cfg.H},
		            {"levels", cfg.levels},
		            {"combiner", simple_average ? "simple-average" : "dlsa"},
		            {"executor", cfg.executor},
		            {"seed", cfg.seed},
		            {"selection", selection_json(cfg.selection)},
		            {"sigma_tilde2", job.model.sigma_tilde2},
		            {"beta0", job.model.beta0()},
		            {"beta1", job.model.beta1()},
		            {"subseries", std::move(subseries)}};
		if (cfg.executor == "tcp") {
			report["workers"] = cfg.workers;
		} else {
			report["threads"] = cfg.threads;
		}
		if (with_timings) {
			report["timings_ms"] = json{{"partition", job.timings.partition_ms},
			                            {"fit", job.timings.fit_ms},
			                            {"combine", job.timings.combine_ms},
			                            {"forecast", job.timings.forecast_ms},
			                            {"total", job.timings.total_ms()}};
		}
		write_text(report_path, report.dump(2) + "\n");
	}
	return 0;
}

struct SimulateOptions {
	int period = 24;
	std::size_t count = 1;
	std::size_t length = 0;
	std::size_t horizon = 0;
	/// Defaults to 10 seasonal cycles.
	std::optional<std::size_t> burnin;
	double noise_sd = 1.0;
	std::string prefix = "series";
};

/// Draws `count` random processes from one seeded stream.
std::vector<std::pair<darima::Dgp, darima::TimeSeries>> simulate_set(const SimulateOptions &opt, std::uint64_t seed) {
	if (opt.length < 1 || opt.count < 1) {
		darima::fail(ErrorCode::invalid_argument, "--length and --count must be >= 1");
	}
	if (opt.period < 1) {
		darima::fail(ErrorCode::invalid_argument, "--period must be >= 1");
	}
	const std::size_t burnin = opt.burnin.value_or(10 * static_cast<std::size_t>(opt.period));
	std::mt19937_64 rng(seed);
	std::vector<std::pair<darima::Dgp, darima::TimeSeries>> out;
	out.reserve(opt.count);
	for (std::size_t i = 0; i < opt.count; ++i) {
		auto g = darima::draw_random_dgp(opt.period, rng);
		auto s = darima::simulate_arima(g, opt.length + opt.horizon, burnin, opt.noise_sd, rng);
		out.emplace_back(std::move(g), std::move(s));
	}
	return out;
}

std::string series_name(const std::string &prefix, std::size_t i) {
	char buf[16];
	std::snprintf(buf, sizeof buf, "_%04zu", i + 1);
	return prefix + buf;
}

int cmd_simulate(const SimulateOptions &opt, std::uint64_t seed, const std::string &out_dir) {
	const auto set = simulate_set(opt, seed);
	ensure_dir(out_dir);
	json meta{{"seed", seed},
	          {"period", opt.period},
	          {"count", opt.count},
	          {"length", opt.length},
	          {"horizon", opt.horizon},
	          {"burnin", opt.burnin.value_or(10 * static_cast<std::size_t>(opt.period))},
	          {"noise_sd", opt.noise_sd}};
	json items = json::array();
	for (std::size_t i = 0; i < set.size(); ++i) {
		const auto &[g, s] = set[i];
		const std::string name = series_name(opt.prefix, i);
		darima::write_series_csv((fs::path(out_dir) / (name + ".csv")).string(), s);
		items.push_back(json{{"name", name},
		                     {"file", name + ".csv"},
		                     {"orders", orders_json(g.orders)},
		                     {"phi", g.coef.phi},
		                     {"theta", g.coef.theta},
		                     {"sphi", g.coef.sphi},
		                     {"stheta", g.coef.stheta},
		                     {"roots_ok", darima::dgp_roots_ok(g)}});
	}
	meta["series"] = std::move(items);
	write_text((fs::path(out_dir) / "metadata.json").string(), meta.dump(2) + "\n");
	return 0;
}

int cmd_bench(const EngineConfig &cfg, const std::vector<std::string> &inputs, const SimulateOptions &sim,
              const std::vector<std::string> &methods, const std::string &forecasts_dir, bool arima_stepwise) {
	cfg.validate();
	darima::BenchmarkConfig bc;
	bc.H = cfg.H;
	bc.K = cfg.K;
	bc.p_star = cfg.p_star;
	bc.selection = cfg.selection;
	bc.arima_stepwise = arima_stepwise;
	bc.executor = cfg.make_executor();
	bc.keep_forecasts = !forecasts_dir.empty();
	if (cfg.levels.size() != 1) {
		darima::fail(ErrorCode::invalid_argument, "bench scores a single interval level");
	}
	bc.level = cfg.levels.front();
	if (!methods.empty()) {
		bc.methods.clear();
		for (const auto &m : methods) {
			bc.methods.push_back(darima::parse_method(m));
		}
	}

	std::vector<darima::BenchmarkSeries> data;
	if (!inputs.empty()) {
		for (const auto &path : inputs) {
			data.push_back({fs::path(path).stem().string(), darima::read_csv(path, cfg.column, cfg.period)});
		}
	} else {
		SimulateOptions s = sim;
		s.horizon = cfg.H;
		for (auto &[g, series] : simulate_set(s, cfg.seed)) {
			data.push_back({series_name(s.prefix, data.size()), std::move(series)});
		}
	}
	const auto report = darima::benchmark(data, bc);

	std::cout << darima::format_report(report);
	if (report.n_failed > 0) {
		std::cout << "\nfailed runs: " << report.n_failed << '\n';
		for (const auto &r : report.results) {
			if (r.failed) {
				std::cout << "  " << r.name << ' ' << darima::method_name(r.method) << ": " << r.error << '\n';
			}
		}
	}
	if (!cfg.output.empty()) {
		ensure_dir(cfg.output);
		std::ostringstream scores;
		darima::write_scores_csv(scores, report);
		write_text((fs::path(cfg.output) / "scores.csv").string(), scores.str());
		std::ostringstream per_series;
		darima::write_series_scores_csv(per_series, report);
		write_text((fs::path(cfg.output) / "series_scores.csv").string(), per_series.str());
		std::ostringstream timings;
		darima::write_timings_csv(timings, report);
		write_text((fs::path(cfg.output) / "timings.csv").string(), timings.str());
	}
	if (!forecasts_dir.empty()) {
		ensure_dir(forecasts_dir);
		for (const auto &r : report.results) {
			if (r.forecast) {
				const auto file = r.name + "_" + darima::method_name(r.method) + ".csv";
				darima::write_forecast_csv((fs::path(forecasts_dir) / file).string(), *r.forecast);
			}
		}
	}
	return 0;
}

void print_error(ErrorCode code, std::string message) {
	const std::string prefix = std::string(darima::to_string(code)) + ": ";
	if (message.rfind(prefix, 0) == 0) {
		message.erase(0, prefix.size());
	}
	json err{{"error", {{"code", std::string(darima::to_string(code))}, {"message", message}}}};
	std::cerr << err.dump() << '\n';
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Distributed ARIMA forecasting: fit subseries, combine, forecast"};
	app.require_subcommand(1);
	app.fallthrough();
	app.set_config("--config", "", "Config file of key = value lines, one [section] per command")
	    ->envname("DARIMA_CONFIG");
	app.allow_config_extras(CLI::config_extras_mode::error);
	app.set_version_flag("--version", "darima 0.1.0");

	EngineConfig cfg;

	auto *forecast = app.add_subcommand("forecast", "Fit a series by subseries and write H-step forecasts");
	std::string report_path;
	bool with_timings = false;
	bool simple_average = false;
	forecast->add_option("--input", cfg.input, "CSV file with a header row")->required();
	forecast->add_option("--output", cfg.output, "Forecast CSV (stdout when omitted)");
	forecast->add_option("--report", report_path, "Write a JSON job report here");
	forecast->add_flag("--timings", with_timings, "Include wall-clock timings in the report");
	forecast->add_option("--column", cfg.column, "Column holding the observations")->capture_default_str();
	forecast->add_option("--period,-m", cfg.period, "Seasonal period")->capture_default_str();
	forecast->add_option("--horizon", cfg.H, "Forecast horizon")->required();
	forecast->add_flag("--simple-average", simple_average, "Average subseries estimates instead of DLSA weighting");
	forecast->add_option("--seed", cfg.seed, "Recorded in the report; the fit is deterministic")
	    ->capture_default_str();
	add_model_options(*forecast, cfg);

	auto *simulate = app.add_subcommand("simulate", "Write random seasonal ARIMA series and their generating models");
	SimulateOptions sim;
	std::string out_dir;
	std::uint64_t sim_seed = 1;
	simulate->add_option("--period,-m", sim.period, "Seasonal period")->required();
	simulate->add_option("--count", sim.count, "Number of series")->capture_default_str();
	simulate->add_option("--length", sim.length, "Observations per series before the horizon")->required();
	simulate->add_option("--horizon", sim.horizon, "Extra observations appended for testing")
	    ->capture_default_str();
	simulate->add_option("--burnin", sim.burnin, "Discarded start-up observations (default 10 periods)");
	simulate->add_option("--noise-sd", sim.noise_sd, "Innovation standard deviation")->capture_default_str();
	simulate->add_option("--prefix", sim.prefix, "File name prefix")->capture_default_str();
	simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
	simulate->add_option("--output", out_dir, "Output directory")->required();

	auto *bench = app.add_subcommand("bench", "Score DARIMA against whole-series ARIMA and seasonal naive");
	std::vector<std::string> bench_inputs;
	std::vector<std::string> bench_methods;
	std::string forecasts_dir;
	SimulateOptions bench_sim;
	bench_sim.count = 10;
	bench->add_option("--input", bench_inputs, "CSV files to score (simulated series when omitted)")
	    ->delimiter(',');
	bench->add_option("--output", cfg.output, "Directory for scores.csv, series_scores.csv and timings.csv");
	bench->add_option("--forecasts", forecasts_dir, "Directory for every method's forecast CSV");
	bench->add_option("--column", cfg.column, "Column holding the observations")->capture_default_str();
	bench->add_option("--period,-m", cfg.period, "Seasonal period of the input files")->capture_default_str();
	bench->add_option("--horizon", cfg.H, "Held-out observations per series")->required();
	bench->add_option("--methods", bench_methods, "Subset of DARIMA,DARIMA_SA,ARIMA,SNAIVE")->delimiter(',');
	bench->add_option("--count", bench_sim.count, "Simulated series")->capture_default_str();
	bench->add_option("--length", bench_sim.length, "Training length of each simulated series");
	bench->add_option("--sim-period", bench_sim.period, "Seasonal period of simulated series")
	    ->capture_default_str();
	bool arima_stepwise = false;
	bench->add_option("--arima-stepwise", arima_stepwise, "Stepwise order search for the whole-series ARIMA")
	    ->capture_default_str();
	bench->add_option("--seed", cfg.seed, "Seed of the simulated series")->capture_default_str();
	add_model_options(*bench, cfg);

	auto *worker = app.add_subcommand("worker", "Serve fit tasks over TCP until killed");
	std::string bind = "127.0.0.1:7070";
	worker->add_option("--bind", bind, "Listen address host:port")->capture_default_str();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		return app.exit(e);
	}

	try {
		if (*forecast) {
			return cmd_forecast(cfg, report_path, with_timings, simple_average);
		}
		if (*simulate) {
			return cmd_simulate(sim, sim_seed, out_dir);
		}
		if (*bench) {
			if (bench_inputs.empty() && bench_sim.length == 0) {
				darima::fail(ErrorCode::invalid_argument, "bench needs --input files or --length for simulated series");
			}
			if (bench_inputs.empty()) {
				cfg.period = bench_sim.period;
			}
			return cmd_bench(cfg, bench_inputs, bench_sim, bench_methods, forecasts_dir, arima_stepwise);
		}
		if (*worker) {
			std::cerr << "worker listening on " << bind << '\n';
			darima::cluster::serve_worker(bind);
		}
	} catch (const darima::Error &e) {
		print_error(e.code(), e.what());
		return 2;
	} catch (const std::exception &e) {
		print_error(ErrorCode::job_failed, e.what());
		return 2;
	}
	return 0;
}
