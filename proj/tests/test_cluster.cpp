#include "darima/arima/simulate.hpp"
#include "darima/cluster/job.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <map>
#include <random>

using namespace darima;
using namespace darima::cluster;

namespace {

TimeSeries seasonal_series(std::uint64_t seed, std::size_t T = 1400, int m = 7) {
	std::mt19937_64 rng(seed);
	const ArimaOrders o{1, 0, 1, 1, 0, 0, m};
	auto s = simulate_arima(o, {{0.5}, {0.3}, {0.6}, {}}, T, 10 * static_cast<std::size_t>(m), 1.0, rng);
	std::vector<double> v(s.values().begin(), s.values().end());
	for (auto &x : v) {
		x += 20.0;
	}
	return TimeSeries(v, m);
}

SelectionConfig small_search() {
	SelectionConfig cfg;
	cfg.max_p = 2;
	cfg.max_q = 2;
	cfg.max_P = 1;
	cfg.max_Q = 1;
	cfg.max_order = 3;
	return cfg;
}

bool same_bits(double a, double b) {
	return std::memcmp(&a, &b, sizeof a) == 0;
}

FitTask sample_task() {
	FitTask t;
	t.k = 7;
	t.values = {1.5, -0.0, std::numeric_limits<double>::denorm_min(), 1e308, 1.0 / 3.0};
	t.origin = -42;
	t.period_m = 24;
	t.selection = small_search();
	t.selection.root_tol = 0.125;
	t.p_star = 2000;
	return t;
}

/// Executes tasks in-process while counting exchanges per address.
struct CountingChannel : WorkerChannel {
	CountingChannel(std::string address, std::map<std::string, int> &calls, std::mutex &mu)
	    : address(std::move(address)), calls(calls), mu(mu) {}
	FitOutcome call(const FitTask &task) override {
		{
			std::lock_guard lk(mu);
			++calls[address];
		}
		return decode_outcome(encode(execute_task(task)));
	}
	static FitOutcome decode_outcome(const std::vector<std::uint8_t> &bytes) { return std::get<FitOutcome>(decode(bytes)); }
	std::string address;
	std::map<std::string, int> &calls;
	std::mutex &mu;
};

std::string closed_port_address() {
	const auto sock = listen_on({"127.0.0.1", 0});
	return "127.0.0.1:" + std::to_string(local_port(sock));
}

} // namespace

TEST(Protocol, TaskRoundTripIsBitExact) {
	const auto t = sample_task();
	const auto back = std::get<FitTask>(decode(encode(t)));
	EXPECT_EQ(back.k, t.k);
	EXPECT_EQ(back.origin, t.origin);
	EXPECT_EQ(back.period_m, t.period_m);
	EXPECT_EQ(back.p_star, t.p_star);
	EXPECT_EQ(back.selection, t.selection);
	ASSERT_EQ(back.values.size(), t.values.size());
	for (std::size_t i = 0; i < t.values.size(); ++i) {
		EXPECT_TRUE(same_bits(back.values[i], t.values[i])) << i;
	}
}

TEST(Protocol, OutcomeAndErrorRoundTrip) {
	FitOutcome o;
	o.k = 3;
	o.theta = {0.1, -2.5, 1e-300};
	o.sigma2 = 0.7;
	o.T_k = 827;
	o.orders = {2, 1, 1, 0, 1, 1, 24};
	o.fallback = true;
	o.elapsed_ms = 12.5;
	EXPECT_EQ(std::get<FitOutcome>(decode(encode(o))), o);
	const ErrorReply e{ErrorCode::series_too_short, 9, "too short"};
	EXPECT_EQ(std::get<ErrorReply>(decode(encode(e))), e);
}

TEST(Protocol, LayoutIsBigEndianLengthThenLittleEndianBody) {
	FitOutcome o;
	o.k = 0x01020304;
	o.theta = {};
	const auto payload = encode(o);
	ASSERT_GE(payload.size(), 6u);
	EXPECT_EQ(payload[0], kProtocolVersion);
	EXPECT_EQ(payload[1], static_cast<std::uint8_t>(MessageTag::fit_outcome));
	EXPECT_EQ(payload[2], 0x04);
	EXPECT_EQ(payload[5], 0x01);
	const auto framed = frame(payload);
	EXPECT_EQ(frame_length(framed.data()), payload.size());
	EXPECT_EQ(framed[3], static_cast<std::uint8_t>(payload.size() & 0xff));
	EXPECT_EQ(framed[0], 0);
	// sigma2 = 1.0 follows k as a little-endian IEEE double
	EXPECT_EQ(payload[6 + 7], 0x3f);
	EXPECT_EQ(payload[6 + 6], 0xf0);
}

TEST(Protocol, DecodeErrors) {
	auto payload = encode(sample_task());
	auto wrong_version = payload;
	wrong_version[0] = 9;
	try {
		decode(wrong_version);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::version_mismatch);
	}
	auto reserved = payload;
	reserved[1] = 4;
	EXPECT_THROW(decode(reserved), Error);
	auto unknown = payload;
	unknown[1] = 77;
	EXPECT_THROW(decode(unknown), Error);
	auto truncated = payload;
	truncated.pop_back();
	EXPECT_THROW(decode(truncated), Error);
	auto trailing = payload;
	trailing.push_back(0);
	EXPECT_THROW(decode(trailing), Error);
	EXPECT_THROW(decode({}), Error);
}

TEST(Worker, ExecuteTaskProducesRepresentation) {
	const auto s = seasonal_series(1, 600);
	FitTask t;
	t.k = 2;
	t.values.assign(s.values().begin(), s.values().end());
	t.origin = 601;
	t.period_m = 7;
	t.selection = small_search();
	t.p_star = 150;
	const auto o = execute_task(t);
	EXPECT_EQ(o.k, 2u);
	EXPECT_EQ(o.theta.size(), 152u);
	EXPECT_GT(o.sigma2, 0.0);
	EXPECT_EQ(o.T_k, 600u);
	EXPECT_EQ(o.orders.m, 7);
}

TEST(Worker, MalformedFrameGetsErrorAndConnectionSurvives) {
	WorkerServer server;
	auto sock = connect_to(parse_endpoint(server.address()));
	write_frame(sock.fd(), {1, 2, 3});
	std::vector<std::uint8_t> reply;
	ASSERT_TRUE(read_frame(sock.fd(), reply));
	const auto err = std::get<ErrorReply>(decode(reply));
	EXPECT_EQ(err.code, ErrorCode::protocol_error);

	auto bad_version = encode(sample_task());
	bad_version[0] = 2;
	write_frame(sock.fd(), bad_version);
	ASSERT_TRUE(read_frame(sock.fd(), reply));
	EXPECT_EQ(std::get<ErrorReply>(decode(reply)).code, ErrorCode::version_mismatch);

	const auto s = seasonal_series(2, 300);
	FitTask t;
	t.k = 5;
	t.values.assign(s.values().begin(), s.values().end());
	t.period_m = 7;
	t.selection = small_search();
	t.p_star = 60;
	write_frame(sock.fd(), encode(t));
	ASSERT_TRUE(read_frame(sock.fd(), reply));
	const auto out = std::get<FitOutcome>(decode(reply));
	auto expected = execute_task(t);
	expected.elapsed_ms = out.elapsed_ms;
	EXPECT_EQ(out, expected);
	EXPECT_EQ(server.requests(), 3u);
	EXPECT_EQ(server.responses(), 3u);

	// a failing fit comes back as a structured error carrying k
	t.values.resize(10);
	write_frame(sock.fd(), encode(t));
	ASSERT_TRUE(read_frame(sock.fd(), reply));
	const auto fit_err = std::get<ErrorReply>(decode(reply));
	EXPECT_EQ(fit_err.code, ErrorCode::series_too_short);
	EXPECT_EQ(fit_err.k, 5u);
}

TEST(Coordinate, OneRequestAndOneResponsePerTask) {
	const auto s = seasonal_series(3, 1400);
	const auto part = partition(s, 6);
	const auto tasks = make_tasks(s, part, small_search(), 100);
	std::map<std::string, int> calls;
	std::mutex mu;
	const ChannelFactory factory = [&](const std::string &a) { return std::make_unique<CountingChannel>(a, calls, mu); };
	std::vector<WorkerStats> stats;
	const auto out = coordinate({"a", "b", "c"}, tasks, factory, &stats);
	ASSERT_EQ(out.size(), 6u);
	int total = 0;
	for (const auto &[addr, c] : calls) {
		total += c;
	}
	EXPECT_EQ(total, 6);
	for (std::size_t i = 0; i < out.size(); ++i) {
		EXPECT_EQ(out[i].k, i + 1);
	}
	std::size_t completed = 0;
	for (const auto &st : stats) {
		completed += st.completed;
		EXPECT_EQ(st.failed, 0u);
	}
	EXPECT_EQ(completed, 6u);
}

TEST(Coordinate, RetriesOnceOnAnotherWorker) {
	struct Flaky : WorkerChannel {
		explicit Flaky(bool broken) : broken(broken) {}
		FitOutcome call(const FitTask &task) override {
			if (broken) {
				throw TransportError("simulated outage");
			}
			return execute_task(task);
		}
		bool broken;
	};
	const auto s = seasonal_series(4, 900);
	const auto tasks = make_tasks(s, partition(s, 3), small_search(), 60);
	const ChannelFactory factory = [](const std::string &a) { return std::make_unique<Flaky>(a == "bad"); };
	std::vector<WorkerStats> stats;
	const auto out = coordinate({"bad", "good"}, tasks, factory, &stats);
	EXPECT_EQ(out.size(), 3u);
	EXPECT_FALSE(stats[0].alive);
	EXPECT_EQ(stats[1].completed, 3u);

	// a task that fails everywhere fails the job after one retry, naming k
	auto broken = tasks;
	broken[1].values.resize(12);
	const ChannelFactory healthy = [](const std::string &) { return std::make_unique<Flaky>(false); };
	try {
		coordinate({"x", "y"}, broken, healthy);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::job_failed);
		EXPECT_NE(std::string(e.what()).find("k=2"), std::string::npos);
	}
}

TEST(Coordinate, NoReachableWorker) {
	const auto s = seasonal_series(5, 300);
	const auto tasks = make_tasks(s, partition(s, 1), small_search(), 50);
	try {
		coordinate({closed_port_address(), closed_port_address()}, tasks);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::worker_unavailable);
		EXPECT_NE(std::string(e.what()).find("no reachable worker"), std::string::npos);
	}
	EXPECT_THROW(coordinate({}, tasks), Error);
}

TEST(RunJob, SingleSubseriesEqualsBenchmarkArima) {
	for (std::uint64_t seed : {10u, 11u}) {
		const auto s = seasonal_series(seed, 800);
		const double levels[] = {0.8, 0.95};
		const auto report = run_job(s, 1, small_search(), 300, 20, levels, Executor::in_process(1));
		const auto fit = auto_arima(s, small_search());
		const auto bench = forecast_benchmark_arima(fit, s, 20, levels, 300);
		EXPECT_EQ(report.forecast.mean, bench.mean);
		EXPECT_EQ(report.forecast.lower, bench.lower);
		EXPECT_EQ(report.forecast.upper, bench.upper);
		EXPECT_EQ(report.forecast.sigma_h, bench.sigma_h);
	}
}

TEST(RunJob, ThreadCountDoesNotChangeResults) {
	const auto s = seasonal_series(12, 1400);
	const double levels[] = {0.95};
	const auto a = run_job(s, 5, small_search(), 200, 30, levels, Executor::in_process(1));
	const auto b = run_job(s, 5, small_search(), 200, 30, levels, Executor::in_process(4));
	EXPECT_EQ(a.forecast.mean, b.forecast.mean);
	EXPECT_EQ(a.forecast.upper, b.forecast.upper);
	EXPECT_EQ(a.model.theta, b.model.theta);
	EXPECT_EQ(a.outcomes.size(), 5u);
	EXPECT_GT(a.timings.fit_ms, 0.0);
}

TEST(RunJob, TcpWorkersMatchInProcess) {
	WorkerServer w1;
	WorkerServer w2;
	const auto s = seasonal_series(13, 1400);
	const double levels[] = {0.95};
	const auto local = run_job(s, 4, small_search(), 200, 25, levels, Executor::in_process(2));
	const auto remote = run_job(s, 4, small_search(), 200, 25, levels, Executor::tcp({w1.address(), w2.address()}));
	EXPECT_EQ(local.forecast.mean, remote.forecast.mean);
	EXPECT_EQ(local.forecast.lower, remote.forecast.lower);
	EXPECT_EQ(local.forecast.upper, remote.forecast.upper);
	EXPECT_EQ(w1.requests() + w2.requests(), 4u);
	EXPECT_EQ(w1.responses() + w2.responses(), 4u);
}

TEST(RunJob, SurvivesAWorkerCrash) {
	WorkerServer w1;
	WorkerServer w2(std::string("127.0.0.1:0"), WorkerOptions{1});
	WorkerServer w3;
	const auto s = seasonal_series(14, 1400);
	const double levels[] = {0.95};
	const auto local = run_job(s, 6, small_search(), 150, 20, levels, Executor::in_process(1));
	const auto remote =
	    run_job(s, 6, small_search(), 150, 20, levels, Executor::tcp({w1.address(), w2.address(), w3.address()}));
	EXPECT_TRUE(w2.crashed());
	EXPECT_EQ(local.forecast.mean, remote.forecast.mean);
	EXPECT_EQ(local.forecast.upper, remote.forecast.upper);
}

TEST(RunJob, UnreachableTcpExecutorFails) {
	const auto s = seasonal_series(15, 400);
	const double levels[] = {0.95};
	try {
		run_job(s, 2, small_search(), 50, 5, levels, Executor::tcp({closed_port_address()}));
		FAIL();
	} catch (const Error &e) {
		EXPECT_NE(std::string(e.what()).find("no reachable worker"), std::string::npos);
	}
}
