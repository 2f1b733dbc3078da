#pragma once

#include "darima/arima/auto.hpp"
#include "darima/cluster/protocol.hpp"
#include "darima/cluster/socket.hpp"
#include "darima/linrep.hpp"
#include "darima/series.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <list>
#include <mutex>
#include <thread>

namespace darima::cluster {

/// The Map step for one subseries: automatic ARIMA followed by the linear representation.
inline FitOutcome execute_task(const FitTask &task) {
	const auto start = std::chrono::steady_clock::now();
	if (task.p_star < 1) {
		fail(ErrorCode::invalid_argument, "p* must be >= 1");
	}
	const TimeSeries series(task.values, task.period_m, task.origin);
	const ArimaFit fit = auto_arima(series, task.selection);
	const LinearRep rep = rep_from_fit(fit, static_cast<std::size_t>(task.p_star));
	FitOutcome out;
	out.k = task.k;
	out.theta = rep.theta();
	out.sigma2 = rep.sigma2;
	out.T_k = rep.T_k;
	out.orders = fit.orders;
	out.fallback = fit.fallback;
	out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
	return out;
}

/// Reply to one request payload; never throws for bad input.
inline std::vector<std::uint8_t> handle_request(const std::vector<std::uint8_t> &payload) {
	std::uint32_t k = 0;
	try {
		const Message msg = decode(payload);
		const auto *task = std::get_if<FitTask>(&msg);
		if (task == nullptr) {
			fail(ErrorCode::protocol_error, "workers accept only fit tasks");
		}
		k = task->k;
		return encode(execute_task(*task));
	} catch (const Error &e) {
		return encode(ErrorReply{e.code(), k, e.what()});
	} catch (const std::exception &e) {
		return encode(ErrorReply{ErrorCode::job_failed, k, e.what()});
	}
}

struct WorkerOptions {
	/// Simulated crash for fault-injection tests: after this many tasks have
	/// been received the worker drops every connection without replying.
	long crash_after_tasks = -1;
};

/// TCP worker: one thread per connection, tasks on a connection handled in order.
class WorkerServer {
public:
	explicit WorkerServer(const std::string &bind_address = "127.0.0.1:0", WorkerOptions options = {})
	    : options_(options) {
		const auto ep = parse_endpoint(bind_address);
		listener_ = listen_on(ep);
		endpoint_ = {ep.host == "0.0.0.0" ? "127.0.0.1" : ep.host, local_port(listener_)};
		acceptor_ = std::thread([this] { accept_loop(); });
	}
	WorkerServer(const WorkerServer &) = delete;
	WorkerServer &operator=(const WorkerServer &) = delete;
	~WorkerServer() { stop(); }

	std::uint16_t port() const noexcept { return endpoint_.port; }
	std::string address() const { return endpoint_.to_string(); }
	std::uint64_t requests() const noexcept { return requests_.load(); }
	std::uint64_t responses() const noexcept { return responses_.load(); }
	bool crashed() const noexcept { return crashed_.load(); }

	void stop() {
		{
			std::lock_guard lk(mu_);
			if (stopped_) {
				return;
			}
			stopped_ = true;
			shutdown_all_locked();
		}
		cv_.notify_all();
		if (acceptor_.joinable()) {
			acceptor_.join();
		}
		std::list<std::thread> threads;
		{
			std::lock_guard lk(mu_);
			threads.swap(threads_);
		}
		for (auto &t : threads) {
			t.join();
		}
		listener_.close();
	}

	/// Blocks until stop() is called from another thread.
	void wait() {
		std::unique_lock lk(mu_);
		cv_.wait(lk, [this] { return stopped_; });
	}

private:
	void shutdown_all_locked() {
		::shutdown(listener_.fd(), SHUT_RDWR);
		for (int fd : open_fds_) {
			::shutdown(fd, SHUT_RDWR);
		}
	}

	void accept_loop() {
		for (;;) {
			const int fd = ::accept(listener_.fd(), nullptr, nullptr);
			std::lock_guard lk(mu_);
			if (fd < 0) {
				if (stopped_ || crashed_) {
					return;
				}
				if (errno == EINTR || errno == ECONNABORTED) {
					continue;
				}
				return;
			}
			if (stopped_ || crashed_) {
				::close(fd);
				return;
			}
			open_fds_.push_back(fd);
			threads_.emplace_back([this, fd] { serve(fd); });
		}
	}

	void serve(int fd) {
		Socket conn(fd);
		std::vector<std::uint8_t> payload;
		try {
			while (read_frame(conn.fd(), payload)) {
				const auto n = ++requests_;
				if (options_.crash_after_tasks >= 0 && static_cast<long>(n) > options_.crash_after_tasks) {
					crash();
					break;
				}
				const auto reply = handle_request(payload);
				++responses_;
				write_frame(conn.fd(), reply);
			}
		} catch (const TransportError &) {
		} catch (const Error &e) {
			// oversized frame: the stream cannot be resynchronised
			try {
				write_frame(conn.fd(), encode(ErrorReply{e.code(), 0, e.what()}));
			} catch (const Error &) {
			}
		}
		std::lock_guard lk(mu_);
		open_fds_.remove(fd);
		::shutdown(fd, SHUT_RDWR);
	}

	void crash() {
		std::lock_guard lk(mu_);
		crashed_ = true;
		shutdown_all_locked();
	}

	WorkerOptions options_;
	Socket listener_;
	Endpoint endpoint_;
	std::thread acceptor_;
	std::mutex mu_;
	std::condition_variable cv_;
	std::list<std::thread> threads_;
	std::list<int> open_fds_;
	bool stopped_ = false;
	std::atomic<bool> crashed_{false};
	std::atomic<std::uint64_t> requests_{0};
	std::atomic<std::uint64_t> responses_{0};
};

/// Runs a worker until the process is terminated.
[[noreturn]] inline void serve_worker(const std::string &bind_address) {
	WorkerServer server(bind_address);
	for (;;) {
		server.wait();
	}
}

} // namespace darima::cluster
