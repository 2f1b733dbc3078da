#pragma once

#include "darima/cluster/protocol.hpp"
#include "darima/cluster/socket.hpp"
#include "darima/error.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace darima::cluster {

/// One request/response exchange per call. Transport failures raise
/// TransportError; a structured error reply from the worker raises Error.
class WorkerChannel {
public:
	virtual ~WorkerChannel() = default;
	virtual FitOutcome call(const FitTask &task) = 0;
};

using ChannelFactory = std::function<std::unique_ptr<WorkerChannel>(const std::string &address)>;

class TcpChannel : public WorkerChannel {
public:
	explicit TcpChannel(std::string address) : address_(std::move(address)), endpoint_(parse_endpoint(address_)) {}

	FitOutcome call(const FitTask &task) override {
		if (!sock_.valid()) {
			sock_ = connect_to(endpoint_);
		}
		std::vector<std::uint8_t> payload;
		try {
			write_frame(sock_.fd(), encode(task));
			if (!read_frame(sock_.fd(), payload)) {
				throw TransportError("worker " + address_ + " closed the connection");
			}
		} catch (const Error &) {
			sock_.close();
			throw;
		}
		Message reply;
		try {
			reply = decode(payload);
		} catch (const Error &e) {
			sock_.close();
			throw TransportError("worker " + address_ + " sent an unreadable reply: " + e.what());
		}
		if (auto *out = std::get_if<FitOutcome>(&reply)) {
			return std::move(*out);
		}
		if (const auto *err = std::get_if<ErrorReply>(&reply)) {
			throw Error(err->code, "worker " + address_ + ": " + err->message);
		}
		sock_.close();
		throw TransportError("worker " + address_ + " replied with a task message");
	}

private:
	std::string address_;
	Endpoint endpoint_;
	Socket sock_;
};

inline ChannelFactory tcp_channels() {
	return [](const std::string &address) { return std::make_unique<TcpChannel>(address); };
}

struct WorkerStats {
	std::string address;
	std::size_t completed = 0;
	std::size_t failed = 0;
	bool alive = true;
};

/// Runs every task on the given workers and returns the outcomes ordered by k.
///
/// Tasks are dealt round-robin into per-worker queues; an idle worker steals
/// from the back of the longest other queue. A task that fails is retried once
/// on a different worker; a second failure fails the job. A worker whose
/// connection breaks is dropped for the rest of the job.
inline std::vector<FitOutcome> coordinate(const std::vector<std::string> &addresses, const std::vector<FitTask> &tasks,
                                          const ChannelFactory &factory = tcp_channels(),
                                          std::vector<WorkerStats> *stats = nullptr) {
	if (addresses.empty()) {
		fail(ErrorCode::worker_unavailable, "no reachable worker: no worker addresses given");
	}
	const std::size_t W = addresses.size();
	const std::size_t n = tasks.size();
	constexpr std::size_t kNone = static_cast<std::size_t>(-1);

	struct Pending {
		std::size_t index = 0;
		int attempts = 0;
		std::size_t excluded = kNone;
		std::string reason;
	};

	std::mutex mu;
	std::condition_variable cv;
	std::vector<std::deque<std::size_t>> queues(W);
	for (std::size_t i = 0; i < n; ++i) {
		queues[i % W].push_back(i);
	}
	std::deque<Pending> retries;
	std::vector<std::optional<FitOutcome>> results(n);
	std::vector<WorkerStats> ws(W);
	for (std::size_t w = 0; w < W; ++w) {
		ws[w].address = addresses[w];
	}
	std::vector<bool> reached(W, false);
	std::size_t done = 0;
	std::optional<Error> error;

	auto set_error = [&](ErrorCode code, const std::string &message) {
		if (!error) {
			error.emplace(code, message);
		}
	};
	auto joined_addresses = [&] {
		std::string s;
		for (const auto &a : addresses) {
			s += (s.empty() ? "" : ", ") + a;
		}
		return s;
	};
	// called with the lock held
	auto check_stuck = [&] {
		if (error || done == n) {
			return;
		}
		const bool any_alive = std::any_of(ws.begin(), ws.end(), [](const WorkerStats &s) { return s.alive; });
		if (!any_alive) {
			if (std::none_of(reached.begin(), reached.end(), [](bool b) { return b; })) {
				set_error(ErrorCode::worker_unavailable, "no reachable worker among " + joined_addresses());
			} else {
				set_error(ErrorCode::job_failed, "every worker failed before the job completed");
			}
			return;
		}
		for (const auto &r : retries) {
			bool other = false;
			for (std::size_t w = 0; w < W; ++w) {
				other = other || (ws[w].alive && w != r.excluded);
			}
			if (!other) {
				set_error(ErrorCode::job_failed, "task k=" + std::to_string(tasks[r.index].k) + " failed on worker " +
				                                     addresses[r.excluded] + " and no other worker is available: " +
				                                     r.reason);
				return;
			}
		}
	};
	auto pick = [&](std::size_t me, Pending &job) {
		for (auto it = retries.begin(); it != retries.end(); ++it) {
			if (it->excluded != me) {
				job = *it;
				retries.erase(it);
				return true;
			}
		}
		if (!queues[me].empty()) {
			job = Pending{queues[me].front(), 0, kNone, {}};
			queues[me].pop_front();
			return true;
		}
		std::size_t victim = kNone;
		std::size_t longest = 0;
		for (std::size_t w = 0; w < W; ++w) {
			if (w != me && queues[w].size() > longest) {
				longest = queues[w].size();
				victim = w;
			}
		}
		if (victim != kNone) {
			job = Pending{queues[victim].back(), 0, kNone, {}};
			queues[victim].pop_back();
			return true;
		}
		return false;
	};

	auto run = [&](std::size_t me) {
		std::unique_ptr<WorkerChannel> channel;
		try {
			channel = factory(addresses[me]);
		} catch (const std::exception &) {
			std::lock_guard lk(mu);
			ws[me].alive = false;
			check_stuck();
			cv.notify_all();
			return;
		}
		for (;;) {
			Pending job;
			{
				std::unique_lock lk(mu);
				bool got = false;
				cv.wait(lk, [&] {
					if (error || done == n) {
						return true;
					}
					got = pick(me, job);
					if (!got) {
						check_stuck();
					}
					return got || error.has_value();
				});
				if (!got) {
					cv.notify_all();
					return;
				}
			}
			const FitTask &task = tasks[job.index];
			std::optional<FitOutcome> outcome;
			std::string reason;
			bool transport = false;
			try {
				outcome = channel->call(task);
				if (outcome->k != task.k) {
					reason = "worker " + addresses[me] + " answered task k=" + std::to_string(task.k) + " with k=" +
					         std::to_string(outcome->k);
					outcome.reset();
				}
			} catch (const TransportError &e) {
				transport = true;
				reason = e.what();
			} catch (const std::exception &e) {
				reason = e.what();
			}
			std::lock_guard lk(mu);
			if (outcome) {
				reached[me] = true;
				results[job.index] = std::move(outcome);
				++done;
				++ws[me].completed;
			} else {
				++ws[me].failed;
				if (transport) {
					ws[me].alive = false;
				} else {
					reached[me] = true;
				}
				const bool none_alive =
				    std::none_of(ws.begin(), ws.end(), [](const WorkerStats &st) { return st.alive; });
				if (transport && none_alive && std::none_of(reached.begin(), reached.end(), [](bool b) { return b; })) {
					check_stuck();
				} else if (job.attempts >= 1) {
					set_error(ErrorCode::job_failed, "task k=" + std::to_string(task.k) + " failed on worker " +
					                                     addresses[me] + " after a retry: " + reason);
				} else {
					retries.push_back(Pending{job.index, 1, me, reason});
				}
				check_stuck();
			}
			cv.notify_all();
			if (!ws[me].alive) {
				return;
			}
		}
	};

	std::vector<std::thread> threads;
	threads.reserve(W);
	for (std::size_t w = 0; w < W; ++w) {
		threads.emplace_back(run, w);
	}
	for (auto &t : threads) {
		t.join();
	}
	if (stats != nullptr) {
		*stats = ws;
	}
	if (error) {
		throw *error;
	}
	std::vector<FitOutcome> out;
	out.reserve(n);
	for (auto &r : results) {
		out.push_back(std::move(*r));
	}
	std::sort(out.begin(), out.end(), [](const FitOutcome &a, const FitOutcome &b) { return a.k < b.k; });
	return out;
}

} // namespace darima::cluster
