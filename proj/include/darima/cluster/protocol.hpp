#pragma once

#include "darima/arima/types.hpp"
#include "darima/error.hpp"
#include "darima/linrep.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <variant>
#include <vector>

namespace darima::cluster {

inline constexpr std::uint8_t kProtocolVersion = 1;
/// Frames larger than this are treated as corrupt.
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 30;

enum class MessageTag : std::uint8_t {
	fit_task = 1,
	fit_outcome = 2,
	error = 3,
	/// reserved for outcomes carrying a diagonal or full covariance
	fit_outcome_matrix = 4,
};

/// Map input: one subseries plus everything needed to model it.
struct FitTask {
	std::uint32_t k = 1;
	std::vector<double> values;
	std::int64_t origin = 1;
	std::int32_t period_m = 1;
	SelectionConfig selection;
	std::uint64_t p_star = kDefaultPStar;

	friend bool operator==(const FitTask &, const FitTask &) = default;
};

/// Map output: the local estimator (beta0, beta1, pi_1..pi_p*) and its scalar variance.
struct FitOutcome {
	std::uint32_t k = 1;
	std::vector<double> theta;
	double sigma2 = 1.0;
	std::uint64_t T_k = 0;
	ArimaOrders orders;
	bool fallback = false;
	double elapsed_ms = 0.0;

	friend bool operator==(const FitOutcome &, const FitOutcome &) = default;
};

struct ErrorReply {
	ErrorCode code = ErrorCode::job_failed;
	std::uint32_t k = 0;
	std::string message;

	friend bool operator==(const ErrorReply &, const ErrorReply &) = default;
};

using Message = std::variant<FitTask, FitOutcome, ErrorReply>;

namespace wire {

/// Little-endian payload writer.
class Writer {
public:
	void u8(std::uint8_t v) { buf_.push_back(v); }
	void u32(std::uint32_t v) { put(v); }
	void u64(std::uint64_t v) { put(v); }
	void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v)); }
	void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v)); }
	void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
	void boolean(bool v) { u8(v ? 1 : 0); }
	void str(const std::string &s) {
		u32(static_cast<std::uint32_t>(s.size()));
		buf_.insert(buf_.end(), s.begin(), s.end());
	}
	void doubles(const std::vector<double> &v) {
		u64(v.size());
		for (double x : v) {
			f64(x);
		}
	}
	std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
	template <class U>
	void put(U v) {
		for (std::size_t i = 0; i < sizeof(U); ++i) {
			buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
		}
	}
	std::vector<std::uint8_t> buf_;
};

class Reader {
public:
	explicit Reader(const std::vector<std::uint8_t> &buf) : buf_(buf) {}

	std::uint8_t u8() {
		need(1);
		return buf_[pos_++];
	}
	std::uint32_t u32() { return get<std::uint32_t>(); }
	std::uint64_t u64() { return get<std::uint64_t>(); }
	std::int32_t i32() { return static_cast<std::int32_t>(get<std::uint32_t>()); }
	std::int64_t i64() { return static_cast<std::int64_t>(get<std::uint64_t>()); }
	double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
	bool boolean() {
		const auto v = u8();
		if (v > 1) {
			fail(ErrorCode::protocol_error, "invalid boolean byte");
		}
		return v == 1;
	}
	std::string str() {
		const auto n = u32();
		need(n);
		std::string s(buf_.begin() + static_cast<std::ptrdiff_t>(pos_),
		              buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
		pos_ += n;
		return s;
	}
	std::vector<double> doubles() {
		const auto n = u64();
		if (n > (buf_.size() - pos_) / 8) {
			fail(ErrorCode::protocol_error, "array length exceeds the payload");
		}
		std::vector<double> v(n);
		for (auto &x : v) {
			x = f64();
		}
		return v;
	}
	void finish() const {
		if (pos_ != buf_.size()) {
			fail(ErrorCode::protocol_error, "trailing bytes in payload");
		}
	}

private:
	void need(std::size_t n) const {
		if (buf_.size() - pos_ < n) {
			fail(ErrorCode::protocol_error, "truncated payload");
		}
	}
	template <class U>
	U get() {
		need(sizeof(U));
		U v = 0;
		for (std::size_t i = 0; i < sizeof(U); ++i) {
			v |= static_cast<U>(buf_[pos_++]) << (8 * i);
		}
		return v;
	}
	const std::vector<std::uint8_t> &buf_;
	std::size_t pos_ = 0;
};

inline void put_selection(Writer &w, const SelectionConfig &c) {
	for (int v : {c.max_p, c.max_q, c.max_P, c.max_Q, c.max_order, c.max_d, c.max_D, c.max_models}) {
		w.i32(v);
	}
	w.boolean(c.stepwise);
	w.boolean(c.approx_ic);
	w.boolean(c.allow_drift);
	w.boolean(c.allow_mean);
	w.f64(c.root_tol);
	w.f64(c.kpss_critical);
	w.f64(c.seasonal_threshold);
}

inline SelectionConfig get_selection(Reader &r) {
	SelectionConfig c;
	for (int *v : {&c.max_p, &c.max_q, &c.max_P, &c.max_Q, &c.max_order, &c.max_d, &c.max_D, &c.max_models}) {
		*v = r.i32();
	}
	c.stepwise = r.boolean();
	c.approx_ic = r.boolean();
	c.allow_drift = r.boolean();
	c.allow_mean = r.boolean();
	c.root_tol = r.f64();
	c.kpss_critical = r.f64();
	c.seasonal_threshold = r.f64();
	return c;
}

inline void put_orders(Writer &w, const ArimaOrders &o) {
	for (int v : {o.p, o.d, o.q, o.P, o.D, o.Q, o.m}) {
		w.i32(v);
	}
}

inline ArimaOrders get_orders(Reader &r) {
	ArimaOrders o;
	for (int *v : {&o.p, &o.d, &o.q, &o.P, &o.D, &o.Q, &o.m}) {
		*v = r.i32();
	}
	return o;
}

} // namespace wire

/// Payload bytes: version, tag, then the tag-specific body.
inline std::vector<std::uint8_t> encode(const Message &msg) {
	wire::Writer w;
	w.u8(kProtocolVersion);
	if (const auto *t = std::get_if<FitTask>(&msg)) {
		w.u8(static_cast<std::uint8_t>(MessageTag::fit_task));
		w.u32(t->k);
		w.i64(t->origin);
		w.i32(t->period_m);
		w.u64(t->p_star);
		wire::put_selection(w, t->selection);
		w.doubles(t->values);
	} else if (const auto *o = std::get_if<FitOutcome>(&msg)) {
		w.u8(static_cast<std::uint8_t>(MessageTag::fit_outcome));
		w.u32(o->k);
		w.f64(o->sigma2);
		w.u64(o->T_k);
		wire::put_orders(w, o->orders);
		w.boolean(o->fallback);
		w.f64(o->elapsed_ms);
		w.doubles(o->theta);
	} else {
		const auto &e = std::get<ErrorReply>(msg);
		w.u8(static_cast<std::uint8_t>(MessageTag::error));
		w.u8(static_cast<std::uint8_t>(e.code));
		w.u32(e.k);
		w.str(e.message);
	}
	return w.take();
}

inline Message decode(const std::vector<std::uint8_t> &payload) {
	wire::Reader r(payload);
	const auto version = r.u8();
	if (version != kProtocolVersion) {
		fail(ErrorCode::version_mismatch, "protocol version " + std::to_string(version) + " is not supported (expected " +
		                                      std::to_string(kProtocolVersion) + ")");
	}
	const auto tag = r.u8();
	Message out;
	switch (static_cast<MessageTag>(tag)) {
	case MessageTag::fit_task: {
		FitTask t;
		t.k = r.u32();
		t.origin = r.i64();
		t.period_m = r.i32();
		t.p_star = r.u64();
		t.selection = wire::get_selection(r);
		t.values = r.doubles();
		out = std::move(t);
		break;
	}
	case MessageTag::fit_outcome: {
		FitOutcome o;
		o.k = r.u32();
		o.sigma2 = r.f64();
		o.T_k = r.u64();
		o.orders = wire::get_orders(r);
		o.fallback = r.boolean();
		o.elapsed_ms = r.f64();
		o.theta = r.doubles();
		out = std::move(o);
		break;
	}
	case MessageTag::error: {
		ErrorReply e;
		const auto code = r.u8();
		if (code > static_cast<std::uint8_t>(ErrorCode::job_failed)) {
			fail(ErrorCode::protocol_error, "unknown error code " + std::to_string(code));
		}
		e.code = static_cast<ErrorCode>(code);
		e.k = r.u32();
		e.message = r.str();
		out = std::move(e);
		break;
	}
	case MessageTag::fit_outcome_matrix:
		fail(ErrorCode::protocol_error, "message tag 4 is reserved");
	default:
		fail(ErrorCode::protocol_error, "unknown message tag " + std::to_string(tag));
	}
	r.finish();
	return out;
}

/// 4-byte big-endian length prefix followed by the payload.
inline std::vector<std::uint8_t> frame(const std::vector<std::uint8_t> &payload) {
	if (payload.size() > kMaxFrameBytes) {
		fail(ErrorCode::protocol_error, "payload too large");
	}
	const auto n = static_cast<std::uint32_t>(payload.size());
	std::vector<std::uint8_t> out(4 + payload.size());
	out[0] = static_cast<std::uint8_t>(n >> 24);
	out[1] = static_cast<std::uint8_t>(n >> 16);
	out[2] = static_cast<std::uint8_t>(n >> 8);
	out[3] = static_cast<std::uint8_t>(n);
	std::copy(payload.begin(), payload.end(), out.begin() + 4);
	return out;
}

inline std::uint32_t frame_length(const std::uint8_t header[4]) {
	return (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) | (std::uint32_t{header[2]} << 8) |
	       std::uint32_t{header[3]};
}

} // namespace darima::cluster
