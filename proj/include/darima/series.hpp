#pragma once

#include "darima/error.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace darima {

/// Equally spaced observations on a global clock.
///
/// `origin` is the global index of the first observation, so a subseries cut
/// from a longer series keeps referring to the same time axis. Values are
/// validated at construction and never change afterwards.
class TimeSeries {
public:
	TimeSeries(std::vector<double> values, int period = 1, std::int64_t origin = 1)
	    : values_(std::move(values)), period_(period), origin_(origin) {
		if (values_.empty()) {
			fail(ErrorCode::invalid_argument, "time series must be non-empty");
		}
		if (period_ < 1) {
			fail(ErrorCode::invalid_argument, "seasonal period must be >= 1");
		}
		for (std::size_t i = 0; i < values_.size(); ++i) {
			if (!std::isfinite(values_[i])) {
				fail(ErrorCode::invalid_argument, "non-finite observation at position " + std::to_string(i + 1));
			}
		}
	}

	std::span<const double> values() const noexcept { return values_; }
	const std::vector<double> &data() const noexcept { return values_; }
	std::size_t size() const noexcept { return values_.size(); }
	int period() const noexcept { return period_; }
	std::int64_t origin() const noexcept { return origin_; }
	/// Global index of the last observation.
	std::int64_t last_index() const noexcept { return origin_ + static_cast<std::int64_t>(values_.size()) - 1; }
	double operator[](std::size_t i) const noexcept { return values_[i]; }

	friend bool operator==(const TimeSeries &, const TimeSeries &) = default;

private:
	std::vector<double> values_;
	int period_;
	std::int64_t origin_;
};

struct Bounds {
	std::size_t lbound; // 1-based, inclusive
	std::size_t ubound; // 1-based, inclusive

	std::size_t length() const noexcept { return ubound - lbound + 1; }
	friend bool operator==(const Bounds &, const Bounds &) = default;
};

struct Partition {
	std::size_t K = 0;
	std::vector<Bounds> bounds;
};

/// Contiguous split into K pieces of length floor(T/K); the last piece takes the remainder.
inline Partition partition(std::size_t T, std::size_t K) {
	if (K < 1 || K > T) {
		fail(ErrorCode::invalid_partition,
		     "need 1 <= K <= T (K=" + std::to_string(K) + ", T=" + std::to_string(T) + ")");
	}
	const std::size_t n = T / K;
	Partition out;
	out.K = K;
	out.bounds.reserve(K);
	for (std::size_t i = 1; i <= K; ++i) {
		const std::size_t lbound = n * (i - 1) + 1;
		const std::size_t ubound = i >= K ? T : n * i;
		out.bounds.push_back({lbound, ubound});
	}
	return out;
}

inline Partition partition(const TimeSeries &series, std::size_t K) {
	return partition(series.size(), K);
}

/// Positions are 1-based and relative to the series itself, not the global clock.
inline TimeSeries slice(const TimeSeries &series, std::size_t lbound, std::size_t ubound) {
	if (lbound < 1 || lbound > ubound || ubound > series.size()) {
		fail(ErrorCode::out_of_range, "slice [" + std::to_string(lbound) + ", " + std::to_string(ubound) +
		                                  "] outside 1.." + std::to_string(series.size()));
	}
	const auto first = series.data().begin() + static_cast<std::ptrdiff_t>(lbound - 1);
	const auto last = series.data().begin() + static_cast<std::ptrdiff_t>(ubound);
	return TimeSeries(std::vector<double>(first, last), series.period(),
	                  series.origin() + static_cast<std::int64_t>(lbound) - 1);
}

inline TimeSeries slice(const TimeSeries &series, const Bounds &b) {
	return slice(series, b.lbound, b.ubound);
}

inline std::pair<TimeSeries, TimeSeries> train_test_split(const TimeSeries &series, std::size_t H) {
	if (H == 0 || H >= series.size()) {
		fail(ErrorCode::out_of_range,
		     "test length must satisfy 0 < H < T (H=" + std::to_string(H) + ", T=" + std::to_string(series.size()) + ")");
	}
	const std::size_t T = series.size();
	return {slice(series, 1, T - H), slice(series, T - H + 1, T)};
}

} // namespace darima
