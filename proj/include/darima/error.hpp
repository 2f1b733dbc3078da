#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace darima {

enum class ErrorCode {
	invalid_argument,
	invalid_partition,
	out_of_range,
	series_too_short,
	parse_error,
	io_error,
	fit_failed,
	non_stationary,
	non_invertible,
	insufficient_history,
	missing_covariates,
	mismatched_reps,
	undefined_metric,
	protocol_error,
	version_mismatch,
	worker_unavailable,
	job_failed,
};

constexpr std::string_view to_string(ErrorCode code) {
	switch (code) {
	case ErrorCode::invalid_argument: return "invalid-argument";
	case ErrorCode::invalid_partition: return "invalid-partition";
	case ErrorCode::out_of_range: return "out-of-range";
	case ErrorCode::series_too_short: return "series-too-short";
	case ErrorCode::parse_error: return "parse-error";
	case ErrorCode::io_error: return "io-error";
	case ErrorCode::fit_failed: return "fit-failed";
	case ErrorCode::non_stationary: return "non-stationary";
	case ErrorCode::non_invertible: return "non-invertible";
	case ErrorCode::insufficient_history: return "insufficient-history";
	case ErrorCode::missing_covariates: return "missing-covariates";
	case ErrorCode::mismatched_reps: return "mismatched-reps";
	case ErrorCode::undefined_metric: return "undefined-metric";
	case ErrorCode::protocol_error: return "protocol-error";
	case ErrorCode::version_mismatch: return "version-mismatch";
	case ErrorCode::worker_unavailable: return "worker-unavailable";
	case ErrorCode::job_failed: return "job-failed";
	}
	return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string &message)
	    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

	ErrorCode code() const noexcept { return code_; }

private:
	ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &message) {
	throw Error(code, message);
}

} // namespace darima
