#pragma once

#include "darima/error.hpp"
#include "darima/forecast.hpp"
#include "darima/series.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace darima {

namespace detail {

inline std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
		s.remove_prefix(1);
	}
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
		s.remove_suffix(1);
	}
	return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
	std::vector<std::string_view> out;
	std::size_t start = 0;
	for (;;) {
		const auto comma = line.find(',', start);
		out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
		if (comma == std::string_view::npos) {
			break;
		}
		start = comma + 1;
	}
	return out;
}

inline double parse_double(std::string_view s, std::size_t row) {
	double v = 0.0;
	const auto *first = s.data();
	const auto *last = s.data() + s.size();
	if (!s.empty() && *first == '+') {
		++first;
	}
	const auto [ptr, ec] = std::from_chars(first, last, v);
	if (ec != std::errc() || ptr != last) {
		fail(ErrorCode::parse_error, "row " + std::to_string(row) + ": cannot parse '" + std::string(s) + "'");
	}
	if (!std::isfinite(v)) {
		fail(ErrorCode::parse_error, "row " + std::to_string(row) + ": non-finite value");
	}
	return v;
}

inline std::string format_double(double v) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

/// 0.95 -> "95", 0.975 -> "97.5"
inline std::string level_label(double level) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.10g", level * 100.0);
	return buf;
}

} // namespace detail

/// Reads one column of a headered CSV file; rows are taken in time order.
inline TimeSeries read_csv(const std::string &path, const std::string &column, int period, std::int64_t origin = 1) {
	std::ifstream in(path);
	if (!in) {
		fail(ErrorCode::io_error, "cannot open " + path);
	}
	std::string line;
	if (!std::getline(in, line)) {
		fail(ErrorCode::parse_error, path + ": missing header row");
	}
	const auto header = detail::split_csv(line);
	std::size_t col = header.size();
	for (std::size_t i = 0; i < header.size(); ++i) {
		if (header[i] == column) {
			col = i;
			break;
		}
	}
	if (col == header.size()) {
		fail(ErrorCode::parse_error, path + ": no column named '" + column + "'");
	}
	std::vector<double> values;
	std::size_t row = 1;
	while (std::getline(in, line)) {
		++row;
		if (detail::trim(line).empty()) {
			continue;
		}
		const auto fields = detail::split_csv(line);
		if (col >= fields.size()) {
			fail(ErrorCode::parse_error, path + ": row " + std::to_string(row) + " has no value for '" + column + "'");
		}
		values.push_back(detail::parse_double(fields[col], row));
	}
	if (values.empty()) {
		fail(ErrorCode::parse_error, path + ": no observations");
	}
	return TimeSeries(std::move(values), period, origin);
}

inline void write_series_csv(const std::string &path, const TimeSeries &series, const std::string &column = "y") {
	std::ofstream out(path);
	if (!out) {
		fail(ErrorCode::io_error, "cannot write " + path);
	}
	out << column << '\n';
	for (double v : series.values()) {
		out << detail::format_double(v) << '\n';
	}
	if (!out) {
		fail(ErrorCode::io_error, "write failed for " + path);
	}
}

/// Header: step,mean,lower_<L>,upper_<L>,...,sigma_h with 17 significant digits.
inline void write_forecast_csv(std::ostream &out, const ForecastResult &fc) {
	out << "step,mean";
	for (double level : fc.levels) {
		const auto label = detail::level_label(level);
		out << ",lower_" << label << ",upper_" << label;
	}
	out << ",sigma_h\n";
	for (std::size_t h = 0; h < fc.horizon(); ++h) {
		out << (h + 1) << ',' << detail::format_double(fc.mean[h]);
		for (std::size_t k = 0; k < fc.levels.size(); ++k) {
			out << ',' << detail::format_double(fc.lower[k][h]) << ',' << detail::format_double(fc.upper[k][h]);
		}
		out << ',' << detail::format_double(fc.sigma_h[h]) << '\n';
	}
}

inline void write_forecast_csv(const std::string &path, const ForecastResult &fc) {
	std::ofstream out(path);
	if (!out) {
		fail(ErrorCode::io_error, "cannot write " + path);
	}
	write_forecast_csv(out, fc);
	if (!out) {
		fail(ErrorCode::io_error, "write failed for " + path);
	}
}

inline ForecastResult read_forecast_csv(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		fail(ErrorCode::io_error, "cannot open " + path);
	}
	std::string line;
	if (!std::getline(in, line)) {
		fail(ErrorCode::parse_error, path + ": missing header row");
	}
	const auto header = detail::split_csv(line);
	if (header.size() < 3 || header[0] != "step" || header[1] != "mean" || header.back() != "sigma_h" ||
	    (header.size() - 3) % 2 != 0) {
		fail(ErrorCode::parse_error, path + ": not a forecast file");
	}
	ForecastResult fc;
	const std::size_t n_levels = (header.size() - 3) / 2;
	for (std::size_t k = 0; k < n_levels; ++k) {
		const auto name = header[2 + 2 * k];
		if (name.substr(0, 6) != "lower_") {
			fail(ErrorCode::parse_error, path + ": unexpected column " + std::string(name));
		}
		fc.levels.push_back(detail::parse_double(name.substr(6), 1) / 100.0);
	}
	fc.lower.resize(n_levels);
	fc.upper.resize(n_levels);
	std::size_t row = 1;
	while (std::getline(in, line)) {
		++row;
		if (detail::trim(line).empty()) {
			continue;
		}
		const auto f = detail::split_csv(line);
		if (f.size() != header.size()) {
			fail(ErrorCode::parse_error, path + ": row " + std::to_string(row) + " has the wrong number of fields");
		}
		fc.mean.push_back(detail::parse_double(f[1], row));
		for (std::size_t k = 0; k < n_levels; ++k) {
			fc.lower[k].push_back(detail::parse_double(f[2 + 2 * k], row));
			fc.upper[k].push_back(detail::parse_double(f[3 + 2 * k], row));
		}
		fc.sigma_h.push_back(detail::parse_double(f.back(), row));
	}
	return fc;
}

} // namespace darima
