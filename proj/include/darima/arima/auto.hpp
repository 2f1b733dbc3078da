#pragma once

#include "darima/arima/css.hpp"
#include "darima/arima/stationarity.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace darima {

namespace detail {

struct Candidate {
	int p = 0;
	int q = 0;
	int P = 0;
	int Q = 0;
	bool constant = false;

	auto key() const { return std::tie(p, q, P, Q, constant); }
	friend bool operator<(const Candidate &a, const Candidate &b) { return a.key() < b.key(); }
};

class OrderSearch {
public:
	OrderSearch(const TimeSeries &series, const SelectionConfig &cfg, int d, int D)
	    : series_(series), cfg_(cfg), d_(d), D_(D), seasonal_(series.period() > 1) {
		search_opt_.root_tol = cfg.root_tol;
		if (cfg.approx_ic) {
			search_opt_.rel_tol = 1e-6;
			search_opt_.max_iter = 200;
		}
		constant_ok_ = (d + D == 0 && cfg.allow_mean) || (d + D == 1 && cfg.allow_drift);
	}

	bool admissible(const Candidate &c) const {
		if (c.p < 0 || c.q < 0 || c.P < 0 || c.Q < 0) {
			return false;
		}
		if (c.p > cfg_.max_p || c.q > cfg_.max_q || c.P > cfg_.max_P || c.Q > cfg_.max_Q) {
			return false;
		}
		if (!seasonal_ && (c.P > 0 || c.Q > 0)) {
			return false;
		}
		if (c.p + c.q + c.P + c.Q > cfg_.max_order) {
			return false;
		}
		return !c.constant || constant_ok_;
	}

	/// AICc of the candidate, or nullopt when it cannot be fitted.
	std::optional<double> evaluate(const Candidate &c) {
		if (auto it = tried_.find(c); it != tried_.end()) {
			return it->second;
		}
		std::optional<double> score;
		if (static_cast<int>(tried_.size()) < cfg_.max_models) {
			try {
				CssOptions opt = search_opt_;
				opt.constant = c.constant;
				const ArimaFit fit = fit_css(series_, orders(c), opt);
				if (std::isfinite(fit.aicc)) {
					score = fit.aicc;
				}
			} catch (const Error &) {
			}
		}
		tried_.emplace(c, score);
		return score;
	}

	bool exhausted() const { return static_cast<int>(tried_.size()) >= cfg_.max_models; }

	ArimaOrders orders(const Candidate &c) const {
		return {c.p, d_, c.q, c.P, D_, c.Q, series_.period()};
	}

	bool constant_ok() const { return constant_ok_; }

	/// Successful candidates ordered by AICc.
	std::vector<std::pair<double, Candidate>> ranking() const {
		std::vector<std::pair<double, Candidate>> out;
		for (const auto &[c, s] : tried_) {
			if (s) {
				out.emplace_back(*s, c);
			}
		}
		std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
		return out;
	}

private:
	const TimeSeries &series_;
	const SelectionConfig &cfg_;
	int d_;
	int D_;
	bool seasonal_;
	bool constant_ok_ = false;
	CssOptions search_opt_;
	std::map<Candidate, std::optional<double>> tried_;
};

inline void stepwise_search(OrderSearch &search) {
	const bool c0 = search.constant_ok();
	const Candidate starts[] = {{2, 2, 1, 1, c0}, {0, 0, 0, 0, c0}, {1, 0, 1, 0, c0}, {0, 1, 0, 1, c0}};
	std::optional<Candidate> best;
	double best_score = std::numeric_limits<double>::infinity();
	auto consider = [&](const Candidate &c) {
		if (!search.admissible(c)) {
			return;
		}
		if (auto s = search.evaluate(c); s && *s < best_score) {
			best_score = *s;
			best = c;
		}
	};
	for (const auto &c : starts) {
		consider(c);
	}
	if (!best) {
		return;
	}
	while (!search.exhausted()) {
		const Candidate b = *best;
		std::vector<Candidate> moves;
		for (int delta : {-1, 1}) {
			moves.push_back({b.p + delta, b.q, b.P, b.Q, b.constant});
			moves.push_back({b.p, b.q + delta, b.P, b.Q, b.constant});
			moves.push_back({b.p, b.q, b.P + delta, b.Q, b.constant});
			moves.push_back({b.p, b.q, b.P, b.Q + delta, b.constant});
			moves.push_back({b.p + delta, b.q + delta, b.P, b.Q, b.constant});
			moves.push_back({b.p, b.q, b.P + delta, b.Q + delta, b.constant});
		}
		moves.push_back({b.p + 1, b.q - 1, b.P, b.Q, b.constant});
		moves.push_back({b.p - 1, b.q + 1, b.P, b.Q, b.constant});
		moves.push_back({b.p, b.q, b.P + 1, b.Q - 1, b.constant});
		moves.push_back({b.p, b.q, b.P - 1, b.Q + 1, b.constant});
		moves.push_back({b.p, b.q, b.P, b.Q, !b.constant});
		const double before = best_score;
		for (const auto &c : moves) {
			consider(c);
		}
		if (!(best_score < before)) {
			break;
		}
	}
}

inline void exhaustive_search(OrderSearch &search, const SelectionConfig &cfg) {
	for (int p = 0; p <= cfg.max_p; ++p) {
		for (int q = 0; q <= cfg.max_q; ++q) {
			for (int P = 0; P <= cfg.max_P; ++P) {
				for (int Q = 0; Q <= cfg.max_Q; ++Q) {
					for (bool constant : {true, false}) {
						const Candidate c{p, q, P, Q, constant};
						if (search.admissible(c)) {
							search.evaluate(c);
						}
					}
				}
			}
		}
	}
}

inline bool is_constant(std::span<const double> y) {
	return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
}

} // namespace detail

/// Mean-only model for a constant series. The residual variance is floored at
/// a tiny positive value relative to the level so downstream weights stay finite.
inline ArimaFit constant_series_fit(const TimeSeries &series) {
	ArimaFit fit;
	fit.orders.m = series.period();
	fit.has_mean = true;
	fit.mu0 = series[0];
	fit.n_obs = series.size();
	fit.sigma2 = 1e-12 * std::max(1.0, fit.mu0 * fit.mu0);
	fit.css = fit.sigma2 * static_cast<double>(fit.n_obs);
	fit.aicc = aicc_from_css(fit.css, fit.n_obs, 1);
	fit.length = series.size();
	fit.origin = series.origin();
	return fit;
}

/// Automatic seasonal ARIMA: seasonal differencing from the seasonal-strength
/// measure, ordinary differencing from repeated KPSS tests, then a stepwise
/// (or exhaustive) AICc search over the ARMA orders and the constant term.
inline ArimaFit auto_arima(const TimeSeries &series, const SelectionConfig &cfg = {}) {
	cfg.validate();
	const int m = series.period();
	const std::size_t min_len = 3 * static_cast<std::size_t>(m) + 10;
	if (series.size() < min_len) {
		fail(ErrorCode::series_too_short,
		     "automatic selection needs at least 3m+10 = " + std::to_string(min_len) + " observations");
	}
	const auto y = series.values();
	if (detail::is_constant(y)) {
		return constant_series_fit(series);
	}

	int D = 0;
	if (m > 1 && cfg.max_D > 0) {
		D = select_D(y, m, cfg.seasonal_threshold);
	}
	std::vector<double> x = D > 0 ? difference(y, 0, D, m) : std::vector<double>(y.begin(), y.end());
	int d = 0;
	if (!detail::is_constant(x)) {
		d = select_d(x, cfg.max_d, cfg.kpss_critical);
	}

	detail::OrderSearch search(series, cfg, d, D);
	if (cfg.stepwise) {
		detail::stepwise_search(search);
	} else {
		detail::exhaustive_search(search, cfg);
	}

	CssOptions final_opt;
	final_opt.root_tol = cfg.root_tol;
	for (const auto &[score, c] : search.ranking()) {
		final_opt.constant = c.constant;
		try {
			return fit_css(series, search.orders(c), final_opt);
		} catch (const Error &) {
		}
	}

	// every candidate failed: (0,d,0) with d chosen on the raw series
	const int d0 = select_d(y, cfg.max_d, cfg.kpss_critical);
	const ArimaOrders fallback{0, d0, 0, 0, 0, 0, m};
	final_opt.constant = constant_allowed(fallback, cfg);
	ArimaFit fit = fit_css(series, fallback, final_opt);
	fit.fallback = true;
	return fit;
}

} // namespace darima
