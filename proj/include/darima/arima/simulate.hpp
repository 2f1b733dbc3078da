#pragma once

#include "darima/arima/css.hpp"
#include "darima/arima/roots.hpp"

#include <random>
#include <vector>

namespace darima {

/// A data-generating process: orders plus coefficients, no deterministic terms.
struct Dgp {
	ArimaOrders orders;
	ArmaCoefficients coef;
};

inline bool dgp_roots_ok(const Dgp &g, double root_tol = 1e-3) {
	const auto m = static_cast<std::size_t>(g.orders.m);
	return check_roots(g.coef.phi, root_tol, -1.0) && check_roots(g.coef.sphi, root_tol, -1.0, m) &&
	       check_roots(g.coef.theta, root_tol, 1.0) && check_roots(g.coef.stheta, root_tol, 1.0, m);
}

/// Random seasonal ARIMA process: d ~ Bernoulli(0.9), D ~ Bernoulli(0.4),
/// p, q uniform on {0..5}, P, Q uniform on {0,1,2}; each coefficient block is
/// drawn from U(-2,2) and rejected until its polynomial has all roots outside
/// the unit circle. After 10,000 rejections the orders are redrawn.
inline Dgp draw_random_dgp(int m, std::mt19937_64 &rng, double root_tol = 1e-3) {
	std::bernoulli_distribution d_dist(0.9);
	std::bernoulli_distribution D_dist(0.4);
	std::uniform_int_distribution<int> pq_dist(0, 5);
	std::uniform_int_distribution<int> PQ_dist(0, 2);
	std::uniform_real_distribution<double> coef_dist(-2.0, 2.0);
	constexpr int kCap = 10000;

	for (;;) {
		Dgp g;
		g.orders.m = m;
		g.orders.d = d_dist(rng) ? 1 : 0;
		g.orders.D = D_dist(rng) ? 1 : 0;
		g.orders.p = pq_dist(rng);
		g.orders.q = pq_dist(rng);
		g.orders.P = PQ_dist(rng);
		g.orders.Q = PQ_dist(rng);

		int budget = kCap;
		auto draw_block = [&](int count, double sign, std::size_t stride, std::vector<double> &out) {
			out.assign(static_cast<std::size_t>(count), 0.0);
			if (count == 0) {
				return true;
			}
			while (budget-- > 0) {
				for (auto &c : out) {
					c = coef_dist(rng);
				}
				if (check_roots(out, root_tol, sign, stride)) {
					return true;
				}
			}
			return false;
		};
		const auto stride = static_cast<std::size_t>(m);
		if (draw_block(g.orders.p, -1.0, 1, g.coef.phi) && draw_block(g.orders.q, 1.0, 1, g.coef.theta) &&
		    draw_block(g.orders.P, -1.0, stride, g.coef.sphi) && draw_block(g.orders.Q, 1.0, stride, g.coef.stheta)) {
			return g;
		}
	}
}

/// Simulates the ARMA core with Gaussian shocks, drops the burn-in, then
/// integrates D times at lag m and d times at lag 1 from zero initial values.
inline TimeSeries simulate_arima(const ArimaOrders &orders, const ArmaCoefficients &coef, std::size_t T,
                                 std::size_t burnin, double noise_sd, std::mt19937_64 &rng) {
	if (T == 0) {
		fail(ErrorCode::invalid_argument, "simulation length must be positive");
	}
	const auto ar = detail::ar_terms(coef, orders.m);
	const auto ma = detail::ma_terms(coef, orders.m);
	std::normal_distribution<double> noise(0.0, noise_sd);
	const std::size_t total = burnin + T;
	std::vector<double> e(total);
	std::vector<double> x(total, 0.0);
	for (std::size_t t = 0; t < total; ++t) {
		e[t] = noise(rng);
		double v = e[t];
		for (std::size_t j = 0; j < ar.lag.size() && ar.lag[j] <= t; ++j) {
			v += ar.coef[j] * x[t - ar.lag[j]];
		}
		for (std::size_t j = 0; j < ma.lag.size() && ma.lag[j] <= t; ++j) {
			v += ma.coef[j] * e[t - ma.lag[j]];
		}
		x[t] = v;
	}
	std::vector<double> y(x.begin() + static_cast<std::ptrdiff_t>(burnin), x.end());
	auto integrate = [&y](std::size_t lag) {
		for (std::size_t t = lag; t < y.size(); ++t) {
			y[t] += y[t - lag];
		}
	};
	for (int i = 0; i < orders.D; ++i) {
		integrate(static_cast<std::size_t>(orders.m));
	}
	for (int i = 0; i < orders.d; ++i) {
		integrate(1);
	}
	return TimeSeries(std::move(y), orders.m);
}

inline TimeSeries simulate_arima(const Dgp &g, std::size_t T, std::size_t burnin, double noise_sd,
                                 std::mt19937_64 &rng) {
	return simulate_arima(g.orders, g.coef, T, burnin, noise_sd, rng);
}

} // namespace darima
