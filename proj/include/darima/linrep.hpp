#pragma once

#include "darima/arima/roots.hpp"
#include "darima/arima/types.hpp"
#include "darima/error.hpp"
#include "darima/polynomial.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace darima {

inline constexpr std::size_t kDefaultPStar = 2000;

/// Truncated AR(p*) form of a seasonal ARIMA model:
///   y_t = beta0 + beta1*t + sum_i pi_i y_{t-i} + sum_j eta_j (g_{j,t} - sum_i pi_i g_{j,t-i}) + e_t
/// with t on the global clock.
struct LinearRep {
	double beta0 = 0.0;
	double beta1 = 0.0;
	std::vector<double> pi;
	std::vector<double> eta;
	double sigma2 = 1.0;
	std::size_t T_k = 1;
	/// Global index of the first observation of the subseries; orders reductions.
	std::int64_t origin = 1;
	/// Optional per-coefficient variances (diagonal of the local covariance);
	/// empty means the scalar sigma2*I approximation.
	std::vector<double> coef_variance;

	std::size_t p_star() const noexcept { return pi.size(); }

	/// (beta0, beta1, pi_1..pi_p*, eta_1..eta_l)
	std::vector<double> theta() const {
		std::vector<double> out;
		out.reserve(2 + pi.size() + eta.size());
		out.push_back(beta0);
		out.push_back(beta1);
		out.insert(out.end(), pi.begin(), pi.end());
		out.insert(out.end(), eta.begin(), eta.end());
		return out;
	}

	static LinearRep from_theta(std::span<const double> theta, std::size_t p_star, double sigma2, std::size_t T_k,
	                            std::int64_t origin = 1) {
		if (theta.size() < p_star + 2) {
			fail(ErrorCode::invalid_argument, "parameter vector shorter than p*+2");
		}
		LinearRep rep;
		rep.beta0 = theta[0];
		rep.beta1 = theta[1];
		rep.pi.assign(theta.begin() + 2, theta.begin() + 2 + static_cast<std::ptrdiff_t>(p_star));
		rep.eta.assign(theta.begin() + 2 + static_cast<std::ptrdiff_t>(p_star), theta.end());
		rep.sigma2 = sigma2;
		rep.T_k = T_k;
		rep.origin = origin;
		return rep;
	}

	void validate() const {
		if (pi.empty()) {
			fail(ErrorCode::invalid_argument, "linear representation needs p* >= 1");
		}
		if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
			fail(ErrorCode::invalid_argument, "linear representation needs a positive finite sigma2");
		}
		if (T_k < 1) {
			fail(ErrorCode::invalid_argument, "linear representation needs T_k >= 1");
		}
		for (double v : pi) {
			if (!std::isfinite(v)) {
				fail(ErrorCode::invalid_argument, "non-finite AR coefficient");
			}
		}
	}
};

/// Full AR side (1-sum phi B^i)(1-sum Phi B^{im})(1-B)^d(1-B^m)^D and MA side
/// (1+sum theta B^i)(1+sum Theta B^{im}) of a fitted model.
inline std::pair<Polynomial, Polynomial> expand_seasonal(const ArimaFit &fit) {
	const auto m = static_cast<std::size_t>(fit.orders.m);
	Polynomial ar = Polynomial::ar(fit.phi) * Polynomial::ar(fit.sphi, m) *
	                Polynomial::difference(1, fit.orders.d) * Polynomial::difference(m, fit.orders.D);
	Polynomial ma = Polynomial::ma(fit.theta) * Polynomial::ma(fit.stheta, m);
	return {std::move(ar), std::move(ma)};
}

/// pi weights of phi_full(B)/theta_full(B) = 1 - sum pi_j B^j through lag p_star.
inline std::vector<double> arma_to_ar(const Polynomial &phi_full, const Polynomial &theta_full, std::size_t p_star) {
	if (p_star < phi_full.degree()) {
		fail(ErrorCode::invalid_argument, "p* must be at least the AR degree");
	}
	if (!check_roots(theta_full, 0.0)) {
		fail(ErrorCode::non_invertible, "MA polynomial has roots on or inside the unit circle");
	}
	std::vector<std::size_t> b_lag;
	std::vector<double> b_coef;
	for (std::size_t l = 1; l <= theta_full.degree(); ++l) {
		if (theta_full[l] != 0.0) {
			b_lag.push_back(l);
			b_coef.push_back(theta_full[l]);
		}
	}
	std::vector<double> pi(p_star + 1, 0.0);
	for (std::size_t j = 1; j <= p_star; ++j) {
		double v = -phi_full[j] + theta_full[j];
		for (std::size_t k = 0; k < b_lag.size() && b_lag[k] < j; ++k) {
			v -= b_coef[k] * pi[j - b_lag[k]];
		}
		pi[j] = v;
	}
	pi.erase(pi.begin());
	return pi;
}

/// psi weights psi_1..psi_{h_max-1} of the MA(inf) form of 1/(1 - sum pi_i B^i).
inline std::vector<double> ar_to_ma(std::span<const double> pi, std::size_t h_max) {
	if (h_max < 1) {
		fail(ErrorCode::invalid_argument, "h_max must be >= 1");
	}
	std::vector<double> psi(h_max, 0.0);
	psi[0] = 1.0;
	for (std::size_t j = 1; j < h_max; ++j) {
		double v = 0.0;
		const std::size_t upto = std::min(j, pi.size());
		for (std::size_t i = 1; i <= upto; ++i) {
			v += pi[i - 1] * psi[j - i];
		}
		psi[j] = v;
	}
	psi.erase(psi.begin());
	return psi;
}

/// Linear representation of a fitted seasonal ARIMA model, with the trend
/// re-expressed on the global clock.
inline LinearRep rep_from_fit(const ArimaFit &fit, std::size_t p_star = kDefaultPStar) {
	const auto [phi_full, theta_full] = expand_seasonal(fit);
	if (p_star < 1 || p_star < phi_full.degree() + theta_full.degree()) {
		fail(ErrorCode::invalid_argument, "p* = " + std::to_string(p_star) + " is below the model degree " +
		                                      std::to_string(phi_full.degree() + theta_full.degree()));
	}
	LinearRep rep;
	rep.pi = arma_to_ar(phi_full, theta_full, p_star);
	const double mu1 = fit.mu1;
	const double mu0 = fit.mu0 - mu1 * static_cast<double>(fit.origin - 1);
	double sum_pi = 0.0;
	double sum_ipi = 0.0;
	for (std::size_t i = 0; i < rep.pi.size(); ++i) {
		sum_pi += rep.pi[i];
		sum_ipi += static_cast<double>(i + 1) * rep.pi[i];
	}
	rep.beta0 = mu0 * (1.0 - sum_pi) + mu1 * sum_ipi;
	rep.beta1 = mu1 * (1.0 - sum_pi);
	rep.sigma2 = fit.sigma2;
	rep.T_k = fit.length;
	rep.origin = fit.origin;
	return rep;
}

} // namespace darima
