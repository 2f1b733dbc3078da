#pragma once

#include "darima/error.hpp"
#include "darima/linrep.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

namespace darima {

/// Global model assembled from local linear representations.
struct CombinedModel {
	/// (beta0, beta1, pi_1..pi_p*, eta_1..eta_l)
	std::vector<double> theta;
	double sigma_tilde2 = 1.0;
	std::size_t T = 0;
	std::size_t p_star = 0;
	/// Dimension used when turning the covariance trace into sigma_tilde2.
	std::size_t dim_p = 0;

	double beta0() const noexcept { return theta[0]; }
	double beta1() const noexcept { return theta[1]; }
	std::span<const double> pi() const noexcept { return std::span<const double>(theta).subspan(2, p_star); }
	std::span<const double> eta() const noexcept { return std::span<const double>(theta).subspan(2 + p_star); }
	std::size_t n_covariates() const noexcept { return theta.size() - 2 - p_star; }
};

enum class CovarianceMode {
	/// Local covariance approximated by sigma_k^2 I.
	scalar,
	/// Local covariance taken as diag(LinearRep::coef_variance).
	diagonal,
};

namespace detail {

/// Validates the reps and returns them ordered by subseries origin.
inline std::vector<const LinearRep *> reduction_order(std::span<const LinearRep> reps) {
	if (reps.empty()) {
		fail(ErrorCode::invalid_argument, "cannot combine an empty list of representations");
	}
	const std::size_t p_star = reps.front().p_star();
	const std::size_t l = reps.front().eta.size();
	std::vector<const LinearRep *> order;
	order.reserve(reps.size());
	for (const auto &r : reps) {
		r.validate();
		if (r.p_star() != p_star || r.eta.size() != l) {
			fail(ErrorCode::mismatched_reps, "all representations must share p* and the covariate count");
		}
		order.push_back(&r);
	}
	std::stable_sort(order.begin(), order.end(), [](const LinearRep *a, const LinearRep *b) {
		if (a->origin != b->origin) {
			return a->origin < b->origin;
		}
		if (a->T_k != b->T_k) {
			return a->T_k < b->T_k;
		}
		return a->sigma2 < b->sigma2;
	});
	return order;
}

} // namespace detail

/// Distributed least-squares combination: each local estimator is weighted by
/// T_k times its inverse covariance. With the scalar approximation the weights
/// are w_k = T_k / sigma_k^2, the global covariance is (T / sum w_k) I, and
/// sigma_tilde2 = tr(Sigma)/dim = T / sum w_k.
inline CombinedModel dlsa_combine(std::span<const LinearRep> reps, CovarianceMode mode = CovarianceMode::scalar) {
	const auto order = detail::reduction_order(reps);
	const std::size_t p_star = order.front()->p_star();
	const std::size_t dim = p_star + 2 + order.front()->eta.size();

	CombinedModel out;
	out.p_star = p_star;
	out.dim_p = dim;
	out.theta.assign(dim, 0.0);
	for (const auto *r : order) {
		out.T += r->T_k;
	}
	const double T = static_cast<double>(out.T);

	if (mode == CovarianceMode::scalar) {
		double W = 0.0;
		for (const auto *r : order) {
			W += static_cast<double>(r->T_k) / r->sigma2;
		}
		for (const auto *r : order) {
			const double share = (static_cast<double>(r->T_k) / r->sigma2) / W;
			const auto th = r->theta();
			for (std::size_t i = 0; i < dim; ++i) {
				out.theta[i] += share * th[i];
			}
		}
		out.sigma_tilde2 = T / W;
		return out;
	}

	std::vector<double> W(dim, 0.0);
	for (const auto *r : order) {
		if (r->coef_variance.size() != dim) {
			fail(ErrorCode::mismatched_reps, "diagonal combination needs a variance for every coefficient");
		}
		for (std::size_t i = 0; i < dim; ++i) {
			if (!(r->coef_variance[i] > 0.0)) {
				fail(ErrorCode::invalid_argument, "coefficient variances must be positive");
			}
			W[i] += static_cast<double>(r->T_k) / r->coef_variance[i];
		}
	}
	for (const auto *r : order) {
		const auto th = r->theta();
		for (std::size_t i = 0; i < dim; ++i) {
			out.theta[i] += (static_cast<double>(r->T_k) / r->coef_variance[i]) / W[i] * th[i];
		}
	}
	double trace = 0.0;
	for (double w : W) {
		trace += T / w;
	}
	out.sigma_tilde2 = trace / static_cast<double>(dim);
	return out;
}

/// Unweighted parameter average; sigma_tilde2 is the mean local variance.
inline CombinedModel simple_average_combine(std::span<const LinearRep> reps) {
	const auto order = detail::reduction_order(reps);
	const std::size_t p_star = order.front()->p_star();
	const std::size_t dim = p_star + 2 + order.front()->eta.size();
	const double K = static_cast<double>(order.size());

	CombinedModel out;
	out.p_star = p_star;
	out.dim_p = dim;
	out.theta.assign(dim, 0.0);
	double s2 = 0.0;
	for (const auto *r : order) {
		const auto th = r->theta();
		for (std::size_t i = 0; i < dim; ++i) {
			out.theta[i] += th[i];
		}
		s2 += r->sigma2;
		out.T += r->T_k;
	}
	for (auto &v : out.theta) {
		v /= K;
	}
	out.sigma_tilde2 = s2 / K;
	return out;
}

} // namespace darima
