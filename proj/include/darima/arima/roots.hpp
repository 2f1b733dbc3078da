#pragma once

#include "darima/polynomial.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace darima {

/// Roots of c0 + c1 z + ... + cn z^n as eigenvalues of the companion matrix.
inline std::vector<std::complex<double>> polynomial_roots(const Polynomial &poly) {
	const auto &c = poly.coeffs();
	const std::size_t n = poly.degree();
	if (n == 0) {
		return {};
	}
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
	for (std::size_t i = 0; i < n; ++i) {
		companion(0, static_cast<Eigen::Index>(i)) = -c[n - 1 - i] / c[n];
	}
	for (std::size_t i = 1; i < n; ++i) {
		companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
	}
	Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
	std::vector<std::complex<double>> roots;
	roots.reserve(n);
	for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
		roots.push_back(solver.eigenvalues()[i]);
	}
	return roots;
}

inline double min_root_modulus(const Polynomial &poly) {
	double out = std::numeric_limits<double>::infinity();
	for (const auto &r : polynomial_roots(poly)) {
		out = std::min(out, std::abs(r));
	}
	return out;
}

/// True iff every root of the polynomial lies outside the circle of radius 1 + tol.
inline bool check_roots(const Polynomial &poly, double tol) {
	return min_root_modulus(poly) > 1.0 + tol;
}

/// Root check for 1 - sum c_i z^{i*stride} (sign = -1) or 1 + sum c_i z^{i*stride}
/// (sign = +1). Roots in z of the strided polynomial have modulus |w|^{1/stride}
/// where w ranges over the roots of the compact polynomial, so only the compact
/// one is factored.
inline bool check_roots(std::span<const double> c, double tol, double sign, std::size_t stride = 1) {
	if (c.empty()) {
		return true;
	}
	const Polynomial compact = sign < 0 ? Polynomial::ar(c) : Polynomial::ma(c);
	if (compact.degree() == 0) {
		return true;
	}
	const double w = min_root_modulus(compact);
	return std::pow(w, 1.0 / static_cast<double>(stride)) > 1.0 + tol;
}

} // namespace darima
