#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace darima {

/// Backshift polynomial sum_i coeffs[i] B^i. Trailing zeros are trimmed so the
/// degree is always size()-1 (the zero polynomial is stored as {0}).
class Polynomial {
public:
	Polynomial() : coeffs_{1.0} {}
	explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

	/// 1 - sum_i c_i B^{i*stride}
	static Polynomial ar(std::span<const double> c, std::size_t stride = 1) { return lagged(c, stride, -1.0); }
	/// 1 + sum_i c_i B^{i*stride}
	static Polynomial ma(std::span<const double> c, std::size_t stride = 1) { return lagged(c, stride, 1.0); }
	/// (1 - B^lag)^power
	static Polynomial difference(std::size_t lag, int power);

	std::size_t degree() const noexcept { return coeffs_.size() - 1; }
	const std::vector<double> &coeffs() const noexcept { return coeffs_; }
	/// Coefficient of B^i, zero beyond the degree.
	double operator[](std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

	friend bool operator==(const Polynomial &, const Polynomial &) = default;

private:
	static Polynomial lagged(std::span<const double> c, std::size_t stride, double sign) {
		std::vector<double> out(c.size() * stride + 1, 0.0);
		out[0] = 1.0;
		for (std::size_t i = 0; i < c.size(); ++i) {
			out[(i + 1) * stride] = sign * c[i];
		}
		return Polynomial(std::move(out));
	}

	void trim() {
		while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
			coeffs_.pop_back();
		}
		if (coeffs_.empty()) {
			coeffs_.push_back(0.0);
		}
	}

	std::vector<double> coeffs_;
};

inline Polynomial poly_mul(const Polynomial &a, const Polynomial &b) {
	const auto &x = a.coeffs();
	const auto &y = b.coeffs();
	std::vector<double> out(x.size() + y.size() - 1, 0.0);
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (x[i] == 0.0) {
			continue;
		}
		for (std::size_t j = 0; j < y.size(); ++j) {
			out[i + j] += x[i] * y[j];
		}
	}
	return Polynomial(std::move(out));
}

inline Polynomial operator*(const Polynomial &a, const Polynomial &b) { return poly_mul(a, b); }

inline Polynomial Polynomial::difference(std::size_t lag, int power) {
	Polynomial out;
	std::vector<double> factor(lag + 1, 0.0);
	factor[0] = 1.0;
	factor[lag] = -1.0;
	const Polynomial f(std::move(factor));
	for (int i = 0; i < power; ++i) {
		out = out * f;
	}
	return out;
}

} // namespace darima
