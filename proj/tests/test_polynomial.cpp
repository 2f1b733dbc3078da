#include "darima/polynomial.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace darima;

namespace {

void expect_coeffs(const Polynomial &p, std::vector<double> expected, double tol = 0.0) {
	ASSERT_EQ(p.degree() + 1, expected.size());
	for (std::size_t i = 0; i < expected.size(); ++i) {
		EXPECT_NEAR(p[i], expected[i], tol) << "coefficient " << i;
	}
}

} // namespace

TEST(Polynomial, DifferenceProduct) {
	const auto p = Polynomial::difference(1, 1) * Polynomial::difference(2, 1);
	expect_coeffs(p, {1, -1, -1, 1});
}

TEST(Polynomial, IdentityFactor) {
	const std::vector<double> c{0.5};
	expect_coeffs(Polynomial::ar(c) * Polynomial(), {1, -0.5});
}

TEST(Polynomial, HandConvolution) {
	const std::vector<double> a{0.4};
	const std::vector<double> b{0.3};
	expect_coeffs(Polynomial::ar(a) * Polynomial::ar(b, 2), {1, -0.4, -0.3, 0.12}, 1e-15);
}

TEST(Polynomial, SeasonalStrideAndTrim) {
	const std::vector<double> c{0.5, 0.0};
	const auto p = Polynomial::ma(c, 3);
	expect_coeffs(p, {1, 0, 0, 0.5});
	EXPECT_EQ(p[10], 0.0);
	expect_coeffs(Polynomial::difference(1, 2), {1, -2, 1});
	expect_coeffs(Polynomial::difference(4, 0), {1});
}

TEST(Polynomial, MultiplicationIsAssociative) {
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (int trial = 0; trial < 50; ++trial) {
		std::vector<double> a(3), b(2), c(4);
		for (auto *v : {&a, &b, &c}) {
			for (auto &x : *v) {
				x = u(rng);
			}
		}
		const auto pa = Polynomial::ar(a);
		const auto pb = Polynomial::ma(b, 5);
		const auto pc = Polynomial::ar(c, 2);
		const auto left = (pa * pb) * pc;
		const auto right = pa * (pb * pc);
		ASSERT_EQ(left.degree(), right.degree());
		for (std::size_t i = 0; i <= left.degree(); ++i) {
			EXPECT_NEAR(left[i], right[i], 1e-14);
		}
	}
}
