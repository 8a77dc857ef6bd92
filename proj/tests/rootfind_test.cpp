#include "ssm/rootfind.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ssm {
namespace {

TEST(Brent, RefinesBracketedRoot) {
  const auto f = [](double t) { return t * t - 2.0; };
  EXPECT_NEAR(brent(f, 1.0, 2.0, 1e-12), std::sqrt(2.0), 1e-11);
}

TEST(Brent, ThrowsWithoutBracket) {
  const auto f = [](double t) { return t * t + 1.0; };
  EXPECT_THROW(brent(f, -1.0, 1.0), std::invalid_argument);
}

TEST(PolynomialRoots, Quadratic) {
  // t^2 - 3t + 2 = (t-1)(t-2)
  const auto roots = real_polynomial_roots({2.0, -3.0, 1.0});
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], 1.0, 1e-10);
  EXPECT_NEAR(roots[1], 2.0, 1e-10);
}

TEST(PolynomialRoots, TripleRootAtZero) {
  const auto roots = real_polynomial_roots({0.0, 0.0, 0.0, 1.0});
  ASSERT_EQ(roots.size(), 3u);
  for (double r : roots) EXPECT_NEAR(r, 0.0, 1e-7);
}

TEST(PolynomialRoots, StripsNearZeroLeadingCoefficients) {
  // effectively linear: 1e-15 t^3 + 0 t^2 + t - 1
  const auto roots = real_polynomial_roots({-1.0, 1.0, 0.0, 1e-15});
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0], 1.0, 1e-12);
}

std::vector<double> poly_from_roots(const std::vector<double>& roots) {
  std::vector<double> coeffs{1.0};
  for (double r : roots) {
    std::vector<double> next(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i + 1] += coeffs[i];
      next[i] -= r * coeffs[i];
    }
    coeffs = next;
  }
  return coeffs;
}

// 1000 random monic polynomials of degree <= 6 built from known roots in
// [-10, 10]: recovered roots match to 1e-7.
TEST(PolynomialRoots, RandomSexticsFromKnownRoots) {
  std::mt19937 rng(20240311);
  std::uniform_real_distribution<double> root_dist(-10.0, 10.0);
  std::uniform_int_distribution<int> degree_dist(1, 6);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int degree = degree_dist(rng);
    std::vector<double> expected(degree);
    bool well_separated = true;
    for (int i = 0; i < degree; ++i) {
      expected[i] = root_dist(rng);
      for (int j = 0; j < i; ++j) {
        if (std::abs(expected[i] - expected[j]) < 0.05) well_separated = false;
      }
    }
    if (!well_separated) continue;  // clustered roots are ill-conditioned by nature
    std::sort(expected.begin(), expected.end());
    const auto got = real_polynomial_roots(poly_from_roots(expected));
    ASSERT_EQ(got.size(), expected.size()) << "trial " << trial;
    for (int i = 0; i < degree; ++i) {
      worst = std::max(worst, std::abs(got[i] - expected[i]));
    }
  }
  EXPECT_LT(worst, 1e-7);
}

TEST(ShiftPolynomial, RecentersCorrectly) {
  // p(t) = (t-3)^2 = 9 - 6t + t^2; p(tau + 2) = (tau - 1)^2
  const auto shifted = shift_polynomial({9.0, -6.0, 1.0}, 2.0);
  ASSERT_EQ(shifted.size(), 3u);
  EXPECT_NEAR(shifted[0], 1.0, 1e-14);
  EXPECT_NEAR(shifted[1], -2.0, 1e-14);
  EXPECT_NEAR(shifted[2], 1.0, 1e-14);
}

}  // namespace
}  // namespace ssm
