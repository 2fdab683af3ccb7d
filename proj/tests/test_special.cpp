#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "gwish/rng.hpp"
#include "gwish/special.hpp"

namespace sp = gwish::special;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kLn2 = 0.69314718055994530942;
}  // namespace

TEST_CASE("log_gamma matches known values and rejects non-positive input", "[special]") {
    CHECK(sp::log_gamma(1.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(sp::log_gamma(2.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(sp::log_gamma(0.5) == Catch::Approx(0.5 * std::log(kPi)).epsilon(1e-14));
    CHECK(sp::log_gamma(5.0) == Catch::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK_THROWS_AS(sp::log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(sp::log_gamma(-1.5), std::domain_error);
}

TEST_CASE("digamma spot values and recurrence", "[special]") {
    CHECK(sp::digamma(1.0) == Catch::Approx(-kEulerGamma).margin(1e-13));
    CHECK(sp::digamma(0.5) == Catch::Approx(-kEulerGamma - 2.0 * kLn2).margin(1e-13));
    CHECK(sp::digamma(2.0) == Catch::Approx(1.0 - kEulerGamma).margin(1e-13));
    // psi(x+1) = psi(x) + 1/x
    for (double x : {0.25, 0.7, 1.3, 3.9, 7.2, 15.5}) {
        CHECK(sp::digamma(x + 1.0) == Catch::Approx(sp::digamma(x) + 1.0 / x).margin(1e-12));
    }
    CHECK_THROWS_AS(sp::digamma(0.0), std::domain_error);
    CHECK_THROWS_AS(sp::digamma(-2.0), std::domain_error);
}

TEST_CASE("trigamma spot values and recurrence", "[special]") {
    CHECK(sp::trigamma(1.0) == Catch::Approx(kPi * kPi / 6.0).margin(1e-13));
    CHECK(sp::trigamma(0.5) == Catch::Approx(kPi * kPi / 2.0).margin(1e-13));
    // psi'(x+1) = psi'(x) - 1/x^2
    for (double x : {0.25, 0.7, 1.3, 3.9, 7.2, 15.5}) {
        CHECK(sp::trigamma(x + 1.0) ==
              Catch::Approx(sp::trigamma(x) - 1.0 / (x * x)).margin(1e-12));
    }
    CHECK_THROWS_AS(sp::trigamma(0.0), std::domain_error);
}

TEST_CASE("normal_cdf symmetry and quantiles", "[special]") {
    CHECK(sp::normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(sp::normal_cdf(1.959963984540054) == Catch::Approx(0.975).margin(1e-9));
    CHECK(sp::normal_cdf(-1.959963984540054) == Catch::Approx(0.025).margin(1e-9));
    for (double x : {0.3, 1.1, 2.7}) {
        CHECK(sp::normal_cdf(x) + sp::normal_cdf(-x) == Catch::Approx(1.0).margin(1e-14));
    }
    CHECK(sp::normal_cdf(8.0) > 0.999999);
    CHECK(sp::normal_cdf(-8.0) < 1e-6);
}

TEST_CASE("big_r closed forms, monotonicity, beta-function identity", "[special]") {
    CHECK(sp::big_r(2.0) == Catch::Approx(2.0 / kPi).epsilon(1e-13));
    CHECK(sp::big_r(3.0) == Catch::Approx(0.5).epsilon(1e-13));
    CHECK(sp::big_r(4.0) == Catch::Approx(4.0 / (3.0 * kPi)).epsilon(1e-13));
    CHECK(sp::big_r(5.0) == Catch::Approx(0.375).epsilon(1e-13));
    CHECK(sp::big_r(6.0) == Catch::Approx(16.0 / (15.0 * kPi)).epsilon(1e-13));
    CHECK(sp::big_r(7.0) == Catch::Approx(0.3125).epsilon(1e-13));

    // strictly decreasing
    double prev = sp::big_r(0.5);
    for (double m = 1.0; m <= 20.0; m += 0.5) {
        double cur = sp::big_r(m);
        CHECK(cur < prev);
        prev = cur;
    }

    // R_m = B(1, m/2) / B(1/2, (m+1)/2)
    for (double m : {2.0, 3.0, 4.0, 5.0, 6.0, 7.5, 11.0}) {
        double lhs = sp::big_r(m);
        double rhs = std::exp(sp::log_beta(1.0, 0.5 * m) - sp::log_beta(0.5, 0.5 * (m + 1.0)));
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }

    CHECK_THROWS_AS(sp::big_r(0.0), std::domain_error);
}

TEST_CASE("little_r closed forms and monotonicity", "[special]") {
    CHECK(sp::little_r(3.0) == Catch::Approx(8.0 / (3.0 * kPi)).epsilon(1e-13));
    CHECK(sp::little_r(4.0) == Catch::Approx(9.0 * kPi / 32.0).epsilon(1e-13));
    CHECK(sp::little_r(5.0) == Catch::Approx(128.0 / (45.0 * kPi)).epsilon(1e-13));
    CHECK(sp::little_r(6.0) == Catch::Approx(75.0 * kPi / 256.0).epsilon(1e-13));

    // strictly increasing toward 1, always in (0,1)
    double prev = 0.0;
    for (double d = 1.0; d <= 40.0; d += 1.0) {
        double cur = sp::little_r(d);
        CHECK(cur > prev);
        CHECK(cur < 1.0);
        prev = cur;
    }
    CHECK(sp::little_r(1e6) == Catch::Approx(1.0).margin(1e-5));

    CHECK_THROWS_AS(sp::little_r(-1.0), std::domain_error);
}

TEST_CASE("expect_exp_neg_xy_over_z closed form, special cases, MC agreement", "[special]") {
    // coincides with little_r when a=b=1/2, c=delta/2
    for (double d : {3.0, 4.0, 5.0, 6.0, 9.0}) {
        CHECK(sp::expect_exp_neg_xy_over_z(0.5, 0.5, 0.5 * d) ==
              Catch::Approx(sp::little_r(d)).epsilon(1e-13));
    }
    // enormous denominator shape: X*Y/Z -> 0 so the expectation -> 1
    CHECK(sp::expect_exp_neg_xy_over_z(1.0, 1.0, 1e6) == Catch::Approx(1.0).margin(1e-5));

    // Monte Carlo cross-check at a generic point
    const double a = 1.3, b = 0.8, c = 2.1;
    const double closed = sp::expect_exp_neg_xy_over_z(a, b, c);
    gwish::RngStream rng(91542u);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.gamma(a), y = rng.gamma(b), z = rng.gamma(c);
        double v = std::exp(-x * y / z);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - closed) < 4.0 * se + 1e-12);

    CHECK_THROWS_AS(sp::expect_exp_neg_xy_over_z(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(sp::expect_exp_neg_xy_over_z(1.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("expect_exp_neg_quadratic values, range, monotonicity, MC agreement", "[special]") {
    CHECK(sp::expect_exp_neg_quadratic(3.0, 0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(sp::expect_exp_neg_quadratic(7.2, 0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(sp::expect_exp_neg_quadratic(3.0, 1) ==
          Catch::Approx(sp::little_r(3.0)).epsilon(1e-13));
    CHECK(sp::expect_exp_neg_quadratic(3.0, 4) == Catch::Approx(0.625).epsilon(1e-13));

    for (double d : {3.0, 4.0, 5.5}) {
        double prev = 1.0 + 1e-15;
        for (int k = 0; k <= 12; ++k) {
            double cur = sp::expect_exp_neg_quadratic(d, k);
            CHECK(cur > 0.0);
            CHECK(cur <= 1.0);
            CHECK(cur < prev);
            prev = cur;
        }
    }

    // Monte Carlo: A = (sum of k products of independent standard normals) / sqrt(chi2_delta)
    const double delta = 3.0;
    const int k = 2;
    const double closed = sp::expect_exp_neg_quadratic(delta, k);
    gwish::RngStream rng(277113u);
    const int n = 400000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double num = 0.0;
        for (int j = 0; j < k; ++j) num += rng.normal() * rng.normal();
        double a = num / std::sqrt(rng.chi_square(delta));
        double v = std::exp(-0.5 * a * a);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - closed) < 4.0 * se + 1e-12);

    CHECK_THROWS_AS(sp::expect_exp_neg_quadratic(-3.0, 1), std::domain_error);
    CHECK_THROWS_AS(sp::expect_exp_neg_quadratic(3.0, -1), std::domain_error);
}

TEST_CASE("log_x1sq_moments closed forms and MC agreement", "[special]") {
    auto m3 = sp::log_x1sq_moments(3.0);
    CHECK(m3.mean == Catch::Approx(-2.0 * kLn2 - 1.0).margin(1e-12));
    CHECK(m3.variance == Catch::Approx(2.0 * kPi * kPi / 3.0 - 1.0).margin(1e-12));

    auto m4 = sp::log_x1sq_moments(4.0);
    CHECK(m4.mean == Catch::Approx(-8.0 / 3.0).margin(1e-12));

    auto m5 = sp::log_x1sq_moments(5.0);
    CHECK(m5.mean == Catch::Approx(-2.0 * kLn2 - 1.5).margin(1e-12));

    // Monte Carlo: X = N(0,1)/sqrt(chi2_{delta+1}), sample mean/var of log X^2
    const double delta = 3.0;
    gwish::RngStream rng(66801u);
    const int n = 400000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        double v = std::log(x * x / rng.chi_square(delta + 1.0));
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    double se_mean = std::sqrt(var / n);
    CHECK(std::abs(mean - m3.mean) < 4.0 * se_mean);
    // variance of the sample variance ~ (mu4 - var^2)/n; generous band via 0.05 relative
    CHECK(var == Catch::Approx(m3.variance).epsilon(0.05));

    CHECK_THROWS_AS(sp::log_x1sq_moments(0.0), std::domain_error);
}

TEST_CASE("b_ell_tail_approx center, limits, and MC comparison", "[special]") {
    auto m = sp::log_x1sq_moments(3.0);
    // at x = exp(n*mean) the standardized argument is exactly zero
    CHECK(sp::b_ell_tail_approx(3.0, 4, std::exp(4.0 * m.mean)) ==
          Catch::Approx(0.5).margin(1e-12));
    // huge x -> probability ~ 1; tiny x -> ~ 0
    CHECK(sp::b_ell_tail_approx(3.0, 4, 1e12) > 0.999);
    CHECK(sp::b_ell_tail_approx(3.0, 4, 1e-12) < 0.2);

    const double approx = sp::b_ell_tail_approx(3.0, 4, 1.0);
    CHECK(approx == Catch::Approx(0.9783).margin(5e-4));

    // Monte Carlo truth for P(prod of 4 iid X^2 <= 1), X = N/sqrt(chi2_4)
    gwish::RngStream rng(48121u);
    const int n = 400000;
    int count = 0;
    for (int i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int j = 0; j < 4; ++j) {
            double x = rng.normal();
            prod *= x * x / rng.chi_square(4.0);
        }
        if (prod <= 1.0) ++count;
    }
    double truth = static_cast<double>(count) / n;
    CHECK(std::abs(approx - truth) <= 0.02);

    CHECK_THROWS_AS(sp::b_ell_tail_approx(3.0, 0, 1.0), std::domain_error);
    CHECK_THROWS_AS(sp::b_ell_tail_approx(3.0, 4, 0.0), std::domain_error);
}
