#pragma once

#include <cmath>
#include <stdexcept>

namespace gwish::special {

inline double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
    return std::lgamma(x);
}

// digamma via upward recurrence into the asymptotic-series region (x >= 10);
// absolute error around 1e-14 on the positive axis.
inline double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    // ln x - 1/(2x) - sum_n B_{2n} / (2n x^{2n})
    double series = std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0
        - inv2 * (1.0 / 120.0
        - inv2 * (1.0 / 252.0
        - inv2 * (1.0 / 240.0
        - inv2 * (1.0 / 132.0
        - inv2 * (691.0 / 32760.0))))));
    return acc + series;
}

// trigamma by the matching recurrence / asymptotic-series pair.
inline double trigamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("trigamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    // 1/x + 1/(2x^2) + sum_n B_{2n} / x^{2n+1}
    double series = inv + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0
        - inv2 * (1.0 / 30.0
        - inv2 * (1.0 / 42.0
        - inv2 * (1.0 / 30.0
        - inv2 * (5.0 / 66.0
        - inv2 * (691.0 / 2730.0))))));
    return acc + series;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// R_delta = Gamma(delta/2) / (sqrt(pi) * Gamma((delta+1)/2)).
// Strictly decreasing in delta; the geometric factor attached to each
// long path in the ratio error bound.
inline double big_r(double delta) {
    if (!(delta > 0.0)) throw std::domain_error("big_r: delta must be positive");
    return std::exp(log_gamma(0.5 * delta) - log_gamma(0.5 * (delta + 1.0))
                    - 0.57236494292470008707);  // log sqrt(pi)
}

// r(delta) = Gamma((delta+1)/2)^2 / (Gamma(delta/2) * Gamma((delta+2)/2)).
inline double little_r(double delta) {
    if (!(delta > 0.0)) throw std::domain_error("little_r: delta must be positive");
    return std::exp(2.0 * log_gamma(0.5 * (delta + 1.0)) - log_gamma(0.5 * delta)
                    - log_gamma(0.5 * (delta + 2.0)));
}

// E[exp(-X*Y/Z)] for independent X~Gamma(a), Y~Gamma(b), Z~Gamma(c)
// (unit scale) equals Gamma(a+c) Gamma(b+c) / (Gamma(c) Gamma(a+b+c)).
inline double expect_exp_neg_xy_over_z(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw std::domain_error("expect_exp_neg_xy_over_z: shapes must be positive");
    return std::exp(log_gamma(a + c) + log_gamma(b + c) - log_gamma(c) - log_gamma(a + b + c));
}

// E[exp(-A^2/2)] where A = (sum of k standard-normal products) / sqrt(chi2_delta):
// Gamma((delta+k)/2) Gamma((delta+1)/2) / (Gamma(delta/2) Gamma((delta+k+1)/2)).
// k = 0 gives exactly 1; strictly decreasing in k.
inline double expect_exp_neg_quadratic(double delta, int k) {
    if (!(delta > 0.0)) throw std::domain_error("expect_exp_neg_quadratic: delta must be positive");
    if (k < 0) throw std::domain_error("expect_exp_neg_quadratic: k must be >= 0");
    return std::exp(log_gamma(0.5 * (delta + k)) + log_gamma(0.5 * (delta + 1.0))
                    - log_gamma(0.5 * delta) - log_gamma(0.5 * (delta + k + 1.0)));
}

struct LogX1sqMoments {
    double mean;
    double variance;
};

// Moments of log X^2 with X = N(0,1)/sqrt(chi2_{delta+1}):
// mean = psi(1/2) - psi((delta+1)/2), variance = psi'(1/2) + psi'((delta+1)/2).
inline LogX1sqMoments log_x1sq_moments(double delta) {
    if (!(delta > 0.0)) throw std::domain_error("log_x1sq_moments: delta must be positive");
    return {digamma(0.5) - digamma(0.5 * (delta + 1.0)),
            trigamma(0.5) + trigamma(0.5 * (delta + 1.0))};
}

// Central-limit tail approximation for the product of n iid X_j^2 factors:
// P(prod <= x) ~ Phi((ln x - n*mean) / (sd * sqrt(n))).
inline double b_ell_tail_approx(double delta, int n, double x) {
    if (n < 1) throw std::domain_error("b_ell_tail_approx: n must be >= 1");
    if (!(x > 0.0)) throw std::domain_error("b_ell_tail_approx: x must be positive");
    LogX1sqMoments m = log_x1sq_moments(delta);
    double sd = std::sqrt(m.variance);
    return normal_cdf((std::log(x) - n * m.mean) / (sd * std::sqrt(static_cast<double>(n))));
}

}  // namespace gwish::special
