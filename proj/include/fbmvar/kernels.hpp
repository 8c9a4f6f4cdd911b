#pragma once

// Closed-form Gaussian kernels of fractional Brownian motion on the grid {k/n}:
// path covariance, the inner products <eps_{l/n}, delta_{k/n}> and
// <delta_{k/n}, delta_{l/n}>, the normalized increment autocovariance rho_H,
// standard Gaussian moments and the Breuer-Major variance series.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "fbmvar/errors.hpp"

namespace fbmvar {

/// Hurst parameter H, validated to lie in the open interval (0, 1).
class HurstIndex {
public:
    explicit HurstIndex(double value) : value_(value) {
        if (!std::isfinite(value) || value <= 0.0 || value >= 1.0) {
            throw DomainError("Hurst index must lie in (0,1), got " + std::to_string(value));
        }
    }

    double value() const noexcept { return value_; }
    double two_h() const noexcept { return 2.0 * value_; }

    friend bool operator==(const HurstIndex&, const HurstIndex&) = default;

private:
    double value_;
};

/// Grid size n together with two interval indices k, l in [0, n).
struct GridIndexPair {
    GridIndexPair(std::int64_t n_, std::int64_t k_, std::int64_t l_) : n(n_), k(k_), l(l_) {
        if (n < 1) throw DomainError("grid size n must be positive");
        if (k < 0 || k >= n || l < 0 || l >= n) {
            throw DomainError("grid indices must satisfy 0 <= k,l < n");
        }
    }

    std::int64_t n;
    std::int64_t k;
    std::int64_t l;
};

/// |x|^{2H}, with an exact zero at x = 0.
inline double abs_pow_2h(const HurstIndex& H, double x) noexcept {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    return std::pow(ax, H.two_h());
}

/// R_H(s,t) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
inline double covariance(const HurstIndex& H, double s, double t) {
    if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
        throw DomainError("covariance: times must lie in [0,1]");
    }
    if (s == t) return abs_pow_2h(H, t);
    return 0.5 * (abs_pow_2h(H, t) + abs_pow_2h(H, s) - abs_pow_2h(H, t - s));
}

/// rho_H(p) = (|p+1|^{2H} + |p-1|^{2H} - 2|p|^{2H}) / 2, the autocorrelation of
/// unit-variance fractional Gaussian noise at lag p.
inline double increment_autocov(const HurstIndex& H, std::int64_t p) noexcept {
    const std::int64_t a = p < 0 ? -p : p;
    if (a == 0) return 1.0;
    const double x = static_cast<double>(a);
    if (a < 64) {
        return 0.5 * (abs_pow_2h(H, x + 1.0) + abs_pow_2h(H, x - 1.0) - 2.0 * abs_pow_2h(H, x));
    }
    // Second difference of x^{2H} written relative to x^{2H}; avoids the
    // cancellation of three O(x^{2H}) terms into an O(x^{2H-2}) result.
    const double up = std::expm1(H.two_h() * std::log1p(1.0 / x));
    const double down = std::expm1(H.two_h() * std::log1p(-1.0 / x));
    return 0.5 * std::pow(x, H.two_h()) * (up + down);
}

/// (x+1)^{2H} - x^{2H} for x >= 0. Lies in [0,1] whenever H <= 1/2.
inline double unit_step_power_gap(const HurstIndex& H, double x) {
    if (!(x >= 0.0)) throw DomainError("unit_step_power_gap: x must be non-negative");
    const double gap = x < 1.0 ? std::pow(x + 1.0, H.two_h()) - abs_pow_2h(H, x)
                               : std::pow(x, H.two_h()) * std::expm1(H.two_h() * std::log1p(1.0 / x));
    // For H <= 1/2 the exact value is at most 1, so any excess is rounding.
    return H.value() <= 0.5 ? std::clamp(gap, 0.0, 1.0) : gap;
}

/// Sum of rho_H(p) over |p| <= lag, accumulated term by term.
inline double autocov_partial_sum(const HurstIndex& H, std::int64_t lag) {
    if (lag < 0) throw DomainError("autocov_partial_sum: lag must be non-negative");
    double tail = 0.0;
    for (std::int64_t p = lag; p >= 1; --p) tail += increment_autocov(H, p);
    return 1.0 + 2.0 * tail;
}

/// <eps_{l/n}, delta_{k/n}> = R_H(l/n, (k+1)/n) - R_H(l/n, k/n).
inline double eps_delta_inner(const HurstIndex& H, const GridIndexPair& g) noexcept {
    const double n = static_cast<double>(g.n);
    const double k = static_cast<double>(g.k);
    const double d = static_cast<double>(g.l - g.k);
    const double bracket =
        abs_pow_2h(H, k + 1.0) - abs_pow_2h(H, k) - abs_pow_2h(H, d - 1.0) + abs_pow_2h(H, d);
    return 0.5 * std::pow(n, -H.two_h()) * bracket;
}

/// <delta_{k/n}, delta_{l/n}> = n^{-2H} rho_H(k - l) = E[dB_{k/n} dB_{l/n}].
inline double delta_delta_inner(const HurstIndex& H, const GridIndexPair& g) noexcept {
    return std::pow(static_cast<double>(g.n), -H.two_h()) * increment_autocov(H, g.k - g.l);
}

/// E[G^kappa] for G ~ N(0,1): zero for odd kappa, (kappa-1)!! for even kappa.
inline double gaussian_moment(int kappa) {
    if (kappa < 0) throw DomainError("gaussian_moment: kappa must be non-negative");
    if (kappa % 2 != 0) return 0.0;
    double m = 1.0;
    for (int j = kappa - 1; j > 1; j -= 2) m *= j;
    return m;
}

/// Coefficients c_q of x^kappa = sum_q c_q He_q(x) in probabilists' Hermite
/// polynomials, c_q = kappa! / (q! m! 2^m) with m = (kappa - q)/2.
/// The returned vector has length kappa+1; the q=0 entry is the mean mu_kappa.
inline std::vector<double> hermite_coefficients(int kappa) {
    if (kappa < 0) throw DomainError("hermite_coefficients: kappa must be non-negative");
    auto factorial = [](int m) {
        double f = 1.0;
        for (int j = 2; j <= m; ++j) f *= j;
        return f;
    };
    std::vector<double> c(static_cast<std::size_t>(kappa) + 1, 0.0);
    for (int q = kappa; q >= 0; q -= 2) {
        const int m = (kappa - q) / 2;
        c[static_cast<std::size_t>(q)] =
            factorial(kappa) / (factorial(q) * factorial(m) * std::ldexp(1.0, m));
    }
    return c;
}

/// Smallest q >= 1 with a nonzero Hermite coefficient of the centered x^kappa.
inline int hermite_rank(int kappa) {
    if (kappa < 1) throw DomainError("hermite_rank: kappa must be positive");
    return kappa % 2 == 0 ? 2 : 1;
}

struct BreuerMajorSpec {
    BreuerMajorSpec(HurstIndex hurst_, int kappa_, int hermite_truncation_ = -1,
                    std::int64_t lag_truncation_ = 100000)
        : hurst(hurst_),
          kappa(kappa_),
          hermite_truncation(hermite_truncation_ < 0 ? kappa_ : hermite_truncation_),
          lag_truncation(lag_truncation_) {
        if (kappa < 2) throw KappaError("Breuer-Major variance requires kappa >= 2");
        if (hermite_truncation < kappa) {
            throw DomainError("hermite_truncation must be >= kappa");
        }
        if (lag_truncation < 1) throw DomainError("lag_truncation must be >= 1");
    }

    HurstIndex hurst;
    int kappa;
    int hermite_truncation;
    std::int64_t lag_truncation;
};

/// True when every series sum_p rho^q entering the variance converges.
inline bool breuer_major_admissible(const HurstIndex& H, int kappa) noexcept {
    const int q0 = kappa % 2 == 0 ? 2 : 1;
    // sum_p |rho(p)|^q converges iff q(2H-2) < -1; the rank-1 series also
    // converges (to zero, by telescoping) for H < 1/2 and vanishes at H = 1/2.
    if (q0 == 1) return H.value() <= 0.5;
    return H.value() < 0.75;
}

/// Asymptotic variance of n^{-1/2} sum_k [ (n^H dB_k)^kappa - mu_kappa ]:
/// sum_{q >= rank} q! c_q^2 sum_{|p| <= lag} rho_H(p)^q.
inline double breuer_major_variance(const BreuerMajorSpec& spec) {
    const HurstIndex& H = spec.hurst;
    if (!breuer_major_admissible(H, spec.kappa)) {
        throw RegimeError("Breuer-Major series diverges for kappa=" + std::to_string(spec.kappa) +
                          ", H=" + std::to_string(H.value()));
    }
    const std::vector<double> coeff = hermite_coefficients(spec.kappa);
    const int q_max = std::min(spec.hermite_truncation, spec.kappa);
    const int q0 = hermite_rank(spec.kappa);

    std::vector<double> lag_sums(static_cast<std::size_t>(q_max) + 1, 0.0);
    // Smallest terms first.
    for (std::int64_t p = spec.lag_truncation; p >= 1; --p) {
        const double r = increment_autocov(H, p);
        double rq = 1.0;
        for (int q = 1; q <= q_max; ++q) {
            rq *= r;
            lag_sums[static_cast<std::size_t>(q)] += rq;
        }
    }
    double sigma2 = 0.0;
    double q_fact = 1.0;
    for (int q = 1; q <= q_max; ++q) {
        q_fact *= q;
        if (q < q0) continue;
        const double c = coeff[static_cast<std::size_t>(q)];
        if (c == 0.0) continue;
        sigma2 += q_fact * c * c * (1.0 + 2.0 * lag_sums[static_cast<std::size_t>(q)]);
    }
    return sigma2 < 0.0 ? 0.0 : sigma2;
}

} // namespace fbmvar
