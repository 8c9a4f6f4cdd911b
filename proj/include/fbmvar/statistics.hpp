#pragma once

// Weighted power-variation statistics of a sampled path, their pathwise
// limit functionals, and the regime classifier that maps (kappa, H, weighted)
// to the limit theorem governing that cell.
//
// Weights are always evaluated at the left endpoint B_{k/n}.

#include <cmath>
#include <string>
#include <string_view>

#include "fbmvar/errors.hpp"
#include "fbmvar/kernels.hpp"
#include "fbmvar/sampler.hpp"
#include "fbmvar/weights.hpp"

namespace fbmvar {

enum class StatisticForm {
    raw_weighted,
    centered_quadratic,
    compensated_cubic,
    odd_weighted,
    unweighted_centered,
    unweighted_odd,
    mixing_normalized,
};

inline std::string_view to_string(StatisticForm f) noexcept {
    switch (f) {
        case StatisticForm::raw_weighted: return "raw_weighted";
        case StatisticForm::centered_quadratic: return "centered_quadratic";
        case StatisticForm::compensated_cubic: return "compensated_cubic";
        case StatisticForm::odd_weighted: return "odd_weighted";
        case StatisticForm::unweighted_centered: return "unweighted_centered";
        case StatisticForm::unweighted_odd: return "unweighted_odd";
        case StatisticForm::mixing_normalized: return "mixing_normalized";
    }
    return "?";
}

inline StatisticForm parse_statistic_form(std::string_view s) {
    for (auto f : {StatisticForm::raw_weighted, StatisticForm::centered_quadratic,
                   StatisticForm::compensated_cubic, StatisticForm::odd_weighted,
                   StatisticForm::unweighted_centered, StatisticForm::unweighted_odd,
                   StatisticForm::mixing_normalized}) {
        if (to_string(f) == s) return f;
    }
    throw DomainError("unknown statistic form '" + std::string(s) + "'");
}

inline bool is_weighted(StatisticForm f) noexcept {
    return f != StatisticForm::unweighted_centered && f != StatisticForm::unweighted_odd;
}

struct StatisticSpec {
    int kappa = 2;
    std::string weight = "one";
    StatisticForm form = StatisticForm::centered_quadratic;

    /// Throws KappaError when kappa does not fit the form.
    void validate() const {
        const auto fail = [&](const std::string& why) {
            throw KappaError("form " + std::string(to_string(form)) + " " + why + ", got kappa=" +
                             std::to_string(kappa));
        };
        if (kappa < 2) fail("requires kappa >= 2");
        switch (form) {
            case StatisticForm::centered_quadratic:
            case StatisticForm::mixing_normalized:
                if (kappa != 2) fail("requires kappa = 2");
                break;
            case StatisticForm::compensated_cubic:
                if (kappa != 3) fail("requires kappa = 3");
                break;
            case StatisticForm::odd_weighted:
            case StatisticForm::unweighted_odd:
                if (kappa % 2 == 0) fail("requires odd kappa");
                break;
            case StatisticForm::unweighted_centered:
                if (kappa % 2 != 0) fail("requires even kappa");
                break;
            case StatisticForm::raw_weighted: break;
        }
    }
};

namespace detail {

inline double ipow(double x, int k) noexcept {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

inline double npow(const FbmPath& path, double exponent) {
    return std::pow(static_cast<double>(path.n()), exponent);
}

/// sum_k h(B_k) [ (n^H dB_k)^2 - 1 ]
inline double weighted_centered_square_sum(const FbmPath& path, const WeightFunction& h) {
    const auto v = path.values();
    const double scale = npow(path, path.hurst().value());
    double s = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) {
        const double x = scale * (v[k + 1] - v[k]);
        s += h(v[k]) * (x * x - 1.0);
    }
    return s;
}

} // namespace detail

/// sum_k h(B_{k/n}) (dB_{k/n})^kappa.
inline double raw_weighted_sum(const FbmPath& path, const WeightFunction& h, int kappa) {
    if (kappa < 1) throw KappaError("raw_weighted_sum requires kappa >= 1");
    const auto v = path.values();
    double s = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) s += h(v[k]) * detail::ipow(v[k + 1] - v[k], kappa);
    return s;
}

/// n^{2H-1} sum_k h(B_{k/n}) [n^{2H} (dB_{k/n})^2 - 1].
inline double centered_quadratic_stat(const FbmPath& path, const WeightFunction& h) {
    const double H = path.hurst().value();
    return detail::npow(path, 2.0 * H - 1.0) * detail::weighted_centered_square_sum(path, h);
}

/// n^{3H-1} sum_k [h(B_{k/n}) n^{3H} (dB_{k/n})^3 + (3/2) h'(B_{k/n}) n^{-H}].
inline double compensated_cubic_stat(const FbmPath& path, const WeightFunction& h) {
    h.require_order(1);
    const double H = path.hurst().value();
    const auto& h1 = h.evaluator(1);
    const auto v = path.values();
    const double scale = detail::npow(path, H);
    const double compensator = 1.5 / scale;
    double s = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) {
        const double x = scale * (v[k + 1] - v[k]);
        s += h(v[k]) * (x * x * x) + compensator * h1(v[k]);
    }
    return detail::npow(path, 3.0 * H - 1.0) * s;
}

/// n^{H-1} sum_k h(B_{k/n}) n^{kappa H} (dB_{k/n})^kappa, kappa odd.
inline double odd_weighted_stat(const FbmPath& path, const WeightFunction& h, int kappa) {
    if (kappa < 3 || kappa % 2 == 0) {
        throw KappaError("odd_weighted_stat requires odd kappa >= 3, got " + std::to_string(kappa));
    }
    const double H = path.hurst().value();
    const auto v = path.values();
    const double scale = detail::npow(path, H);
    double s = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) s += h(v[k]) * detail::ipow(scale * (v[k + 1] - v[k]), kappa);
    return detail::npow(path, H - 1.0) * s;
}

/// n^{-1/2} sum_k [n^{kappa H} (dB_{k/n})^kappa - mu_kappa]; mu_kappa = 0 for odd kappa.
inline double unweighted_stat(const FbmPath& path, int kappa) {
    if (kappa < 2) throw KappaError("unweighted_stat requires kappa >= 2");
    const double mu = gaussian_moment(kappa);
    const auto v = path.values();
    const double scale = detail::npow(path, path.hurst().value());
    double s = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) s += detail::ipow(scale * (v[k + 1] - v[k]), kappa) - mu;
    return s / std::sqrt(static_cast<double>(path.n()));
}

/// n^{-1/2} sum_k h(B_{k/n}) [n^{2H} (dB_{k/n})^2 - 1].
inline double mixing_normalized_stat(const FbmPath& path, const WeightFunction& h) {
    return detail::weighted_centered_square_sum(path, h) / std::sqrt(static_cast<double>(path.n()));
}

/// Dispatch on spec.form. raw_weighted returns the unnormalized sum.
inline double evaluate_statistic(const StatisticSpec& spec, const FbmPath& path, const WeightFunction& h) {
    switch (spec.form) {
        case StatisticForm::raw_weighted: return raw_weighted_sum(path, h, spec.kappa);
        case StatisticForm::centered_quadratic: return centered_quadratic_stat(path, h);
        case StatisticForm::compensated_cubic: return compensated_cubic_stat(path, h);
        case StatisticForm::odd_weighted: return odd_weighted_stat(path, h, spec.kappa);
        case StatisticForm::unweighted_centered:
        case StatisticForm::unweighted_odd: return unweighted_stat(path, spec.kappa);
        case StatisticForm::mixing_normalized: return mixing_normalized_stat(path, h);
    }
    throw DomainError("unhandled statistic form");
}

/// Left-endpoint Riemann sum c * (1/n) sum_k g(B_{k/n}) of the L2 limit:
///   centered_quadratic: c = 1/4,            g = h''
///   compensated_cubic:  c = -1/8,           g = h'''
///   odd_weighted:       c = -mu_{kappa+1}/2, g = h'
inline double limit_functional(const FbmPath& path, const WeightFunction& h, StatisticForm form,
                               int kappa = 3) {
    double c = 0.0;
    int order = 0;
    switch (form) {
        case StatisticForm::centered_quadratic:
            c = 0.25;
            order = 2;
            break;
        case StatisticForm::compensated_cubic:
            c = -0.125;
            order = 3;
            break;
        case StatisticForm::odd_weighted:
            if (kappa % 2 == 0) throw KappaError("odd_weighted limit requires odd kappa");
            c = -0.5 * gaussian_moment(kappa + 1);
            order = 1;
            break;
        default:
            throw DomainError("form " + std::string(to_string(form)) + " has no pathwise L2 limit");
    }
    const auto& g = h.evaluator(order);
    const auto v = path.values();
    double s = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) s += g(v[k]);
    return c * s / static_cast<double>(path.n());
}

enum class Regime {
    brownian_clt,
    breuer_major_clt,
    rosenblatt,
    odd_l2_drift,
    weighted_l2_quadratic,
    weighted_l2_cubic,
    mixing_conjecture,
    boundary_unsupported,
};

inline std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::brownian_clt: return "brownian_clt";
        case Regime::breuer_major_clt: return "breuer_major_clt";
        case Regime::rosenblatt: return "rosenblatt";
        case Regime::odd_l2_drift: return "odd_l2_drift";
        case Regime::weighted_l2_quadratic: return "weighted_l2_quadratic";
        case Regime::weighted_l2_cubic: return "weighted_l2_cubic";
        case Regime::mixing_conjecture: return "mixing_conjecture";
        case Regime::boundary_unsupported: return "boundary_unsupported";
    }
    return "?";
}

struct RegimeLabel {
    Regime label;
    /// The limit statement governing the cell, written out.
    std::string citation;
};

/// True for the threshold values 1/6, 1/4, 3/4 (to 1e-12).
inline bool is_boundary_hurst(double h) noexcept {
    for (double b : {1.0 / 6.0, 0.25, 0.75}) {
        if (std::abs(h - b) < 1e-12) return true;
    }
    return false;
}

inline RegimeLabel classify_regime(int kappa, const HurstIndex& hurst, bool weighted) {
    if (kappa < 2) throw KappaError("classify_regime requires kappa >= 2");
    const double h = hurst.value();
    const bool even = kappa % 2 == 0;

    if (std::abs(h - 0.5) < 1e-12) {
        if (!weighted) {
            return {Regime::brownian_clt,
                    "n^{-1/2} sum [n^{k/2} dB^k - mu_k] -> N(0, mu_{2k} - mu_k^2) in law, H = 1/2"};
        }
        return {Regime::brownian_clt,
                "n^{-1/2} sum h(B)[n^{k/2} dB^k - mu_k] -> mixed Gaussian int h(B_s) dW_s in law, H = 1/2"};
    }
    if (is_boundary_hurst(h)) {
        return {Regime::boundary_unsupported,
                "H in {1/6, 1/4, 3/4} is a regime threshold; limit theorems hold on open intervals only"};
    }

    if (!weighted) {
        if (even) {
            if (h < 0.75) {
                return {Regime::breuer_major_clt,
                        "n^{-1/2} sum [n^{kH} dB^k - mu_k] -> N(0, sigma_{H,k}^2) in law, k even, H in (0,3/4)"};
            }
            return {Regime::rosenblatt,
                    "n^{1-2H} sum [n^{kH} dB^k - mu_k] -> Rosenblatt r.v. in law, k even, H in (3/4,1)"};
        }
        if (h < 0.5) {
            return {Regime::breuer_major_clt,
                    "n^{-1/2} sum n^{kH} dB^k -> N(0, sigma_{H,k}^2) in law, k odd, H in (0,1/2]"};
        }
        return {Regime::breuer_major_clt,
                "n^{-H} sum n^{kH} dB^k -> N(0, sigma_{H,k}^2) in law, k odd, H in (1/2,1)"};
    }

    if (even) {
        if (kappa == 2 && h < 0.25) {
            return {Regime::weighted_l2_quadratic,
                    "n^{2H-1} sum h(B)[n^{2H} dB^2 - 1] -> (1/4) int_0^1 h''(B_u) du in L2, H in (0,1/4)"};
        }
        if (h < 0.5) {
            return {Regime::mixing_conjecture,
                    "n^{-1/2} sum h(B)[n^{2H} dB^2 - 1] -> sigma_H int_0^1 h(B_s) dW_s in law (conjectured; "
                    "second moment ~ sigma_H^2 n E int h^2(B)), H in (1/4,1/2)"};
        }
        if (h < 0.75) {
            return {Regime::mixing_conjecture,
                    "n^{-1/2} sum h(B)[n^{kH} dB^k - mu_k] -> sigma_{H,k} int_0^1 h(B_s) dW_s in law, k even, "
                    "H in (1/2,3/4)"};
        }
        return {Regime::rosenblatt,
                "weighted, k even, H in (3/4,1): Rosenblatt-type regime (classification only)"};
    }

    if (kappa == 3 && h < 1.0 / 6.0) {
        return {Regime::weighted_l2_cubic,
                "n^{3H-1} sum [h(B) n^{3H} dB^3 + (3/2) h'(B) n^{-H}] -> -(1/8) int_0^1 h'''(B_u) du in L2, "
                "H in (0,1/6)"};
    }
    if (h < 0.5) {
        return {Regime::odd_l2_drift,
                "n^{H-1} sum h(B) n^{kH} dB^k -> -(mu_{k+1}/2) int_0^1 h'(B_s) ds in L2, k odd, H in (0,1/2)"};
    }
    return {Regime::mixing_conjecture,
            "weighted, k odd, H in (1/2,1): no limit statement available (classification only)"};
}

/// Whether `form` is a valid left-hand side in the regime of (kappa, H).
inline bool form_matches_regime(StatisticForm form, const RegimeLabel& regime, const HurstIndex& hurst) {
    const Regime r = regime.label;
    switch (form) {
        case StatisticForm::centered_quadratic: return r == Regime::weighted_l2_quadratic;
        case StatisticForm::compensated_cubic: return r == Regime::weighted_l2_cubic;
        // The drift limit also holds below 1/6, where the finer cubic result refines it.
        case StatisticForm::odd_weighted: return r == Regime::odd_l2_drift || r == Regime::weighted_l2_cubic;
        case StatisticForm::unweighted_centered:
            return r == Regime::brownian_clt || r == Regime::breuer_major_clt;
        case StatisticForm::unweighted_odd:
            return r == Regime::brownian_clt || (r == Regime::breuer_major_clt && hurst.value() < 0.5);
        case StatisticForm::mixing_normalized:
            return r == Regime::brownian_clt || r == Regime::mixing_conjecture;
        case StatisticForm::raw_weighted: return false;
    }
    return false;
}

} // namespace fbmvar
