#pragma once

// Weight functions h with analytic derivatives h, h', ..., h^(m).
//
// Only polynomials and bounded smooth functions are registered: both have
// finite Gaussian moments of every order for each derivative, which is what
// the weighted limit theorems require of h.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbmvar/errors.hpp"

namespace fbmvar {

enum class GrowthClass { polynomial, bounded_smooth };

inline const char* to_string(GrowthClass g) noexcept {
    return g == GrowthClass::polynomial ? "polynomial" : "bounded_smooth";
}

/// |h^(i)(x)| <= constant * (1 + |x|^degree) for every registered order i.
struct GrowthBound {
    double constant = 1.0;
    double degree = 0.0;
};

class WeightFunction {
public:
    using Evaluator = std::function<double(double)>;

    /// `fd_constant` is the C in |central difference - exact| <= C * step^2,
    /// fitted per weight on [-5, 5].
    WeightFunction(std::string id, std::vector<Evaluator> evaluators, GrowthClass growth,
                   GrowthBound bound, double fd_constant)
        : id_(std::move(id)),
          evaluators_(std::move(evaluators)),
          growth_(growth),
          bound_(bound),
          fd_constant_(fd_constant) {
        if (evaluators_.empty()) throw DomainError("weight '" + id_ + "' has no evaluators");
    }

    const std::string& id() const noexcept { return id_; }
    int max_order() const noexcept { return static_cast<int>(evaluators_.size()) - 1; }
    GrowthClass growth_class() const noexcept { return growth_; }
    const GrowthBound& growth_bound() const noexcept { return bound_; }
    double fd_constant() const noexcept { return fd_constant_; }

    double operator()(double x) const { return evaluators_[0](x); }

    double derivative(int order, double x) const { return evaluator(order)(x); }

    const Evaluator& evaluator(int order) const {
        require_order(order);
        return evaluators_[static_cast<std::size_t>(order)];
    }

    void require_order(int order) const {
        if (order < 0 || order > max_order()) {
            throw OrderError("weight '" + id_ + "' provides derivatives up to order " +
                             std::to_string(max_order()) + ", requested " + std::to_string(order));
        }
    }

private:
    std::string id_;
    std::vector<Evaluator> evaluators_;
    GrowthClass growth_;
    GrowthBound bound_;
    double fd_constant_;
};

/// a*f + b*g, derivatives up to the smaller of the two orders.
inline WeightFunction linear_combination(double a, const WeightFunction& f, double b,
                                         const WeightFunction& g) {
    const int order = std::min(f.max_order(), g.max_order());
    std::vector<WeightFunction::Evaluator> ev;
    for (int i = 0; i <= order; ++i) {
        ev.emplace_back([a, b, fi = f.evaluator(i), gi = g.evaluator(i)](double x) {
            return a * fi(x) + b * gi(x);
        });
    }
    const bool poly = f.growth_class() == GrowthClass::polynomial ||
                      g.growth_class() == GrowthClass::polynomial;
    const GrowthBound bound{std::abs(a) * f.growth_bound().constant + std::abs(b) * g.growth_bound().constant,
                            std::max(f.growth_bound().degree, g.growth_bound().degree)};
    char id[160];
    std::snprintf(id, sizeof id, "%.17g*%s+%.17g*%s", a, f.id().c_str(), b, g.id().c_str());
    return WeightFunction(id, std::move(ev), poly ? GrowthClass::polynomial : GrowthClass::bounded_smooth,
                          bound, std::abs(a) * f.fd_constant() + std::abs(b) * g.fd_constant());
}

class WeightRegistry {
public:
    void add(WeightFunction w) {
        const std::string id = w.id();
        weights_.insert_or_assign(id, std::move(w));
    }

    const WeightFunction& get(const std::string& id) const {
        auto it = weights_.find(id);
        if (it == weights_.end()) throw UnknownWeight("unknown weight '" + id + "'");
        return it->second;
    }

    bool contains(const std::string& id) const { return weights_.contains(id); }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& [id, w] : weights_) out.push_back(id);
        return out;
    }

private:
    std::map<std::string, WeightFunction> weights_;
};

namespace detail {

inline constexpr int kBuiltinOrder = 6;

inline WeightFunction monomial(const std::string& id, int degree, GrowthBound bound, double fd_c) {
    std::vector<WeightFunction::Evaluator> ev;
    for (int i = 0; i <= kBuiltinOrder; ++i) {
        if (i > degree) {
            ev.emplace_back([](double) { return 0.0; });
            continue;
        }
        double coeff = 1.0;
        for (int j = 0; j < i; ++j) coeff *= degree - j;
        const int power = degree - i;
        ev.emplace_back([coeff, power](double x) {
            double p = coeff;
            for (int j = 0; j < power; ++j) p *= x;
            return p;
        });
    }
    return WeightFunction(id, std::move(ev), GrowthClass::polynomial, bound, fd_c);
}

/// sin/cos: the i-th derivative of sin(x + phase) is sin(x + phase + i*pi/2).
inline WeightFunction trig(const std::string& id, bool is_cos) {
    std::vector<WeightFunction::Evaluator> ev;
    for (int i = 0; i <= kBuiltinOrder; ++i) {
        const int shift = (i + (is_cos ? 1 : 0)) % 4;
        ev.emplace_back([shift](double x) {
            switch (shift) {
                case 0: return std::sin(x);
                case 1: return std::cos(x);
                case 2: return -std::sin(x);
                default: return -std::cos(x);
            }
        });
    }
    return WeightFunction(id, std::move(ev), GrowthClass::bounded_smooth, {1.0, 0.0}, 0.2);
}

/// d^i/dx^i exp(-x^2) = (-1)^i H_i(x) exp(-x^2), H_i the physicists' Hermite polynomials.
inline WeightFunction gaussian_bump() {
    std::vector<WeightFunction::Evaluator> ev;
    for (int i = 0; i <= kBuiltinOrder; ++i) {
        ev.emplace_back([i](double x) {
            double prev = 1.0;
            double cur = 2.0 * x;
            if (i == 0) cur = 1.0;
            for (int j = 1; j < i; ++j) {
                const double next = 2.0 * x * cur - 2.0 * j * prev;
                prev = cur;
                cur = next;
            }
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            return sign * cur * std::exp(-x * x);
        });
    }
    return WeightFunction("exp_neg_x2", std::move(ev), GrowthClass::bounded_smooth, {120.0, 0.0}, 600.0);
}

} // namespace detail

/// The built-in weights: one, x, x2, x3, sin, cos, exp_neg_x2.
inline WeightRegistry make_builtin_registry() {
    WeightRegistry r;
    r.add(detail::monomial("one", 0, {1.0, 0.0}, 0.0));
    r.add(detail::monomial("x", 1, {1.0, 1.0}, 1.0));
    r.add(detail::monomial("x2", 2, {2.0, 2.0}, 1.0));
    r.add(detail::monomial("x3", 3, {6.0, 3.0}, 2.0));
    r.add(detail::trig("sin", false));
    r.add(detail::trig("cos", true));
    r.add(detail::gaussian_bump());
    return r;
}

inline const WeightRegistry& builtin_registry() {
    static const WeightRegistry registry = make_builtin_registry();
    return registry;
}

inline const WeightFunction& builtin(const std::string& id) { return builtin_registry().get(id); }

/// max over the grid of |(h^(order-1)(x+s) - h^(order-1)(x-s)) / 2s - h^(order)(x)|.
inline double check_derivatives(const WeightFunction& w, int order, std::span<const double> grid,
                                double step) {
    if (order < 1 || order > w.max_order()) {
        throw OrderError("check_derivatives: order " + std::to_string(order) + " outside [1, " +
                         std::to_string(w.max_order()) + "] for weight '" + w.id() + "'");
    }
    if (!(step > 0.0)) throw DomainError("check_derivatives: step must be positive");
    const auto& lower = w.evaluator(order - 1);
    const auto& upper = w.evaluator(order);
    double worst = 0.0;
    for (double x : grid) {
        const double fd = (lower(x + step) - lower(x - step)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - upper(x)));
    }
    return worst;
}

} // namespace fbmvar
