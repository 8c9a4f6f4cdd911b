#pragma once

// Monte Carlo estimation over a ladder of grid sizes n.
//
// Replica r of every ladder entry draws its path from stream r of the plan
// seed. Workers only fill per-replica slots; all reductions run afterwards in
// replica order with pairwise summation, so a report is bit-identical for
// any thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fbmvar/errors.hpp"
#include "fbmvar/kernels.hpp"
#include "fbmvar/sampler.hpp"
#include "fbmvar/statistics.hpp"
#include "fbmvar/weights.hpp"

namespace fbmvar {

struct ExperimentPlan {
    HurstIndex hurst{0.1};
    StatisticSpec spec;
    std::vector<std::size_t> n_ladder;
    std::size_t replicas = 2;
    std::uint64_t seed = 0;
    SamplerMethod sampler = SamplerMethod::circulant;

    void validate() const {
        spec.validate();
        if (n_ladder.empty()) throw DomainError("n_ladder must not be empty");
        for (std::size_t i = 0; i < n_ladder.size(); ++i) {
            if (n_ladder[i] < 1) throw DomainError("n_ladder entries must be positive");
            if (i > 0 && n_ladder[i] <= n_ladder[i - 1]) {
                throw DomainError("n_ladder must be strictly increasing");
            }
        }
        if (replicas < 2) throw DomainError("replicas must be >= 2");
    }
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// One ladder entry. For CLT diagnostics l2_error is 0 and std_error is the
/// standard error of stat_var instead of l2_error.
struct McRecord {
    std::size_t n = 0;
    double l2_error = 0.0;
    double std_error = 0.0;
    double stat_mean = 0.0;
    double stat_var = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct McReport {
    std::vector<McRecord> records;
    std::optional<RateFit> rate_fit;
    /// "l2_error" or "stat_var": which column rate_fit regresses on n.
    std::string rate_fit_target;
};

struct RunOptions {
    /// Worker threads; 0 means one per hardware thread.
    unsigned threads = 1;
    const WeightRegistry* weights = nullptr;
};

/// Pairwise (cascade) summation in index order.
inline double pairwise_sum(std::span<const double> x) noexcept {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct SampleMoments {
    double mean = 0.0;
    double var = 0.0;       // unbiased
    double m2 = 0.0;        // central moments, 1/N normalized
    double m3 = 0.0;
    double m4 = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

inline SampleMoments sample_moments(std::span<const double> x) {
    const auto count = static_cast<double>(x.size());
    SampleMoments m;
    if (x.empty()) return m;
    m.mean = pairwise_sum(x) / count;
    std::vector<double> d2(x.size()), d3(x.size()), d4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - m.mean;
        d2[i] = d * d;
        d3[i] = d2[i] * d;
        d4[i] = d2[i] * d2[i];
    }
    const double ss = pairwise_sum(d2);
    m.m2 = ss / count;
    m.m3 = pairwise_sum(d3) / count;
    m.m4 = pairwise_sum(d4) / count;
    m.var = x.size() > 1 ? ss / (count - 1.0) : 0.0;
    if (m.m2 > 0.0) {
        m.skewness = m.m3 / std::pow(m.m2, 1.5);
        m.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;
    }
    return m;
}

/// Ordinary least squares of log(error) on log(n).
inline RateFit fit_rate(std::span<const double> ns, std::span<const double> errors) {
    if (ns.size() != errors.size()) throw DegenerateFit("fit_rate: ns and errors differ in length");
    if (ns.size() < 3) throw DegenerateFit("fit_rate: need at least 3 points");
    std::vector<double> lx(ns.size()), ly(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) {
            throw DegenerateFit("fit_rate: errors must be positive and finite");
        }
        if (!(ns[i] > 0.0)) throw DegenerateFit("fit_rate: n must be positive");
        lx[i] = std::log(ns[i]);
        ly[i] = std::log(errors[i]);
    }
    const double count = static_cast<double>(ns.size());
    const double mx = pairwise_sum(lx) / count;
    const double my = pairwise_sum(ly) / count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw DegenerateFit("fit_rate: all n are equal");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

namespace detail {

/// Calls body(r) for r in [0, count) across `threads` workers. Slots are
/// claimed in fixed-size chunks; the body must only write to slot r.
template <class Body>
void parallel_for_replicas(std::size_t count, unsigned threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t r = 0; r < count; ++r) body(r);
        return;
    }
    constexpr std::size_t kChunk = 16;
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                try {
                    for (;;) {
                        const std::size_t begin = next.fetch_add(kChunk);
                        if (begin >= count) return;
                        const std::size_t end = std::min(count, begin + kChunk);
                        for (std::size_t r = begin; r < end; ++r) body(r);
                    }
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(count);
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

inline const WeightRegistry& registry_of(const RunOptions& opt) {
    return opt.weights != nullptr ? *opt.weights : builtin_registry();
}

inline bool is_l2_form(StatisticForm f) noexcept {
    return f == StatisticForm::centered_quadratic || f == StatisticForm::compensated_cubic ||
           f == StatisticForm::odd_weighted;
}

inline bool is_clt_form(StatisticForm f) noexcept {
    return f == StatisticForm::unweighted_centered || f == StatisticForm::unweighted_odd ||
           f == StatisticForm::mixing_normalized;
}

inline void require_regime(const ExperimentPlan& plan) {
    const RegimeLabel regime = classify_regime(plan.spec.kappa, plan.hurst, is_weighted(plan.spec.form));
    if (!form_matches_regime(plan.spec.form, regime, plan.hurst)) {
        throw RegimeError("form " + std::string(to_string(plan.spec.form)) + " with kappa=" +
                          std::to_string(plan.spec.kappa) + " is not valid at H=" +
                          std::to_string(plan.hurst.value()) + " (regime " +
                          std::string(to_string(regime.label)) + ")");
    }
}

inline std::optional<RateFit> try_fit(const std::vector<McRecord>& records, double McRecord::*field) {
    std::vector<double> ns, ys;
    for (const auto& r : records) {
        ns.push_back(static_cast<double>(r.n));
        ys.push_back(r.*field);
    }
    try {
        return fit_rate(ns, ys);
    } catch (const DegenerateFit&) {
        return std::nullopt;
    }
}

} // namespace detail

/// E[(stat - limit)^2] per ladder entry, with stat and limit on the same path.
inline McReport run_l2_experiment(const ExperimentPlan& plan, const RunOptions& options = {}) {
    plan.validate();
    if (!detail::is_l2_form(plan.spec.form)) {
        throw DomainError("run_l2_experiment needs centered_quadratic, compensated_cubic or odd_weighted");
    }
    detail::require_regime(plan);
    const WeightFunction& h = detail::registry_of(options).get(plan.spec.weight);

    McReport report;
    report.rate_fit_target = "l2_error";
    std::vector<double> stats(plan.replicas), gaps(plan.replicas);
    for (std::size_t n : plan.n_ladder) {
        const PathSampler sampler(plan.hurst, n, plan.sampler);
        detail::parallel_for_replicas(plan.replicas, options.threads, [&](std::size_t r) {
            const FbmPath path = sampler.sample(plan.seed, r);
            const double stat = evaluate_statistic(plan.spec, path, h);
            const double limit = limit_functional(path, h, plan.spec.form, plan.spec.kappa);
            stats[r] = stat;
            gaps[r] = (stat - limit) * (stat - limit);
        });
        const SampleMoments sm = sample_moments(stats);
        const SampleMoments gm = sample_moments(gaps);
        McRecord rec;
        rec.n = n;
        rec.l2_error = gm.mean;
        rec.std_error = std::sqrt(gm.var / static_cast<double>(plan.replicas));
        rec.stat_mean = sm.mean;
        rec.stat_var = sm.var;
        rec.skewness = sm.skewness;
        rec.excess_kurtosis = sm.excess_kurtosis;
        report.records.push_back(rec);
    }
    report.rate_fit = detail::try_fit(report.records, &McRecord::l2_error);
    return report;
}

/// Variance and normality moments of a CLT-normalized statistic per ladder entry.
inline McReport run_clt_diagnostics(const ExperimentPlan& plan, const RunOptions& options = {}) {
    plan.validate();
    if (!detail::is_clt_form(plan.spec.form)) {
        throw DomainError("run_clt_diagnostics needs unweighted_centered, unweighted_odd or mixing_normalized");
    }
    detail::require_regime(plan);
    const WeightFunction& h = detail::registry_of(options).get(plan.spec.weight);

    McReport report;
    report.rate_fit_target = "stat_var";
    std::vector<double> stats(plan.replicas);
    for (std::size_t n : plan.n_ladder) {
        const PathSampler sampler(plan.hurst, n, plan.sampler);
        detail::parallel_for_replicas(plan.replicas, options.threads, [&](std::size_t r) {
            stats[r] = evaluate_statistic(plan.spec, sampler.sample(plan.seed, r), h);
        });
        const SampleMoments sm = sample_moments(stats);
        McRecord rec;
        rec.n = n;
        rec.l2_error = 0.0;
        // Delta-method standard error of the sample variance.
        rec.std_error = std::sqrt(std::max(sm.m4 - sm.m2 * sm.m2, 0.0) / static_cast<double>(plan.replicas));
        rec.stat_mean = sm.mean;
        rec.stat_var = sm.var;
        rec.skewness = sm.skewness;
        rec.excess_kurtosis = sm.excess_kurtosis;
        report.records.push_back(rec);
    }
    report.rate_fit = detail::try_fit(report.records, &McRecord::stat_var);
    return report;
}

/// Dispatches to run_l2_experiment or run_clt_diagnostics by form.
inline McReport run_plan(const ExperimentPlan& plan, const RunOptions& options = {}) {
    if (detail::is_l2_form(plan.spec.form)) return run_l2_experiment(plan, options);
    if (detail::is_clt_form(plan.spec.form)) return run_clt_diagnostics(plan, options);
    throw DomainError("form " + std::string(to_string(plan.spec.form)) + " cannot be run as an experiment");
}

} // namespace fbmvar
