#pragma once

// Report files: CSV (one row per ladder entry), JSON summary with the rate
// fit, and a two-column .dat file of (log n, log y) for plotting.
// Reals are written with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fbmvar/harness.hpp"

namespace fbmvar {

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline constexpr const char* kCsvHeader =
    "n,H,kappa,weight,form,l2_error,stderr,stat_mean,stat_var,skewness,excess_kurtosis";

inline void write_csv(std::ostream& os, const ExperimentPlan& plan, const McReport& report) {
    os << kCsvHeader << '\n';
    for (const auto& r : report.records) {
        os << r.n << ',' << format_real(plan.hurst.value()) << ',' << plan.spec.kappa << ','
           << plan.spec.weight << ',' << to_string(plan.spec.form) << ',' << format_real(r.l2_error) << ','
           << format_real(r.std_error) << ',' << format_real(r.stat_mean) << ',' << format_real(r.stat_var)
           << ',' << format_real(r.skewness) << ',' << format_real(r.excess_kurtosis) << '\n';
    }
}

inline nlohmann::ordered_json report_json(const std::string& name, const ExperimentPlan& plan,
                                          const McReport& report) {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["hurst"] = plan.hurst.value();
    j["kappa"] = plan.spec.kappa;
    j["weight"] = plan.spec.weight;
    j["form"] = std::string(to_string(plan.spec.form));
    j["regime"] = std::string(to_string(classify_regime(plan.spec.kappa, plan.hurst,
                                                        is_weighted(plan.spec.form)).label));
    j["sampler"] = std::string(to_string(plan.sampler));
    j["seed"] = plan.seed;
    j["replicas"] = plan.replicas;
    j["n_ladder"] = plan.n_ladder;
    auto& recs = j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
        recs.push_back({{"n", r.n},
                        {"l2_error", r.l2_error},
                        {"stderr", r.std_error},
                        {"stat_mean", r.stat_mean},
                        {"stat_var", r.stat_var},
                        {"skewness", r.skewness},
                        {"excess_kurtosis", r.excess_kurtosis}});
    }
    j["rate_fit_target"] = report.rate_fit_target;
    if (report.rate_fit) {
        j["rate_fit"] = {{"slope", report.rate_fit->slope},
                         {"intercept", report.rate_fit->intercept},
                         {"r_squared", report.rate_fit->r_squared}};
    } else {
        j["rate_fit"] = nullptr;
    }
    return j;
}

inline void write_json(std::ostream& os, const std::string& name, const ExperimentPlan& plan,
                       const McReport& report) {
    os << report_json(name, plan, report).dump(2) << '\n';
}

/// "log(n) log(y)" per record, y = the rate-fit target column; non-positive y skipped.
inline void write_dat(std::ostream& os, const McReport& report) {
    const bool l2 = report.rate_fit_target != "stat_var";
    os << "# log_n log_" << (l2 ? "l2_error" : "stat_var") << '\n';
    for (const auto& r : report.records) {
        const double y = l2 ? r.l2_error : r.stat_var;
        if (!(y > 0.0)) continue;
        os << format_real(std::log(static_cast<double>(r.n))) << ' ' << format_real(std::log(y)) << '\n';
    }
}

} // namespace fbmvar
