#pragma once

// Subcommand implementations behind the fbmvar executable. Each returns the
// process exit status and writes data to `out`, diagnostics to `err`.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "fbmvar/config.hpp"
#include "fbmvar/errors.hpp"
#include "fbmvar/harness.hpp"
#include "fbmvar/kernels.hpp"
#include "fbmvar/report.hpp"
#include "fbmvar/sampler.hpp"
#include "fbmvar/statistics.hpp"
#include "fbmvar/weights.hpp"

namespace fbmvar {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitRegime = 3,
    kExitEmbedding = 4,
};

struct RunArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    unsigned threads = 0;
    bool dump_paths = false;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    writer(os);
    if (!os) throw Error("error while writing " + path.string());
}

} // namespace detail

inline int cmd_run(const RunArgs& args, std::ostream& err,
                   const WeightRegistry& weights = builtin_registry()) {
    std::vector<PlanEntry> plans;
    try {
        plans = load_config(args.config_path, weights);
        for (auto& p : plans) {
            if (args.seed) p.plan.seed = *args.seed;
            if (args.replicas) p.plan.replicas = *args.replicas;
            p.plan.validate();
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) {
        err << "cannot create output directory " << args.out_dir << ": " << ec.message() << '\n';
        return kExitFailure;
    }

    RunOptions options;
    options.threads = args.threads;
    options.weights = &weights;
    for (const auto& entry : plans) {
        try {
            const McReport report = run_plan(entry.plan, options);
            const fs::path stem = fs::path(args.out_dir) / entry.output_stem;
            detail::write_file(stem.string() + ".csv", [&](std::ostream& os) { write_csv(os, entry.plan, report); });
            detail::write_file(stem.string() + ".json",
                               [&](std::ostream& os) { write_json(os, entry.name, entry.plan, report); });
            detail::write_file(stem.string() + ".dat", [&](std::ostream& os) { write_dat(os, report); });
            if (args.dump_paths) {
                for (std::size_t n : entry.plan.n_ladder) {
                    const FbmPath path = PathSampler(entry.plan.hurst, n, entry.plan.sampler).sample(entry.plan.seed, 0);
                    detail::write_file(stem.string() + "_path_n" + std::to_string(n) + ".txt",
                                       [&](std::ostream& os) { write_path_text(os, path); });
                }
            }
            err << "plan " << entry.name << ": wrote " << stem.string() << ".{csv,json,dat}\n";
        } catch (const RegimeError& e) {
            err << "regime error in plan " << entry.name << ": " << e.what() << '\n';
            return kExitRegime;
        } catch (const EmbeddingError& e) {
            err << "sampler error in plan " << entry.name << ": " << e.what() << '\n';
            return kExitEmbedding;
        } catch (const std::exception& e) {
            err << "error in plan " << entry.name << ": " << e.what() << '\n';
            return kExitFailure;
        }
    }
    return kExitOk;
}

struct RegimesArgs {
    int kappa_min = 2;
    int kappa_max = 6;
    double step = 0.01;
    std::string csv_path;
};

/// Interior grid {k * step : 0 < k * step < 1}, rounded to 12 significant digits.
inline std::vector<double> hurst_grid(double step) {
    if (!(step > 0.0) || step >= 1.0) throw DomainError("H grid step must lie in (0,1)");
    std::vector<double> grid;
    for (int k = 1;; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", k * step);
        const double h = std::stod(buf);
        if (h >= 1.0 - 1e-12) break;
        grid.push_back(h);
    }
    return grid;
}

inline int cmd_regimes(const RegimesArgs& args, std::ostream& out, std::ostream& err) {
    if (args.kappa_min < 2 || args.kappa_max < args.kappa_min) {
        err << "kappa range must satisfy 2 <= min <= max\n";
        return kExitConfig;
    }
    std::vector<double> grid;
    try {
        grid = hurst_grid(args.step);
    } catch (const DomainError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    }

    std::ofstream csv;
    if (!args.csv_path.empty()) {
        csv.open(args.csv_path, std::ios::binary);
        if (!csv) {
            err << "cannot write " << args.csv_path << '\n';
            return kExitFailure;
        }
        csv << "H,kappa,unweighted_label,unweighted_citation,weighted_label,weighted_citation\n";
    }

    out << "# regime table: kappa in [" << args.kappa_min << ", " << args.kappa_max << "], H = k*" << args.step
        << " for k = 1.." << grid.size() << '\n';
    out << "# H = 1/2 is the Brownian case; H in {1/6, 1/4, 3/4} is reported as boundary_unsupported\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %-5s %-22s %-22s\n", "H", "kappa", "unweighted", "weighted");
    out << line;

    std::map<std::string, std::set<std::string>> citations;
    auto quote = [](const std::string& s) { return '"' + s + '"'; };
    for (double h : grid) {
        const HurstIndex hurst(h);
        for (int kappa = args.kappa_min; kappa <= args.kappa_max; ++kappa) {
            const RegimeLabel plain = classify_regime(kappa, hurst, false);
            const RegimeLabel weighted = classify_regime(kappa, hurst, true);
            std::snprintf(line, sizeof line, "%-8.6g %-5d %-22s %-22s\n", h, kappa,
                          std::string(to_string(plain.label)).c_str(),
                          std::string(to_string(weighted.label)).c_str());
            out << line;
            citations[std::string(to_string(plain.label))].insert(plain.citation);
            citations[std::string(to_string(weighted.label))].insert(weighted.citation);
            if (csv.is_open()) {
                csv << format_real(h) << ',' << kappa << ',' << to_string(plain.label) << ','
                    << quote(plain.citation) << ',' << to_string(weighted.label) << ','
                    << quote(weighted.citation) << '\n';
            }
        }
    }
    out << "#\n# citations\n";
    for (const auto& [label, cites] : citations) {
        for (const auto& c : cites) out << "# " << label << ": " << c << '\n';
    }
    return kExitOk;
}

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast invariant checks: kernel identities, the Cholesky oracle at n = 64,
/// circulant spectrum sign, and finite-difference checks of every registered weight.
inline std::vector<SelftestCheck> run_selftest_checks(const WeightRegistry& weights) {
    std::vector<SelftestCheck> checks;
    auto record = [&](std::string name, bool ok, double value) {
        checks.push_back({std::move(name), ok, "value=" + format_real(value)});
    };

    const double hs[] = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
    {
        double worst_eps = 0.0, worst_dd = 0.0;
        for (double hv : hs) {
            const HurstIndex H(hv);
            for (std::int64_t n = 1; n <= 32; ++n) {
                const double dn = static_cast<double>(n);
                for (std::int64_t k = 0; k < n; ++k) {
                    for (std::int64_t l = 0; l < n; ++l) {
                        const GridIndexPair g(n, k, l);
                        const double tk = k / dn, tk1 = (k + 1) / dn, tl = l / dn, tl1 = (l + 1) / dn;
                        const double ed = covariance(H, tl, tk1) - covariance(H, tl, tk);
                        const double dd = covariance(H, tk1, tl1) - covariance(H, tk1, tl) -
                                          covariance(H, tk, tl1) + covariance(H, tk, tl);
                        worst_eps = std::max(worst_eps, std::abs(eps_delta_inner(H, g) - ed));
                        worst_dd = std::max(worst_dd, std::abs(delta_delta_inner(H, g) - dd));
                    }
                }
            }
        }
        record("kernels/eps_delta_vs_covariance", worst_eps < 1e-12, worst_eps);
        record("kernels/delta_delta_vs_covariance", worst_dd < 1e-12, worst_dd);
    }
    {
        bool ok = true;
        double lo = 1.0, hi = 0.0;
        for (double hv : {0.05, 0.15, 0.25, 0.35, 0.5}) {
            const HurstIndex H(hv);
            for (int i = 0; i <= 10000; ++i) {
                const double x = 1e6 * std::pow(i / 10000.0, 3.0);
                const double g = unit_step_power_gap(H, x);
                lo = std::min(lo, g);
                hi = std::max(hi, g);
                ok = ok && g >= 0.0 && g <= 1.0;
            }
        }
        record("kernels/unit_step_gap_in_unit_interval", ok, hi - lo);
    }
    {
        const HurstIndex H(0.3);
        const std::int64_t lag = 1000;
        const double expected = std::pow(lag + 1.0, H.two_h()) - std::pow(static_cast<double>(lag), H.two_h());
        const double rel = std::abs(autocov_partial_sum(H, lag) - expected) / expected;
        record("kernels/autocov_telescoping", rel < 1e-9, rel);
    }
    {
        const double v = breuer_major_variance(BreuerMajorSpec(HurstIndex(0.5), 2, 2, 1000));
        record("kernels/breuer_major_brownian_kappa2", std::abs(v - 2.0) < 1e-12, v);
    }
    {
        double worst = 0.0;
        for (double hv : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const CholeskySampler s(HurstIndex(hv), 64);
            const Eigen::MatrixXd rebuilt = s.factor() * s.factor().transpose();
            worst = std::max(worst, (rebuilt - s.covariance_matrix()).cwiseAbs().maxCoeff());
        }
        record("sampler/cholesky_reconstruction_n64", worst < 1e-10, worst);
    }
    {
        double worst = 0.0;
        for (double hv : {0.05, 0.25, 0.5, 0.75, 0.95}) {
            const CirculantSampler s(HurstIndex(hv), 64);
            const auto eig = s.eigenvalues();
            const double mx = *std::max_element(eig.begin(), eig.end());
            worst = std::min(worst, s.min_eigenvalue() / mx);
        }
        record("sampler/circulant_spectrum_n64", worst >= -CirculantSampler::kNegativeTolerance, worst);
    }

    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(0.25 * i);
    constexpr double step = 1e-4;
    for (const auto& id : weights.ids()) {
        const WeightFunction& w = weights.get(id);
        for (int order = 1; order <= w.max_order(); ++order) {
            const double e = check_derivatives(w, order, grid, step);
            const double tol = w.fd_constant() * step * step + 1e-9;
            record("weights/" + id + "/order" + std::to_string(order), e <= tol, e);
        }
    }
    return checks;
}

inline int cmd_selftest(std::ostream& out, const WeightRegistry& weights = builtin_registry()) {
    bool all = true;
    for (const auto& c : run_selftest_checks(weights)) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ' ' << c.detail << '\n';
        all = all && c.passed;
    }
    out << (all ? "selftest: all checks passed" : "selftest: FAILED") << '\n';
    return all ? kExitOk : kExitFailure;
}

} // namespace fbmvar
