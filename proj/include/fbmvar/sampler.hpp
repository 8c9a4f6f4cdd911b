#pragma once

// Exact simulation of fractional Brownian motion on the grid {k/n, k = 0..n}.
//
// CirculantSampler embeds the Toeplitz autocovariance of the n increments
// into a circulant matrix of size 2n (Davies-Harte); CholeskySampler factors
// the n x n path covariance directly and serves as the reference.

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fbmvar/errors.hpp"
#include "fbmvar/kernels.hpp"
#include "fbmvar/rng.hpp"

namespace fbmvar {

enum class SamplerMethod { cholesky, circulant };

inline std::string_view to_string(SamplerMethod m) noexcept {
    return m == SamplerMethod::cholesky ? "cholesky" : "circulant";
}

inline SamplerMethod parse_sampler_method(std::string_view s) {
    if (s == "cholesky") return SamplerMethod::cholesky;
    if (s == "circulant") return SamplerMethod::circulant;
    throw DomainError("unknown sampler method '" + std::string(s) + "'");
}

struct SamplerConfig {
    SamplerMethod method = SamplerMethod::circulant;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Identifies the random stream a path was drawn from.
struct SeedTag {
    SamplerMethod method = SamplerMethod::circulant;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const SeedTag&, const SeedTag&) = default;
};

/// One trajectory (B_0, B_{1/n}, ..., B_1). Immutable after construction.
class FbmPath {
public:
    FbmPath(HurstIndex hurst, std::vector<double> values, SeedTag tag = {})
        : hurst_(hurst), values_(std::move(values)), tag_(tag) {
        if (values_.size() < 2) throw DomainError("FbmPath needs at least two grid values");
        if (values_.front() != 0.0) throw DomainError("FbmPath must start at B_0 = 0");
    }

    const HurstIndex& hurst() const noexcept { return hurst_; }
    std::size_t n() const noexcept { return values_.size() - 1; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    const SeedTag& seed_tag() const noexcept { return tag_; }

private:
    HurstIndex hurst_;
    std::vector<double> values_;
    SeedTag tag_;
};

/// dB_{k/n} = B_{(k+1)/n} - B_{k/n}, k = 0..n-1.
inline std::vector<double> increments(const FbmPath& path) {
    const auto v = path.values();
    std::vector<double> d(path.n());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = v[k + 1] - v[k];
    return d;
}

namespace detail {

// FFTW's planner is not thread-safe; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline FftwBuffer fftw_buffer(std::size_t size) {
    auto* p = fftw_alloc_complex(size);
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer(p);
}

} // namespace detail

class CirculantSampler {
public:
    /// Negative eigenvalues above -kNegativeTolerance * max are clamped to zero.
    static constexpr double kNegativeTolerance = 1e-9;

    CirculantSampler(HurstIndex hurst, std::size_t n) : hurst_(hurst), n_(n) {
        if (n < 1) throw DomainError("grid size n must be positive");
        const std::size_t m = 2 * n;
        auto in = detail::fftw_buffer(m);
        auto out = detail::fftw_buffer(m);
        fftw_plan raw = nullptr;
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            raw = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        }
        if (raw == nullptr) throw EmbeddingError("FFTW could not create a plan of size " + std::to_string(m));
        plan_ = std::shared_ptr<fftw_plan_s>(raw, detail::FftwPlanDeleter{});

        const double scale = std::pow(static_cast<double>(n), -hurst.two_h());
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t lag = j <= n ? j : m - j;
            in[j][0] = scale * increment_autocov(hurst, static_cast<std::int64_t>(lag));
            in[j][1] = 0.0;
        }
        fftw_execute_dft(plan_.get(), in.get(), out.get());

        eigenvalues_.resize(m);
        double max_eig = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            eigenvalues_[j] = out[j][0];
            max_eig = std::max(max_eig, eigenvalues_[j]);
        }
        min_eigenvalue_ = *std::min_element(eigenvalues_.begin(), eigenvalues_.end());
        if (min_eigenvalue_ < -kNegativeTolerance * max_eig) {
            throw EmbeddingError("circulant embedding has eigenvalue " + std::to_string(min_eigenvalue_) +
                                 " (max " + std::to_string(max_eig) + ")");
        }
        amplitude_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            amplitude_[j] = std::sqrt(std::max(eigenvalues_[j], 0.0) / static_cast<double>(m));
        }
    }

    const HurstIndex& hurst() const noexcept { return hurst_; }
    std::size_t n() const noexcept { return n_; }
    /// Unclamped spectrum of the embedding circulant.
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

    FbmPath sample(std::uint64_t seed, std::uint64_t stream) const {
        const std::size_t m = 2 * n_;
        auto in = detail::fftw_buffer(m);
        auto out = detail::fftw_buffer(m);
        GaussianStream normals(seed, stream);
        for (std::size_t j = 0; j < m; ++j) {
            const double re = normals.next();
            const double im = normals.next();
            in[j][0] = amplitude_[j] * re;
            in[j][1] = amplitude_[j] * im;
        }
        fftw_execute_dft(plan_.get(), in.get(), out.get());

        std::vector<double> values(n_ + 1, 0.0);
        for (std::size_t k = 0; k < n_; ++k) values[k + 1] = values[k] + out[k][0];
        return FbmPath(hurst_, std::move(values), {SamplerMethod::circulant, seed, stream});
    }

private:
    HurstIndex hurst_;
    std::size_t n_;
    std::shared_ptr<fftw_plan_s> plan_;
    std::vector<double> eigenvalues_;
    std::vector<double> amplitude_;
    double min_eigenvalue_ = 0.0;
};

class CholeskySampler {
public:
    static constexpr std::size_t kMaxGrid = 4096;

    CholeskySampler(HurstIndex hurst, std::size_t n) : hurst_(hurst), n_(n) {
        if (n < 1) throw DomainError("grid size n must be positive");
        if (n > kMaxGrid) {
            throw SizeError("cholesky sampler is limited to n <= " + std::to_string(kMaxGrid) +
                            ", got " + std::to_string(n));
        }
        const Eigen::MatrixXd sigma = covariance_matrix();
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success) {
            throw EmbeddingError("path covariance is not numerically positive definite");
        }
        factor_ = llt.matrixL();
    }

    /// [R_H(t_j, t_k)] for t_j = j/n, j = 1..n.
    Eigen::MatrixXd covariance_matrix() const {
        const auto n = static_cast<Eigen::Index>(n_);
        Eigen::MatrixXd sigma(n, n);
        const double dn = static_cast<double>(n_);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k <= j; ++k) {
                const double v = covariance(hurst_, static_cast<double>(j + 1) / dn,
                                            static_cast<double>(k + 1) / dn);
                sigma(j, k) = v;
                sigma(k, j) = v;
            }
        }
        return sigma;
    }

    const Eigen::MatrixXd& factor() const noexcept { return factor_; }
    const HurstIndex& hurst() const noexcept { return hurst_; }
    std::size_t n() const noexcept { return n_; }

    FbmPath sample(std::uint64_t seed, std::uint64_t stream) const {
        GaussianStream normals(seed, stream);
        Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
        for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = normals.next();
        const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
        std::vector<double> values(n_ + 1, 0.0);
        for (std::size_t k = 0; k < n_; ++k) values[k + 1] = x[static_cast<Eigen::Index>(k)];
        return FbmPath(hurst_, std::move(values), {SamplerMethod::cholesky, seed, stream});
    }

private:
    HurstIndex hurst_;
    std::size_t n_;
    Eigen::MatrixXd factor_;
};

/// Precomputed sampler for a fixed (H, n, method); sample() is reentrant.
class PathSampler {
public:
    PathSampler(HurstIndex hurst, std::size_t n, SamplerMethod method)
        : impl_(method == SamplerMethod::cholesky ? Impl(CholeskySampler(hurst, n))
                                                  : Impl(CirculantSampler(hurst, n))) {}

    FbmPath sample(std::uint64_t seed, std::uint64_t stream) const {
        return std::visit([&](const auto& s) { return s.sample(seed, stream); }, impl_);
    }

private:
    using Impl = std::variant<CholeskySampler, CirculantSampler>;
    Impl impl_;
};

/// One-shot sampling. Deterministic in (H, n, method, seed, stream).
inline FbmPath sample_fbm(HurstIndex hurst, std::size_t n, const SamplerConfig& config) {
    return PathSampler(hurst, n, config.method).sample(config.seed, config.stream);
}

/// Line-oriented dump, one "k/n value" line per grid point.
inline void write_path_text(std::ostream& os, const FbmPath& path) {
    char buf[64];
    const auto v = path.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", v[k]);
        os << k << '/' << path.n() << ' ' << buf << '\n';
    }
}

} // namespace fbmvar
