#pragma once

// The two Hilbert spaces of the toolkit and the discrete Zak transform (DZT)
// that maps between them:
//
//   time domain:  MN-periodic sequences x[n], stored as one period n in Z_MN
//   DD domain:    M x N quasi-periodic arrays X[k, l], k in Z_M, l in Z_N,
//                 extended by X[k + nM, l + mN] = exp(j*2*pi*n*l/N) * X[k, l]
//
//   X[k, l] = 1/sqrt(N) * sum_{p<N} x[k + pM] * exp(-j*2*pi*p*l/N)
//   x[n]    = 1/sqrt(N) * sum_{q<N} X[n mod M, q] * exp(j*2*pi*q*floor(n/M)/N)

#include "ddradar/fft.hpp"
#include "ddradar/modmath.hpp"

#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace ddradar {

/// One period of an MN-periodic complex sequence. Indexing wraps modulo MN.
class PeriodicSequence {
public:
    explicit PeriodicSequence(Modulus mod)
        : mod_(mod), samples_(static_cast<std::size_t>(mod.MN())) {}

    PeriodicSequence(Modulus mod, std::vector<cplx> samples) : mod_(mod), samples_(std::move(samples)) {
        if (static_cast<std::int64_t>(samples_.size()) != mod_.MN()) {
            throw Error(ErrorCode::Config, "sequence length " + std::to_string(samples_.size()) +
                                               " does not match MN=" + std::to_string(mod_.MN()));
        }
    }

    /// Standard basis vector e_n.
    static PeriodicSequence unit(Modulus mod, std::int64_t n) {
        PeriodicSequence e(mod);
        e[n] = 1.0;
        return e;
    }

    const Modulus& modulus() const noexcept { return mod_; }
    std::int64_t size() const noexcept { return mod_.MN(); }

    cplx& operator[](std::int64_t n) { return samples_[static_cast<std::size_t>(mod_.reduce(n))]; }
    const cplx& operator[](std::int64_t n) const {
        return samples_[static_cast<std::size_t>(mod_.reduce(n))];
    }

    std::span<const cplx> samples() const noexcept { return samples_; }
    std::span<cplx> samples() noexcept { return samples_; }

    double norm_squared() const {
        return std::accumulate(samples_.begin(), samples_.end(), 0.0,
                               [](double acc, const cplx& z) { return acc + std::norm(z); });
    }
    double norm() const { return std::sqrt(norm_squared()); }

    /// Unit-norm copy. Throws ZeroSequence for the zero sequence.
    PeriodicSequence normalized() const {
        const double nrm = norm();
        if (nrm == 0.0) {
            throw Error(ErrorCode::ZeroSequence, "cannot normalize the zero sequence");
        }
        PeriodicSequence out(*this);
        for (auto& z : out.samples_) {
            z /= nrm;
        }
        return out;
    }

    PeriodicSequence& operator+=(const PeriodicSequence& other) {
        require_same(mod_, other.mod_);
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            samples_[i] += other.samples_[i];
        }
        return *this;
    }

    PeriodicSequence& operator*=(cplx s) {
        for (auto& z : samples_) {
            z *= s;
        }
        return *this;
    }

    friend PeriodicSequence operator+(PeriodicSequence a, const PeriodicSequence& b) { return a += b; }
    friend PeriodicSequence operator*(cplx s, PeriodicSequence a) { return a *= s; }

private:
    Modulus mod_;
    std::vector<cplx> samples_;
};

/// Fundamental M x N block of a quasi-periodic array, row-major in k.
class QuasiPeriodicArray {
public:
    explicit QuasiPeriodicArray(Modulus mod)
        : mod_(mod), values_(static_cast<std::size_t>(mod.MN())) {}

    const Modulus& modulus() const noexcept { return mod_; }
    std::int64_t rows() const noexcept { return mod_.M(); }
    std::int64_t cols() const noexcept { return mod_.N(); }

    /// Stored value; requires k in Z_M, l in Z_N.
    cplx& operator()(std::int64_t k, std::int64_t l) { return values_[index(k, l)]; }
    const cplx& operator()(std::int64_t k, std::int64_t l) const { return values_[index(k, l)]; }

    std::span<const cplx> values() const noexcept { return values_; }
    std::span<cplx> values() noexcept { return values_; }
    std::span<const cplx> row(std::int64_t k) const {
        return std::span<const cplx>(values_).subspan(static_cast<std::size_t>(k * mod_.N()),
                                                      static_cast<std::size_t>(mod_.N()));
    }
    std::span<cplx> row(std::int64_t k) {
        return std::span<cplx>(values_).subspan(static_cast<std::size_t>(k * mod_.N()),
                                                static_cast<std::size_t>(mod_.N()));
    }

private:
    std::size_t index(std::int64_t k, std::int64_t l) const {
        if (k < 0 || k >= mod_.M() || l < 0 || l >= mod_.N()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "(" + std::to_string(k) + "," + std::to_string(l) + ") outside the M x N block");
        }
        return static_cast<std::size_t>(k * mod_.N() + l);
    }

    Modulus mod_;
    std::vector<cplx> values_;
};

/// Physical units attached to a modulus. Never enters the numerics.
class SampleGrid {
public:
    static SampleGrid make(Modulus mod, double tau_p, double nu_p) {
        if (!(tau_p > 0.0) || !(nu_p > 0.0) || std::abs(tau_p * nu_p - 1.0) > 1e-12) {
            throw Error(ErrorCode::Config, "delay and Doppler periods must satisfy tau_p * nu_p = 1");
        }
        return SampleGrid(mod, tau_p, nu_p);
    }

    const Modulus& modulus() const noexcept { return mod_; }
    double delay_period() const noexcept { return tau_p_; }
    double doppler_period() const noexcept { return nu_p_; }
    double delay_resolution() const noexcept { return tau_p_ / static_cast<double>(mod_.M()); }
    double doppler_resolution() const noexcept { return nu_p_ / static_cast<double>(mod_.N()); }
    /// Time-bandwidth product B*T, which equals MN.
    double time_bandwidth() const noexcept {
        return (1.0 / delay_resolution()) * (1.0 / doppler_resolution());
    }

private:
    SampleGrid(Modulus mod, double tau_p, double nu_p) : mod_(mod), tau_p_(tau_p), nu_p_(nu_p) {}

    Modulus mod_;
    double tau_p_;
    double nu_p_;
};

/// <x, y> = sum_n x[n] * conj(y[n]).
inline cplx inner(const PeriodicSequence& x, const PeriodicSequence& y) {
    require_same(x.modulus(), y.modulus());
    cplx acc{};
    for (std::int64_t n = 0; n < x.size(); ++n) {
        acc += x[n] * std::conj(y[n]);
    }
    return acc;
}

/// Inner product over the fundamental M x N block.
inline cplx inner(const QuasiPeriodicArray& X, const QuasiPeriodicArray& Y) {
    require_same(X.modulus(), Y.modulus());
    cplx acc{};
    const auto xv = X.values();
    const auto yv = Y.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
        acc += xv[i] * std::conj(yv[i]);
    }
    return acc;
}

enum class ZakMethod { Fft, Direct };

/// Discrete Zak transform. The FFT path runs one N-point transform per delay
/// row; the direct sum is kept as the reference.
inline QuasiPeriodicArray dzt(const PeriodicSequence& x, ZakMethod method = ZakMethod::Fft) {
    const Modulus& mod = x.modulus();
    const std::int64_t M = mod.M();
    const std::int64_t N = mod.N();
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    QuasiPeriodicArray X(mod);
    if (method == ZakMethod::Fft) {
        std::vector<cplx> slice(static_cast<std::size_t>(N));
        for (std::int64_t k = 0; k < M; ++k) {
            for (std::int64_t p = 0; p < N; ++p) {
                slice[static_cast<std::size_t>(p)] = x[k + p * M];
            }
            auto row = X.row(k);
            fft::transform(slice, row, fft::Direction::Forward);
            for (auto& z : row) {
                z *= scale;
            }
        }
        return X;
    }
    for (std::int64_t k = 0; k < M; ++k) {
        for (std::int64_t l = 0; l < N; ++l) {
            cplx acc{};
            for (std::int64_t p = 0; p < N; ++p) {
                acc += x[k + p * M] * root_of_unity(-p * l, N);
            }
            X(k, l) = acc * scale;
        }
    }
    return X;
}

/// Inverse DZT.
inline PeriodicSequence idzt(const QuasiPeriodicArray& X, ZakMethod method = ZakMethod::Fft) {
    const Modulus& mod = X.modulus();
    const std::int64_t M = mod.M();
    const std::int64_t N = mod.N();
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    PeriodicSequence x(mod);
    if (method == ZakMethod::Fft) {
        std::vector<cplx> slice(static_cast<std::size_t>(N));
        for (std::int64_t k = 0; k < M; ++k) {
            fft::transform(X.row(k), slice, fft::Direction::Backward);
            for (std::int64_t p = 0; p < N; ++p) {
                x[k + p * M] = slice[static_cast<std::size_t>(p)] * scale;
            }
        }
        return x;
    }
    for (std::int64_t n = 0; n < mod.MN(); ++n) {
        const std::int64_t k = n % M;
        const std::int64_t p = n / M;
        cplx acc{};
        for (std::int64_t q = 0; q < N; ++q) {
            acc += X(k, q) * root_of_unity(q * p, N);
        }
        x[n] = acc * scale;
    }
    return x;
}

/// Value of the quasi-periodic extension of X at any integer (k, l).
inline cplx extend(const QuasiPeriodicArray& X, std::int64_t k, std::int64_t l) {
    const std::int64_t M = X.modulus().M();
    const std::int64_t N = X.modulus().N();
    const std::int64_t k0 = mod_floor(k, M);
    const std::int64_t l0 = mod_floor(l, N);
    const std::int64_t wraps = floor_div(k, M);
    return root_of_unity(mul_mod(wraps, l0, N), N) * X(k0, l0);
}

/// Orthonormal time-domain basis v_{r,s}: a length-M tone block in slot r.
inline PeriodicSequence basis_vrs(std::int64_t r, std::int64_t s, const Modulus& mod) {
    if (r < 0 || r >= mod.N() || s < 0 || s >= mod.M()) {
        throw Error(ErrorCode::IndexOutOfRange, "basis_vrs requires 0 <= r < N and 0 <= s < M");
    }
    PeriodicSequence v(mod);
    const double amp = 1.0 / std::sqrt(static_cast<double>(mod.M()));
    for (std::int64_t n = r * mod.M(); n < (r + 1) * mod.M(); ++n) {
        v[n] = amp * root_of_unity(s * n, mod.M());
    }
    return v;
}

}  // namespace ddradar
