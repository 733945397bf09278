#pragma once

// Cross-ambiguity functions
//
//   A_{x,y}[k, l] = sum_n x[n] * conj(y[n - k]) * exp(-j*2*pi*l*(n - k)/L) = <x, D_(k,l) y>
//
// for L-periodic sequences. Three engines:
//   naive    the defining sum, O(L) per point; the reference for everything else
//   dense    one L-point FFT per delay, O(L^2 log L) for the full L x L surface
//   fast     y a pulsone (or W(g) of one): O(1) per point after M FFTs of length N

#include "ddradar/parallel.hpp"
#include "ddradar/subgroups.hpp"

#include <functional>
#include <limits>
#include <iostream>
#include <string_view>

namespace ddradar {

/// Called with a message when an ambiguity input is not unit norm.
inline std::function<void(std::string_view)>& warning_handler() {
    static std::function<void(std::string_view)> handler = [](std::string_view msg) {
        std::clog << "warning: " << msg << '\n';
    };
    return handler;
}

namespace detail {

// Nonzero while a caller that knowingly passes non-unit input (a received
// signal) is on the stack of this thread.
inline thread_local int quiet_norm_depth = 0;

struct QuietNorm {
    QuietNorm() { ++quiet_norm_depth; }
    ~QuietNorm() { --quiet_norm_depth; }
    QuietNorm(const QuietNorm&) = delete;
    QuietNorm& operator=(const QuietNorm&) = delete;
};

inline void warn_unless_unit(std::span<const cplx> x, const char* what) {
    if (quiet_norm_depth > 0) {
        return;
    }
    double e = 0.0;
    for (const auto& z : x) {
        e += std::norm(z);
    }
    if (std::abs(e - 1.0) > 1e-9) {
        warning_handler()(std::string(what) + " has squared norm " + std::to_string(e) +
                          ", ambiguity values assume unit norm");
    }
}

}  // namespace detail

enum class Grid { Full, Fundamental };

/// A_{x,y} sampled on the full L x L torus or on the M x N fundamental block.
class AmbiguitySurface {
public:
    AmbiguitySurface(std::int64_t period, std::int64_t rows, std::int64_t cols, Grid grid)
        : period_(period), rows_(rows), cols_(cols), grid_(grid),
          values_(static_cast<std::size_t>(rows * cols)) {}

    static AmbiguitySurface full(std::int64_t period) { return {period, period, period, Grid::Full}; }
    static AmbiguitySurface fundamental(const Modulus& mod) {
        return {mod.MN(), mod.M(), mod.N(), Grid::Fundamental};
    }
    static AmbiguitySurface on(const Modulus& mod, Grid grid) {
        return grid == Grid::Full ? full(mod.MN()) : fundamental(mod);
    }

    std::int64_t period() const noexcept { return period_; }
    std::int64_t rows() const noexcept { return rows_; }
    std::int64_t cols() const noexcept { return cols_; }
    Grid grid() const noexcept { return grid_; }

    /// Stored value at 0 <= k < rows, 0 <= l < cols.
    cplx& operator()(std::int64_t k, std::int64_t l) { return values_[index(k, l)]; }
    const cplx& operator()(std::int64_t k, std::int64_t l) const { return values_[index(k, l)]; }

    /// Value at any (k, l), reduced modulo the period. Outside the stored block
    /// of a fundamental surface this throws IndexOutOfRange.
    cplx at(std::int64_t k, std::int64_t l) const {
        return (*this)(mod_floor(k, period_), mod_floor(l, period_));
    }

    std::span<const cplx> values() const noexcept { return values_; }
    std::span<cplx> values() noexcept { return values_; }

private:
    std::size_t index(std::int64_t k, std::int64_t l) const {
        if (k < 0 || k >= rows_ || l < 0 || l >= cols_) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "(" + std::to_string(k) + "," + std::to_string(l) + ") outside the surface");
        }
        return static_cast<std::size_t>(k * cols_ + l);
    }

    std::int64_t period_;
    std::int64_t rows_;
    std::int64_t cols_;
    Grid grid_;
    std::vector<cplx> values_;
};

// -- Naive --------------------------------------------------------------------

/// One value of A_{x,y} by the defining sum; x and y share the period x.size().
inline cplx ambiguity_point(std::span<const cplx> x, std::span<const cplx> y, std::int64_t k,
                            std::int64_t l) {
    const auto L = static_cast<std::int64_t>(x.size());
    cplx acc{};
    for (std::int64_t n = 0; n < L; ++n) {
        const std::int64_t m = mod_floor(n - k, L);
        acc += x[static_cast<std::size_t>(n)] * std::conj(y[static_cast<std::size_t>(m)]) *
               root_of_unity(-mul_mod(l, m, L), L);
    }
    return acc;
}

inline void require_same_length(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size() || x.empty()) {
        throw Error(ErrorCode::ModulusMismatch, "sequences must share a nonzero period");
    }
}

/// Full L x L surface by the defining sum, O(L^3).
inline AmbiguitySurface cross_ambiguity_naive(std::span<const cplx> x, std::span<const cplx> y,
                                              const Execution& exec = {}) {
    require_same_length(x, y);
    detail::warn_unless_unit(x, "x");
    detail::warn_unless_unit(y, "y");
    const auto L = static_cast<std::int64_t>(x.size());
    auto surf = AmbiguitySurface::full(L);
    detail::parallel_for(0, L, exec, [&](std::int64_t k) {
        for (std::int64_t l = 0; l < L; ++l) {
            surf(k, l) = ambiguity_point(x, y, k, l);
        }
    });
    return surf;
}

inline AmbiguitySurface cross_ambiguity_naive(const PeriodicSequence& x, const PeriodicSequence& y,
                                              Grid grid = Grid::Full, const Execution& exec = {}) {
    require_same(x.modulus(), y.modulus());
    if (grid == Grid::Full) {
        return cross_ambiguity_naive(x.samples(), y.samples(), exec);
    }
    detail::warn_unless_unit(x.samples(), "x");
    detail::warn_unless_unit(y.samples(), "y");
    auto surf = AmbiguitySurface::fundamental(x.modulus());
    detail::parallel_for(0, surf.rows(), exec, [&](std::int64_t k) {
        for (std::int64_t l = 0; l < surf.cols(); ++l) {
            surf(k, l) = ambiguity_point(x.samples(), y.samples(), k, l);
        }
    });
    return surf;
}

// -- Dense FFT ----------------------------------------------------------------

/// Full surface with one FFT per delay:
///   A[k, l] = exp(j*2*pi*l*k/L) * DFT_n{ x[n] conj(y[n - k]) }[l].
inline AmbiguitySurface cross_ambiguity_dense(std::span<const cplx> x, std::span<const cplx> y,
                                              const Execution& exec = {}) {
    require_same_length(x, y);
    detail::warn_unless_unit(x, "x");
    detail::warn_unless_unit(y, "y");
    const auto L = static_cast<std::int64_t>(x.size());
    auto surf = AmbiguitySurface::full(L);
    detail::parallel_for(0, L, exec, [&](std::int64_t k) {
        std::vector<cplx> prod(static_cast<std::size_t>(L));
        std::vector<cplx> spec(static_cast<std::size_t>(L));
        for (std::int64_t n = 0; n < L; ++n) {
            prod[static_cast<std::size_t>(n)] =
                x[static_cast<std::size_t>(n)] * std::conj(y[static_cast<std::size_t>(mod_floor(n - k, L))]);
        }
        fft::transform(prod, spec, fft::Direction::Forward);
        for (std::int64_t l = 0; l < L; ++l) {
            surf(k, l) = root_of_unity(mul_mod(l, k, L), L) * spec[static_cast<std::size_t>(l)];
        }
    });
    return surf;
}

// -- Fast pulsone path ----------------------------------------------------------

/// Row FFTs of the delay-decimated slices of x: rowfft[r][m] is the DZT of x.
struct FastPulsonePrecomp {
    Modulus mod;
    std::int64_t k0 = 0;
    std::int64_t l0 = 0;
    QuasiPeriodicArray rowfft;
};

inline FastPulsonePrecomp fast_pulsone_precompute(const PeriodicSequence& x, std::int64_t k0, std::int64_t l0) {
    const Modulus& mod = x.modulus();
    if (k0 < 0 || k0 >= mod.M() || l0 < 0 || l0 >= mod.N()) {
        throw Error(ErrorCode::IndexOutOfRange, "pulsone requires 0 <= k0 < M and 0 <= l0 < N");
    }
    return {mod, k0, l0, dzt(x, ZakMethod::Fft)};
}

/// A_{x, pulsone(k0, l0)}[k, l] as one phased table entry.
inline cplx fast_pulsone_query(const FastPulsonePrecomp& pre, std::int64_t k, std::int64_t l) {
    const Modulus& mod = pre.mod;
    const std::int64_t M = mod.M();
    const std::int64_t L = mod.MN();
    k = mod.reduce(k);
    l = mod.reduce(l);
    const std::int64_t shifted = k + pre.k0;
    const std::int64_t r = shifted % M;
    const std::int64_t wraps = shifted / M;
    // -[l((k + k0)_M - k) - floor((k + k0)/M) * l0 * M]
    const std::int64_t m = mul_mod(wraps, pre.l0 * M, L) - mul_mod(l, r - k, L);
    return to_complex(mod, mod.whole_phase(m)) * pre.rowfft(r, mod_floor(l + pre.l0, mod.N()));
}

/// Cross-ambiguity against a fixed pulsone, or against W(g) applied to one.
///
/// With y = W p, A_{x,y}[v] = c(g^-1 v) * A_{W^-1 x, p}[g^-1 v] where c is the
/// conjugation phase of W(g), so one precompute on W^-1 x serves every point.
class FastAmbiguityEngine {
public:
    FastAmbiguityEngine(const PeriodicSequence& x, std::int64_t k0, std::int64_t l0,
                        std::optional<SymplecticOperator> op = std::nullopt)
        : op_(std::move(op)),
          pre_(fast_pulsone_precompute(op_ ? op_->apply_inverse(x) : x, k0, l0)),
          g_inv_(op_ ? std::optional<SL2Element>(op_->element().inverse()) : std::nullopt) {
        detail::warn_unless_unit(x.samples(), "x");
        if (op_) {
            require_same(op_->modulus(), x.modulus());
        }
    }

    const Modulus& modulus() const noexcept { return pre_.mod; }
    const FastPulsonePrecomp& precomp() const noexcept { return pre_; }

    cplx query(std::int64_t k, std::int64_t l) const {
        if (!g_inv_) {
            return fast_pulsone_query(pre_, k, l);
        }
        const auto [kk, ll] = g_inv_->apply(k, l);
        const cplx c = to_complex(pre_.mod, conjugation_phase(op_->element(), kk, ll));
        return c * fast_pulsone_query(pre_, kk, ll);
    }

    AmbiguitySurface materialize(Grid grid = Grid::Fundamental, const Execution& exec = {}) const {
        auto surf = AmbiguitySurface::on(pre_.mod, grid);
        detail::parallel_for(0, surf.rows(), exec, [&](std::int64_t k) {
            for (std::int64_t l = 0; l < surf.cols(); ++l) {
                surf(k, l) = query(k, l);
            }
        });
        return surf;
    }

private:
    std::optional<SymplecticOperator> op_;
    FastPulsonePrecomp pre_;
    std::optional<SL2Element> g_inv_;
};

// -- Moyal ----------------------------------------------------------------------

/// |(1/L) sum_{k,l} conj(A_x[k,l]) A_y[k,l] - |<x,y>|^2|, from dense surfaces.
inline double moyal_residual(std::span<const cplx> x, std::span<const cplx> y, const Execution& exec = {}) {
    require_same_length(x, y);
    const auto L = static_cast<double>(x.size());
    const auto ax = cross_ambiguity_dense(x, x, exec);
    const auto ay = cross_ambiguity_dense(y, y, exec);
    cplx acc{};
    for (std::size_t i = 0; i < ax.values().size(); ++i) {
        acc += std::conj(ax.values()[i]) * ay.values()[i];
    }
    cplx ip{};
    for (std::size_t n = 0; n < x.size(); ++n) {
        ip += x[n] * std::conj(y[n]);
    }
    return std::abs(acc / L - cplx(std::norm(ip), 0.0));
}

inline double moyal_residual(const PeriodicSequence& x, const PeriodicSequence& y, const Execution& exec = {}) {
    require_same(x.modulus(), y.modulus());
    return moyal_residual(x.samples(), y.samples(), exec);
}

/// Number of stored points with |A| above the threshold.
inline std::int64_t unimodular_count(const AmbiguitySurface& surf, double threshold = 1.0 - 1e-6) {
    return std::count_if(surf.values().begin(), surf.values().end(),
                         [threshold](const cplx& z) { return std::abs(z) > threshold; });
}

// -- Baseline waveforms -------------------------------------------------------

/// Zadoff-Chu: z[n] = exp(-j*pi*root*n*(n+1)/L) / sqrt(L), L odd.
inline std::vector<cplx> zc_sequence(std::int64_t root, std::int64_t L) {
    if (L < 1 || L % 2 == 0) {
        throw Error(ErrorCode::BadRoot, "Zadoff-Chu length must be odd");
    }
    if (gcd(root, L) != 1) {
        throw Error(ErrorCode::BadRoot, "Zadoff-Chu root must be coprime to the length");
    }
    std::vector<cplx> z(static_cast<std::size_t>(L));
    const double amp = 1.0 / std::sqrt(static_cast<double>(L));
    for (std::int64_t n = 0; n < L; ++n) {
        // n(n+1) is even, so the phase is a whole multiple of 2*pi/L.
        const std::int64_t tri = (n * (n + 1) / 2) % L;
        z[static_cast<std::size_t>(n)] = amp * root_of_unity(-mul_mod(root, tri, L), L);
    }
    return z;
}

/// Phase-coded waveform y[m*s + i] = z[m] * chip[i], unit-normalized; period z.size() * s.
inline std::vector<cplx> coded_waveform(std::span<const cplx> z, std::span<const double> chip) {
    if (chip.empty()) {
        throw Error(ErrorCode::EmptyChip, "chip shape must have at least one sample");
    }
    const std::size_t s = chip.size();
    std::vector<cplx> y(z.size() * s);
    double energy = 0.0;
    for (std::size_t m = 0; m < z.size(); ++m) {
        for (std::size_t i = 0; i < s; ++i) {
            y[m * s + i] = z[m] * chip[i];
            energy += std::norm(y[m * s + i]);
        }
    }
    if (energy == 0.0) {
        throw Error(ErrorCode::ZeroSequence, "coded waveform is identically zero");
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& v : y) {
        v *= scale;
    }
    return y;
}

/// The ideal ZC ridge carried over to a chip-oversampled waveform of period L*s:
/// delays k = s*kz and Dopplers l = -root*kz (mod L), for every kz.
struct CodedRidge {
    std::int64_t root;
    std::int64_t length;  ///< L, the code length
    std::int64_t oversample;

    bool contains(std::int64_t k, std::int64_t l) const {
        const std::int64_t period = length * oversample;
        k = mod_floor(k, period);
        if (k % oversample != 0) {
            return false;
        }
        const std::int64_t kz = k / oversample;
        return mod_floor(l + root * kz, length) == 0;
    }
};

/// 20*log10 of the largest |A| over points for which `on_ridge` is false.
template <typename Pred>
double max_off_ridge_db(const AmbiguitySurface& surf, Pred on_ridge) {
    double peak = 0.0;
    for (std::int64_t k = 0; k < surf.rows(); ++k) {
        for (std::int64_t l = 0; l < surf.cols(); ++l) {
            if (!on_ridge(k, l)) {
                peak = std::max(peak, std::abs(surf(k, l)));
            }
        }
    }
    return peak == 0.0 ? -std::numeric_limits<double>::infinity() : 20.0 * std::log10(peak);
}

// -- Waveform descriptors -----------------------------------------------------

/// A waveform plus, when known, its pulsone origin so the fast engine can be used.
struct Waveform {
    struct PulsoneOrigin {
        std::int64_t k0 = 0;
        std::int64_t l0 = 0;
        std::optional<SymplecticOperator> op;
    };

    PeriodicSequence samples;
    std::optional<PulsoneOrigin> origin;
    std::string label;

    static Waveform plain(PeriodicSequence x, std::string label) {
        return {std::move(x), std::nullopt, std::move(label)};
    }

    static Waveform from_pulsone(const Modulus& mod, std::int64_t k0, std::int64_t l0,
                                 std::optional<SymplecticOperator> op, std::string label) {
        auto p = pulsone(mod, k0, l0);
        if (op) {
            p = op->apply(p);
        }
        return {std::move(p), PulsoneOrigin{k0, l0, std::move(op)}, std::move(label)};
    }

    /// Vector i of a line eigenbasis, keeping the pulsone origin when there is one.
    static Waveform from_eigenbasis(const EigenBasis& basis, std::int64_t i, std::string label) {
        const Modulus& mod = basis.line.modulus();
        if (i < 0 || i >= mod.MN()) {
            throw Error(ErrorCode::IndexOutOfRange, "eigen index must lie in [0, MN)");
        }
        const auto& v = basis.vectors[static_cast<std::size_t>(i)];
        if (basis.kind == EigenBasis::Kind::Chirp) {
            return plain(v, std::move(label));
        }
        const auto [k0, l0] = basis.pulsone_index(i);
        return {v, PulsoneOrigin{k0, l0, basis.op}, std::move(label)};
    }

    bool fast_capable() const noexcept { return origin.has_value(); }
};

/// A_{x,y} with y described by a Waveform; uses the fast engine when y has a pulsone origin.
inline AmbiguitySurface cross_ambiguity(const PeriodicSequence& x, const Waveform& y, Grid grid,
                                        const Execution& exec = {}) {
    if (y.origin) {
        FastAmbiguityEngine engine(x, y.origin->k0, y.origin->l0, y.origin->op);
        return engine.materialize(grid, exec);
    }
    if (grid == Grid::Full) {
        return cross_ambiguity_dense(x.samples(), y.samples.samples(), exec);
    }
    return cross_ambiguity_naive(x, y.samples, grid, exec);
}

}  // namespace ddradar
