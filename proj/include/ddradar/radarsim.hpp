#pragma once

// Discrete radar: y = sum_taps h * D_(k,l) x, optional AWGN, image by
// cross-ambiguity h_hat[k, l] = A_{y,x}[k, l], readout on a crystallized region.

#include "ddradar/ambiguity.hpp"

#include <random>
#include <set>

namespace ddradar {

struct Tap {
    std::int64_t k = 0;
    std::int64_t l = 0;
    cplx h{};

    friend bool operator==(const Tap&, const Tap&) = default;
};

class ScatteringEnvironment {
public:
    /// Coordinates are reduced modulo MN and must be distinct afterwards.
    static ScatteringEnvironment make(const Modulus& mod, std::vector<Tap> taps) {
        std::set<std::pair<std::int64_t, std::int64_t>> seen;
        for (auto& t : taps) {
            t.k = mod.reduce(t.k);
            t.l = mod.reduce(t.l);
            if (!seen.emplace(t.k, t.l).second) {
                throw Error(ErrorCode::Config, "duplicate tap at (" + std::to_string(t.k) + "," +
                                                   std::to_string(t.l) + ")");
            }
        }
        return ScatteringEnvironment(mod, std::move(taps));
    }

    const Modulus& modulus() const noexcept { return mod_; }
    const std::vector<Tap>& taps() const noexcept { return taps_; }

private:
    ScatteringEnvironment(Modulus mod, std::vector<Tap> taps) : mod_(mod), taps_(std::move(taps)) {}

    Modulus mod_;
    std::vector<Tap> taps_;
};

inline PeriodicSequence apply_channel(const ScatteringEnvironment& env, const PeriodicSequence& x) {
    require_same(env.modulus(), x.modulus());
    PeriodicSequence y(x.modulus());
    for (const auto& t : env.taps()) {
        y += t.h * apply_td(HeisenbergElement::make(env.modulus(), t.k, t.l), x);
    }
    return y;
}

/// Adds circularly-symmetric Gaussian noise with ||y||^2 / E||w||^2 = 10^(snr_db/10).
/// snr_db = +infinity returns y unchanged.
inline PeriodicSequence add_noise(const PeriodicSequence& y, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0) {
        return y;
    }
    const double energy = y.norm_squared();
    if (energy == 0.0) {
        throw Error(ErrorCode::ZeroSignal, "cannot set an SNR relative to a zero signal");
    }
    const double variance = energy / (static_cast<double>(y.size()) * std::pow(10.0, snr_db / 10.0));
    const double sigma = std::sqrt(variance / 2.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PeriodicSequence out = y;
    for (std::int64_t n = 0; n < y.size(); ++n) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        out[n] += sigma * cplx(re, im);
    }
    return out;
}

struct RadarImage {
    AmbiguitySurface surface;
    std::string waveform;
    std::optional<double> snr_db;
    std::optional<std::uint64_t> seed;
};

/// h_hat = A_{y,x}; the fast engine is used when x has a pulsone origin.
inline RadarImage form_image(const PeriodicSequence& y, const Waveform& x, Grid grid = Grid::Full,
                             const Execution& exec = {}) {
    require_same(y.modulus(), x.samples.modulus());
    detail::warn_unless_unit(x.samples.samples(), "waveform");
    const detail::QuietNorm quiet;  // y carries the channel gain
    return {cross_ambiguity(y, x, grid, exec), x.label, std::nullopt, std::nullopt};
}

/// sum_taps h * exp(j*2*pi*l_t*(k - k_t)/MN) * A_x[k - k_t, l - l_t] on the full grid.
inline AmbiguitySurface predicted_image(const ScatteringEnvironment& env, const AmbiguitySurface& ax) {
    const std::int64_t L = env.modulus().MN();
    if (ax.grid() != Grid::Full || ax.period() != L) {
        throw Error(ErrorCode::GridMismatch, "predicted_image needs a full-grid self-ambiguity");
    }
    auto out = AmbiguitySurface::full(L);
    for (const auto& t : env.taps()) {
        for (std::int64_t k = 0; k < L; ++k) {
            const std::int64_t dk = mod_floor(k - t.k, L);
            const cplx ramp = t.h * root_of_unity(mul_mod(t.l, dk, L), L);
            for (std::int64_t l = 0; l < L; ++l) {
                out(k, l) += ramp * ax(dk, mod_floor(l - t.l, L));
            }
        }
    }
    return out;
}

/// Image values in C with magnitude at least `threshold`, scanned in (k, l) order.
/// Throws NotCrystallized if translates of C along T overlap.
inline std::vector<Tap> readout_targets(const RadarImage& img, const LineSubgroup& T, const DDRegion& C,
                                        double threshold) {
    if (!crystallization_check(T, C)) {
        throw Error(ErrorCode::NotCrystallized,
                    "region [" + std::to_string(C.k_min) + "," + std::to_string(C.k_max) + "]x[" +
                        std::to_string(C.l_min) + "," + std::to_string(C.l_max) +
                        "] aliases under the ambiguity support; refusing to read out");
    }
    const Modulus& mod = T.modulus();
    std::vector<Tap> found;
    for (std::int64_t k = C.k_min; k <= C.k_max; ++k) {
        for (std::int64_t l = C.l_min; l <= C.l_max; ++l) {
            const std::int64_t kr = mod.reduce(k);
            const std::int64_t lr = mod.reduce(l);
            if (kr >= img.surface.rows() || lr >= img.surface.cols()) {
                throw Error(ErrorCode::GridMismatch, "region extends beyond the image grid");
            }
            const cplx v = img.surface(kr, lr);
            if (std::abs(v) >= threshold) {
                found.push_back({kr, lr, v});
            }
        }
    }
    return found;
}

/// Default threshold: half the largest magnitude inside C.
inline double default_threshold(const RadarImage& img, const Modulus& mod, const DDRegion& C) {
    double peak = 0.0;
    for (std::int64_t k = C.k_min; k <= C.k_max; ++k) {
        for (std::int64_t l = C.l_min; l <= C.l_max; ++l) {
            peak = std::max(peak, std::abs(img.surface.at(mod.reduce(k), mod.reduce(l))));
        }
    }
    return 0.5 * peak;
}

}  // namespace ddradar
