#pragma once

// The discrete Heisenberg-Weyl group H_MN.
//
// An element (k, l, p) acts on MN-periodic sequences as
//
//   (D x)[n] = exp(j*pi*p/MN) * x[n - k] * exp(j*2*pi*l*(n - k)/MN)
//
// and composes as (k1, l1, p1) o (k2, l2, p2) = (k1 + k2, l1 + l2, p1 + p2 + 2*l1*k2).
// The usual 3x3 upper-triangular matrix [[1, l, m], [0, 1, k], [0, 0, 1]] carries
// the same information with p = 2m.

#include "ddradar/ddcore.hpp"

namespace ddradar {

struct HeisenbergElement {
    Modulus mod;
    std::int64_t k = 0;  ///< delay shift in Z_MN
    std::int64_t l = 0;  ///< Doppler shift in Z_MN
    PhaseIndex phase{};  ///< in Z_2MN

    /// Reduces k, l modulo MN and the phase index modulo 2MN.
    static HeisenbergElement make(const Modulus& mod, std::int64_t k, std::int64_t l,
                                  std::int64_t phase = 0) {
        return {mod, mod.reduce(k), mod.reduce(l), mod.phase(phase)};
    }

    static HeisenbergElement identity(const Modulus& mod) { return make(mod, 0, 0); }

    friend bool operator==(const HeisenbergElement&, const HeisenbergElement&) = default;
};

/// Time-domain action of h.
inline PeriodicSequence apply_td(const HeisenbergElement& h, const PeriodicSequence& x) {
    require_same(h.mod, x.modulus());
    const Modulus& mod = h.mod;
    PeriodicSequence out(mod);
    for (std::int64_t n = 0; n < mod.MN(); ++n) {
        const std::int64_t shifted = n - h.k;
        const std::int64_t p = h.phase.value + 2 * mul_mod(h.l, shifted, mod.MN());
        out[n] = to_complex(mod, mod.phase(p)) * x[shifted];
    }
    return out;
}

/// Delay-Doppler action of h on a quasi-periodic array:
///   out[k', l'] = X[(k'-k)_M, (l'-l)_N] * exp(j2pi (l'-l) floor((k'-k)/M) / N)
///                 * exp(j2pi l (k'-k) / MN) * exp(j pi p / MN)
inline QuasiPeriodicArray apply_dd(const HeisenbergElement& h, const QuasiPeriodicArray& X) {
    require_same(h.mod, X.modulus());
    const Modulus& mod = h.mod;
    const std::int64_t M = mod.M();
    const std::int64_t N = mod.N();
    QuasiPeriodicArray out(mod);
    for (std::int64_t kp = 0; kp < M; ++kp) {
        const std::int64_t dk = kp - h.k;
        const std::int64_t wraps = floor_div(dk, M);
        for (std::int64_t lp = 0; lp < N; ++lp) {
            const std::int64_t dl = lp - h.l;
            // exp(j2pi a/N) is the whole phase a*M over MN.
            const std::int64_t whole = M * mul_mod(dl, wraps, N) + mul_mod(h.l, dk, mod.MN());
            const std::int64_t p = h.phase.value + 2 * whole;
            out(kp, lp) = to_complex(mod, mod.phase(p)) * X(mod_floor(dk, M), mod_floor(dl, N));
        }
    }
    return out;
}

inline HeisenbergElement compose(const HeisenbergElement& h1, const HeisenbergElement& h2) {
    require_same(h1.mod, h2.mod);
    const Modulus& mod = h1.mod;
    const std::int64_t cross = 2 * mul_mod(h1.l, h2.k, mod.MN());
    return {mod, mod.reduce(h1.k + h2.k), mod.reduce(h1.l + h2.l),
            phase_mul(mod, h1.phase, phase_mul(mod, h2.phase, mod.phase(cross)))};
}

inline HeisenbergElement inverse(const HeisenbergElement& h) {
    const Modulus& mod = h.mod;
    const std::int64_t lk = 2 * mul_mod(h.l, h.k, mod.MN());
    return {mod, mod.reduce(-h.k), mod.reduce(-h.l), mod.phase(lk - h.phase.value)};
}

/// Symplectic form l1*k2 - l2*k1 modulo MN.
inline std::int64_t symplectic_form(const Modulus& mod, std::int64_t k1, std::int64_t l1,
                                    std::int64_t k2, std::int64_t l2) {
    return mod.reduce(mul_mod(l1, k2, mod.MN()) - mul_mod(l2, k1, mod.MN()));
}

inline bool commutes(const HeisenbergElement& h1, const HeisenbergElement& h2) {
    require_same(h1.mod, h2.mod);
    return symplectic_form(h1.mod, h1.k, h1.l, h2.k, h2.l) == 0;
}

/// Phase c with h1 o h2 = c * (h2 o h1).
inline PhaseIndex commutator_phase(const HeisenbergElement& h1, const HeisenbergElement& h2) {
    require_same(h1.mod, h2.mod);
    return h1.mod.whole_phase(symplectic_form(h1.mod, h1.k, h1.l, h2.k, h2.l));
}

}  // namespace ddradar
