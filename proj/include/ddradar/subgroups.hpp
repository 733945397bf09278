#pragma once

// Maximal commutative subgroups of the Heisenberg-Weyl group. Each one is a
// line {x*(c, d) : x in Z_MN} through the origin of the delay-Doppler torus,
// and its elements share an orthonormal eigenbasis:
//
//   (c, d) = (M, N)     rectangular grid     -> pulsones
//   (c, d) = (1, 2*a)   slope 2a, a a unit   -> discrete chirps
//   anything else                            -> symplectic image of pulsones

#include "ddradar/symplectic.hpp"

#include <optional>

namespace ddradar {

class LineSubgroup {
public:
    /// Throws NotPrimitive unless (c, d) has order MN in Z_MN^2.
    static LineSubgroup make(const Modulus& mod, std::int64_t c, std::int64_t d) {
        const std::int64_t cr = mod.reduce(c);
        const std::int64_t dr = mod.reduce(d);
        if (gcd(gcd(cr, dr), mod.MN()) != 1) {
            throw Error(ErrorCode::NotPrimitive, "(" + std::to_string(c) + "," + std::to_string(d) +
                                                     ") does not generate a line of MN points");
        }
        return LineSubgroup(mod, cr, dr);
    }

    /// The line {(k, s*k)}.
    static LineSubgroup from_slope(const Modulus& mod, std::int64_t slope) { return make(mod, 1, slope); }

    /// The rectangular grid {(aM, bN)}.
    static LineSubgroup rectangular(const Modulus& mod) { return make(mod, mod.M(), mod.N()); }

    const Modulus& modulus() const noexcept { return mod_; }
    std::int64_t c() const noexcept { return c_; }
    std::int64_t d() const noexcept { return d_; }

    /// x*(c, d) for x in Z_MN, in order of x.
    std::vector<std::pair<std::int64_t, std::int64_t>> support_set() const {
        std::vector<std::pair<std::int64_t, std::int64_t>> pts;
        pts.reserve(static_cast<std::size_t>(mod_.MN()));
        for (std::int64_t x = 0; x < mod_.MN(); ++x) {
            pts.emplace_back(mul_mod(x, c_, mod_.MN()), mul_mod(x, d_, mod_.MN()));
        }
        return pts;
    }

    /// (k, l) lies on the line iff it is symplectically orthogonal to (c, d).
    bool contains(std::int64_t k, std::int64_t l) const {
        return symplectic_form(mod_, k, l, c_, d_) == 0;
    }

    friend bool operator==(const LineSubgroup&, const LineSubgroup&) = default;

private:
    LineSubgroup(Modulus mod, std::int64_t c, std::int64_t d) : mod_(mod), c_(c), d_(d) {}

    Modulus mod_;
    std::int64_t c_;
    std::int64_t d_;
};

/// Inclusive rectangle [k_min, k_max] x [l_min, l_max] of delay-Doppler indices.
struct DDRegion {
    std::int64_t k_min = 0, k_max = 0, l_min = 0, l_max = 0;

    static DDRegion make(const Modulus& mod, std::int64_t k_min, std::int64_t k_max, std::int64_t l_min,
                         std::int64_t l_max) {
        if (k_min > k_max || l_min > l_max) {
            throw Error(ErrorCode::Config, "region bounds must satisfy min <= max");
        }
        if (k_max - k_min >= mod.MN() || l_max - l_min >= mod.MN()) {
            throw Error(ErrorCode::Config, "region may span at most MN indices per axis");
        }
        return {k_min, k_max, l_min, l_max};
    }

    bool contains(const Modulus& mod, std::int64_t k, std::int64_t l) const {
        const std::int64_t L = mod.MN();
        return mod_floor(k - k_min, L) <= k_max - k_min && mod_floor(l - l_min, L) <= l_max - l_min;
    }
};

/// Pulsone with delay k0 and Doppler l0: v[k0 + pM] = exp(j*2*pi*p*l0/N)/sqrt(N).
inline PeriodicSequence pulsone(const Modulus& mod, std::int64_t k0, std::int64_t l0) {
    if (k0 < 0 || k0 >= mod.M() || l0 < 0 || l0 >= mod.N()) {
        throw Error(ErrorCode::IndexOutOfRange, "pulsone requires 0 <= k0 < M and 0 <= l0 < N");
    }
    PeriodicSequence v(mod);
    const double amp = 1.0 / std::sqrt(static_cast<double>(mod.N()));
    for (std::int64_t p = 0; p < mod.N(); ++p) {
        v[k0 + p * mod.M()] = amp * root_of_unity(p * l0, mod.N());
    }
    return v;
}

/// Eigenvalue of D_(aM, bN) on pulsone(k0, l0).
inline cplx pulsone_eigenvalue(const Modulus& mod, std::int64_t k0, std::int64_t l0, std::int64_t a,
                               std::int64_t b) {
    return root_of_unity(mul_mod(b, k0, mod.M()), mod.M()) * root_of_unity(-mul_mod(a, l0, mod.N()), mod.N());
}

/// v[n] = exp(j*2*pi*(alpha n^2 + beta n + gamma)/MN) / sqrt(MN).
inline PeriodicSequence chirp(const Modulus& mod, std::int64_t alpha, std::int64_t beta,
                              std::int64_t gamma = 0) {
    const std::int64_t L = mod.MN();
    if (gcd(alpha, L) != 1) {
        throw Error(ErrorCode::AlphaNotCoprime, "chirp rate alpha must be a unit modulo MN");
    }
    PeriodicSequence v(mod);
    const double amp = 1.0 / std::sqrt(static_cast<double>(L));
    for (std::int64_t n = 0; n < L; ++n) {
        const std::int64_t m = mul_mod(alpha, mul_mod(n, n, L), L) + mul_mod(beta, n, L) + gamma;
        v[n] = amp * to_complex(mod, mod.whole_phase(m));
    }
    return v;
}

/// Eigenvalue of D_(k, 2*alpha*k) on chirp(alpha, beta, .).
inline cplx chirp_eigenvalue(const Modulus& mod, std::int64_t alpha, std::int64_t beta, std::int64_t k) {
    const std::int64_t L = mod.MN();
    const std::int64_t m = mul_mod(alpha, mul_mod(k, k, L), L) + mul_mod(beta, k, L);
    return to_complex(mod, mod.whole_phase(-m));
}

/// An orthonormal eigenbasis of a line together with how it was built.
struct EigenBasis {
    enum class Kind { Pulsone, Chirp, Symplectic };

    Kind kind = Kind::Pulsone;
    LineSubgroup line;
    std::vector<PeriodicSequence> vectors;
    std::int64_t alpha = 0;                   ///< chirp rate, Kind::Chirp only
    std::optional<SymplecticOperator> op;     ///< Kind::Symplectic only

    /// Pulsone index (k0, l0) behind vector i, for Kind::Pulsone and Kind::Symplectic.
    std::pair<std::int64_t, std::int64_t> pulsone_index(std::int64_t i) const {
        const Modulus& mod = line.modulus();
        return {i % mod.M(), i / mod.M()};
    }
};

/// Pulsone index ordering: vector i is pulsone(i mod M, i div M).
inline std::vector<PeriodicSequence> pulsone_basis(const Modulus& mod) {
    std::vector<PeriodicSequence> out;
    out.reserve(static_cast<std::size_t>(mod.MN()));
    for (std::int64_t i = 0; i < mod.MN(); ++i) {
        out.push_back(pulsone(mod, i % mod.M(), i / mod.M()));
    }
    return out;
}

/// Chirps of rate alpha indexed by beta, gamma = 0.
inline std::vector<PeriodicSequence> chirp_basis(const Modulus& mod, std::int64_t alpha) {
    std::vector<PeriodicSequence> out;
    out.reserve(static_cast<std::size_t>(mod.MN()));
    for (std::int64_t beta = 0; beta < mod.MN(); ++beta) {
        out.push_back(chirp(mod, alpha, beta, 0));
    }
    return out;
}

inline EigenBasis eigenbasis_for_line(const LineSubgroup& T) {
    const Modulus& mod = T.modulus();
    const std::int64_t L = mod.MN();
    if (T.contains(mod.M(), mod.N())) {
        return {EigenBasis::Kind::Pulsone, T, pulsone_basis(mod), 0, std::nullopt};
    }
    if (gcd(T.c(), L) == 1) {
        const std::int64_t slope = mul_mod(T.d(), mod_inv(T.c(), L), L);
        if (gcd(slope, L) == 1) {
            const std::int64_t alpha = mul_mod(slope, mod_inv(2, L), L);
            return {EigenBasis::Kind::Chirp, T, chirp_basis(mod, alpha), alpha, std::nullopt};
        }
    }
    // W(g) D_t W(g)^-1 is a multiple of D_{g t}, so W(g) carries eigenvectors of
    // the rectangular grid to eigenvectors of its image g.(M, N)Z = T.
    const SL2Element g = sl2_mapping(mod, {mod.M(), mod.N()}, {T.c(), T.d()});
    auto op = SymplecticOperator::for_element(g);
    std::vector<PeriodicSequence> vectors;
    vectors.reserve(static_cast<std::size_t>(L));
    for (const auto& p : pulsone_basis(mod)) {
        vectors.push_back(op.apply(p));
    }
    return {EigenBasis::Kind::Symplectic, T, std::move(vectors), 0, std::move(op)};
}

/// True iff the translates C + t, t on the line, are pairwise disjoint on the
/// torus, i.e. no nonzero line point lies in C - C.
inline bool crystallization_check(const LineSubgroup& T, const DDRegion& C) {
    const Modulus& mod = T.modulus();
    const std::int64_t L = mod.MN();
    const std::int64_t wk = C.k_max - C.k_min;
    const std::int64_t wl = C.l_max - C.l_min;
    auto within = [L](std::int64_t r, std::int64_t w) { return std::min(r, L - r) <= w; };
    for (std::int64_t x = 1; x < L; ++x) {
        const std::int64_t k = mul_mod(x, T.c(), L);
        const std::int64_t l = mul_mod(x, T.d(), L);
        if (within(k, wk) && within(l, wl)) {
            return false;
        }
    }
    return true;
}

}  // namespace ddradar
