#pragma once

// Symplectic transformations: unitary operators W(g), g in SL2(Z_MN), with
//
//   W(g) o D_(k,l) o W(g)^-1 = exp(j*2*pi*(1/2)*(ack^2 + bdl^2 + 2bckl)/MN) * D_g.(k,l)
//   g.(k,l) = (ak + bl, ck + dl)
//
// where 1/2 is the inverse of 2 modulo MN. Two families are provided directly:
//
//   LFM(A):   (Wx)[n] = exp(j*2*pi*A*n^2/MN) * x[n],          g = [[1,0],[2A,1]]
//   GDAFT(g): (Wx)[n] = 1/sqrt(MN) * sum_n1 exp(j*2*pi*(1/2)*b^-1*(d n^2 - 2 n n1 + a n1^2)/MN) x[n1]
//             defined whenever b is a unit modulo MN.
//
// Any other g is realised as GDAFT(S^-1) o GDAFT(S g) with a shear S = [[1,x0],[0,1]].
// W(g) is only defined up to a global phase, so compositions agree projectively.

#include "ddradar/heisenberg.hpp"

#include <algorithm>
#include <array>
#include <variant>

namespace ddradar {

/// 2x2 matrix over Z_MN with determinant 1.
struct SL2Element {
    Modulus mod;
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    static SL2Element make(const Modulus& mod, std::int64_t a, std::int64_t b, std::int64_t c,
                           std::int64_t d) {
        SL2Element g{mod, mod.reduce(a), mod.reduce(b), mod.reduce(c), mod.reduce(d)};
        const std::int64_t det = mod.reduce(mul_mod(g.a, g.d, mod.MN()) - mul_mod(g.b, g.c, mod.MN()));
        if (det != 1) {
            throw Error(ErrorCode::DetNotOne, "ad - bc = " + std::to_string(det) + " mod " +
                                                  std::to_string(mod.MN()));
        }
        return g;
    }

    static SL2Element identity(const Modulus& mod) { return make(mod, 1, 0, 0, 1); }

    /// Column-vector action (k, l) -> (ak + bl, ck + dl).
    std::pair<std::int64_t, std::int64_t> apply(std::int64_t k, std::int64_t l) const {
        const std::int64_t L = mod.MN();
        return {mod.reduce(mul_mod(a, k, L) + mul_mod(b, l, L)),
                mod.reduce(mul_mod(c, k, L) + mul_mod(d, l, L))};
    }

    SL2Element inverse() const { return make(mod, d, -b, -c, a); }

    friend SL2Element operator*(const SL2Element& x, const SL2Element& y) {
        require_same(x.mod, y.mod);
        const std::int64_t L = x.mod.MN();
        auto dot = [L](std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s) {
            return mod_floor(mul_mod(p, q, L) + mul_mod(r, s, L), L);
        };
        return make(x.mod, dot(x.a, y.a, x.b, y.c), dot(x.a, y.b, x.b, y.d),
                    dot(x.c, y.a, x.d, y.c), dot(x.c, y.b, x.d, y.d));
    }

    friend bool operator==(const SL2Element&, const SL2Element&) = default;
};

inline SL2Element lfm_element(const Modulus& mod, std::int64_t A) {
    return SL2Element::make(mod, 1, 0, 2 * A, 1);
}

/// Some g in SL2(Z_MN) with g.from = to, for vectors of order MN.
inline SL2Element sl2_mapping(const Modulus& mod, std::pair<std::int64_t, std::int64_t> from,
                              std::pair<std::int64_t, std::int64_t> to) {
    // Complete u to a determinant-one basis [[u1, s], [u2, t]] prime by prime, then glue by CRT.
    auto complete = [&mod](std::int64_t u1, std::int64_t u2) {
        std::array<std::int64_t, 2> s{}, t{};
        const std::array<std::int64_t, 2> primes{mod.N(), mod.M()};
        for (std::size_t i = 0; i < 2; ++i) {
            const std::int64_t p = primes[i];
            if (mod_floor(u1, p) != 0) {
                t[i] = mod_inv(u1, p);
            } else if (mod_floor(u2, p) != 0) {
                s[i] = mod_floor(-mod_inv(u2, p), p);
            } else {
                throw Error(ErrorCode::NotPrimitive, "vector is not of order MN");
            }
        }
        return SL2Element::make(mod, u1, crt_join({s[0], s[1]}, mod), u2, crt_join({t[0], t[1]}, mod));
    };
    const SL2Element bu = complete(from.first, from.second);
    const SL2Element bv = complete(to.first, to.second);
    return bv * bu.inverse();
}

/// Phase index of the conjugation factor of W(g): (1/2)(ack^2 + bdl^2 + 2bckl).
inline PhaseIndex conjugation_phase(const SL2Element& g, std::int64_t k, std::int64_t l) {
    const std::int64_t L = g.mod.MN();
    const std::int64_t q = mul_mod(mul_mod(g.a, g.c, L), mul_mod(k, k, L), L) +
                           mul_mod(mul_mod(g.b, g.d, L), mul_mod(l, l, L), L) +
                           2 * mul_mod(mul_mod(g.b, g.c, L), mul_mod(k, l, L), L);
    return g.mod.half_phase(q);
}

// -- LFM -------------------------------------------------------------------

inline PeriodicSequence lfm_apply(std::int64_t A, const PeriodicSequence& x) {
    const Modulus& mod = x.modulus();
    if (gcd(A, mod.MN()) != 1) {
        throw Error(ErrorCode::NotCoprime, "LFM rate must be a unit modulo MN");
    }
    PeriodicSequence out(mod);
    for (std::int64_t n = 0; n < mod.MN(); ++n) {
        out[n] = to_complex(mod, mod.whole_phase(mul_mod(A, mul_mod(n, n, mod.MN()), mod.MN()))) * x[n];
    }
    return out;
}

inline PeriodicSequence lfm_inverse(std::int64_t A, const PeriodicSequence& x) {
    return lfm_apply(-A, x);
}

// -- GDAFT -----------------------------------------------------------------

namespace detail {

inline void require_gdaft(const SL2Element& g) {
    if (gcd(g.b, g.mod.MN()) != 1) {
        throw Error(ErrorCode::BNotCoprime, "GDAFT requires b to be a unit modulo MN");
    }
}

/// exp(j*2*pi*(1/2)*coef*n^2/MN) for n in Z_MN.
inline std::vector<cplx> half_chirp(const Modulus& mod, std::int64_t coef) {
    std::vector<cplx> w(static_cast<std::size_t>(mod.MN()));
    for (std::int64_t n = 0; n < mod.MN(); ++n) {
        w[static_cast<std::size_t>(n)] =
            to_complex(mod, mod.half_phase(mul_mod(coef, mul_mod(n, n, mod.MN()), mod.MN())));
    }
    return w;
}

}  // namespace detail

/// GDAFT evaluated as chirp * permuted DFT * chirp, O(MN log MN).
inline PeriodicSequence gdaft_apply(const SL2Element& g, const PeriodicSequence& x) {
    require_same(g.mod, x.modulus());
    detail::require_gdaft(g);
    const Modulus& mod = g.mod;
    const std::int64_t L = mod.MN();
    const std::int64_t b_inv = mod_inv(g.b, L);
    const auto pre = detail::half_chirp(mod, mul_mod(b_inv, g.a, L));
    const auto post = detail::half_chirp(mod, mul_mod(b_inv, g.d, L));
    std::vector<cplx> f(static_cast<std::size_t>(L));
    for (std::int64_t n = 0; n < L; ++n) {
        f[static_cast<std::size_t>(n)] = pre[static_cast<std::size_t>(n)] * x[n];
    }
    const auto F = fft::forward(f);
    const double scale = 1.0 / std::sqrt(static_cast<double>(L));
    PeriodicSequence out(mod);
    for (std::int64_t n = 0; n < L; ++n) {
        out[n] = scale * post[static_cast<std::size_t>(n)] * F[static_cast<std::size_t>(mul_mod(b_inv, n, L))];
    }
    return out;
}

/// Adjoint (= inverse) of gdaft_apply.
inline PeriodicSequence gdaft_adjoint(const SL2Element& g, const PeriodicSequence& y) {
    require_same(g.mod, y.modulus());
    detail::require_gdaft(g);
    const Modulus& mod = g.mod;
    const std::int64_t L = mod.MN();
    const std::int64_t b_inv = mod_inv(g.b, L);
    const auto pre = detail::half_chirp(mod, mul_mod(b_inv, g.a, L));
    const auto post = detail::half_chirp(mod, mul_mod(b_inv, g.d, L));
    std::vector<cplx> f(static_cast<std::size_t>(L));
    for (std::int64_t n = 0; n < L; ++n) {
        f[static_cast<std::size_t>(n)] = std::conj(post[static_cast<std::size_t>(n)]) * y[n];
    }
    const auto G = fft::backward(f);
    const double scale = 1.0 / std::sqrt(static_cast<double>(L));
    PeriodicSequence out(mod);
    for (std::int64_t n1 = 0; n1 < L; ++n1) {
        out[n1] = scale * std::conj(pre[static_cast<std::size_t>(n1)]) *
                  G[static_cast<std::size_t>(mul_mod(b_inv, n1, L))];
    }
    return out;
}

/// GDAFT by its defining double sum, O(M^2 N^2). Reference for gdaft_apply.
inline PeriodicSequence gdaft_apply_direct(const SL2Element& g, const PeriodicSequence& x) {
    require_same(g.mod, x.modulus());
    detail::require_gdaft(g);
    const Modulus& mod = g.mod;
    const std::int64_t L = mod.MN();
    const std::int64_t b_inv = mod_inv(g.b, L);
    const double scale = 1.0 / std::sqrt(static_cast<double>(L));
    PeriodicSequence out(mod);
    for (std::int64_t n = 0; n < L; ++n) {
        cplx acc{};
        for (std::int64_t n1 = 0; n1 < L; ++n1) {
            const std::int64_t q = mul_mod(g.d, mul_mod(n, n, L), L) - 2 * mul_mod(n, n1, L) +
                                   mul_mod(g.a, mul_mod(n1, n1, L), L);
            acc += to_complex(mod, mod.half_phase(mul_mod(b_inv, mod_floor(q, L), L))) * x[n1];
        }
        out[n] = scale * acc;
    }
    return out;
}

// -- General symplectic operators -------------------------------------------

/// A symplectic operator stored as a product of LFM and GDAFT factors.
class SymplecticOperator {
public:
    struct Lfm {
        std::int64_t rate;
    };
    struct Gdaft {
        SL2Element g;
    };
    using Factor = std::variant<Lfm, Gdaft>;

    static SymplecticOperator lfm(const Modulus& mod, std::int64_t A) {
        if (gcd(A, mod.MN()) != 1) {
            throw Error(ErrorCode::NotCoprime, "LFM rate must be a unit modulo MN");
        }
        return SymplecticOperator(lfm_element(mod, A), {Lfm{mod.reduce(A)}});
    }

    /// W(g) for any g in SL2(Z_MN).
    static SymplecticOperator for_element(const SL2Element& g) {
        const Modulus& mod = g.mod;
        const std::int64_t L = mod.MN();
        if (gcd(g.b, L) == 1) {
            return SymplecticOperator(g, {Gdaft{g}});
        }
        // S g with S = [[1, x0], [0, 1]] has b-entry b + x0*d; pick x0 making it and
        // S^-1's b-entry (-x0) units. Such x0 exists since M, N >= 3.
        for (std::int64_t x0 = 1; x0 < L; ++x0) {
            if (gcd(x0, L) == 1 && gcd(g.b + mul_mod(x0, g.d, L), L) == 1) {
                const SL2Element shear = SL2Element::make(mod, 1, x0, 0, 1);
                return SymplecticOperator(g, {Gdaft{shear * g}, Gdaft{shear.inverse()}});
            }
        }
        throw Error(ErrorCode::Config, "no shear decomposition found");
    }

    const SL2Element& element() const noexcept { return g_; }
    const Modulus& modulus() const noexcept { return g_.mod; }

    PeriodicSequence apply(const PeriodicSequence& x) const {
        require_same(g_.mod, x.modulus());
        PeriodicSequence y = x;
        for (const auto& f : factors_) {
            y = std::visit([&y](const auto& factor) { return forward(factor, y); }, f);
        }
        return y;
    }

    PeriodicSequence apply_inverse(const PeriodicSequence& y) const {
        require_same(g_.mod, y.modulus());
        PeriodicSequence x = y;
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
            x = std::visit([&x](const auto& factor) { return backward(factor, x); }, *it);
        }
        return x;
    }

    /// The operator W(g2) o W(g1) for g2 = this, g1 = other.
    SymplecticOperator after(const SymplecticOperator& first) const {
        std::vector<Factor> merged = first.factors_;
        merged.insert(merged.end(), factors_.begin(), factors_.end());
        return SymplecticOperator(g_ * first.g_, std::move(merged));
    }

    std::size_t factor_count() const noexcept { return factors_.size(); }

private:
    SymplecticOperator(SL2Element g, std::vector<Factor> factors)
        : g_(std::move(g)), factors_(std::move(factors)) {}

    static PeriodicSequence forward(const Lfm& f, const PeriodicSequence& x) { return lfm_apply(f.rate, x); }
    static PeriodicSequence forward(const Gdaft& f, const PeriodicSequence& x) { return gdaft_apply(f.g, x); }
    static PeriodicSequence backward(const Lfm& f, const PeriodicSequence& x) { return lfm_inverse(f.rate, x); }
    static PeriodicSequence backward(const Gdaft& f, const PeriodicSequence& x) { return gdaft_adjoint(f.g, x); }

    SL2Element g_;
    std::vector<Factor> factors_;  // in application order
};

inline PeriodicSequence sl2_apply(const SL2Element& g, const PeriodicSequence& x) {
    return SymplecticOperator::for_element(g).apply(x);
}

// -- Ambiguity remapping ----------------------------------------------------

/// A_{x,y}[k,l] = exp(j*pi*phase(k,l)/MN) * A_{Wx,Wy}[g.(k,l)].
struct AmbiguityRemap {
    SL2Element g;

    PhaseIndex phase(std::int64_t k, std::int64_t l) const {
        const PhaseIndex c = conjugation_phase(g, k, l);
        return g.mod.phase(-c.value);
    }

    std::pair<std::int64_t, std::int64_t> target(std::int64_t k, std::int64_t l) const {
        return g.apply(k, l);
    }
};

inline AmbiguityRemap remap_for(const SL2Element& g) { return {g}; }
inline AmbiguityRemap remap_for_lfm(const Modulus& mod, std::int64_t A) { return {lfm_element(mod, A)}; }

// -- PAPR -------------------------------------------------------------------

/// 10*log10(max |x|^2 / mean |x|^2).
inline double papr_db(std::span<const cplx> x) {
    double peak = 0.0, total = 0.0;
    for (const auto& z : x) {
        const double p = std::norm(z);
        peak = std::max(peak, p);
        total += p;
    }
    if (x.empty() || total == 0.0) {
        throw Error(ErrorCode::ZeroSequence, "PAPR of the zero sequence is undefined");
    }
    return 10.0 * std::log10(peak / (total / static_cast<double>(x.size())));
}

inline double papr_db(const PeriodicSequence& x) { return papr_db(x.samples()); }

}  // namespace ddradar
