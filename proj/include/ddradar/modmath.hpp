#pragma once

// Exact integer arithmetic modulo MN and 2MN.
//
// Every phase in the toolkit is an integer p in Z_2MN standing for
// exp(j*pi*p/MN). Whole phases exp(j*2*pi*m/MN) are the even indices 2m.
// Keeping phases as integers until the final complex evaluation makes group
// identities hold bit-exactly.

#include "ddradar/error.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

namespace ddradar {

using cplx = std::complex<double>;

/// Floor-reduction into [0, n) for any sign of x.
constexpr std::int64_t mod_floor(std::int64_t x, std::int64_t n) {
    const std::int64_t r = x % n;
    return r < 0 ? r + n : r;
}

/// Floor division, rounding towards negative infinity.
constexpr std::int64_t floor_div(std::int64_t x, std::int64_t n) {
    const std::int64_t q = x / n;
    return (x % n != 0 && ((x < 0) != (n < 0))) ? q - 1 : q;
}

__extension__ using int128 = __int128;

/// (a * b) mod n without intermediate overflow.
constexpr std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t n) {
    const int128 p = static_cast<int128>(mod_floor(a, n)) * mod_floor(b, n);
    return static_cast<std::int64_t>(p % n);
}

/// Greatest common divisor of |a| and |b|; gcd(0, 0) = 0.
constexpr std::int64_t gcd(std::int64_t a, std::int64_t b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Inverse of a modulo n. Throws NotInvertible when gcd(a, n) != 1.
inline std::int64_t mod_inv(std::int64_t a, std::int64_t n) {
    if (n < 1) {
        throw Error(ErrorCode::NotInvertible, "modulus must be positive");
    }
    if (n == 1) {
        return 0;
    }
    // Extended Euclid on (a mod n, n).
    std::int64_t r0 = n, r1 = mod_floor(a, n);
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
    }
    if (r0 != 1) {
        throw Error(ErrorCode::NotInvertible,
                    std::to_string(a) + " has no inverse modulo " + std::to_string(n));
    }
    return mod_floor(t0, n);
}

/// Deterministic trial division.
constexpr bool is_prime(std::int64_t n) {
    if (n < 2) {
        return false;
    }
    if (n % 2 == 0) {
        return n == 2;
    }
    for (std::int64_t d = 3; d <= n / d; d += 2) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

/// Index of exp(j*pi*value/MN); always held in [0, 2MN).
struct PhaseIndex {
    std::int64_t value = 0;

    friend constexpr bool operator==(PhaseIndex, PhaseIndex) = default;
};

/// Largest MN for which 2*MN*MN still fits a signed 64-bit integer.
inline constexpr std::int64_t kMaxMN = 2147483647;

/// The pair of distinct odd primes (M, N) defining the delay-Doppler grid.
class Modulus {
public:
    /// Validates M, N. With allow_composite the primality test is skipped
    /// (maximality guarantees no longer hold) but M, N must still be odd,
    /// distinct, coprime and at least 3.
    static Modulus make(std::int64_t M, std::int64_t N, bool allow_composite = false) {
        if (M < 3 || N < 3) {
            throw Error(ErrorCode::Config, "M and N must be at least 3");
        }
        if (M % 2 == 0 || N % 2 == 0) {
            throw Error(ErrorCode::Config, "M and N must be odd");
        }
        if (M == N) {
            throw Error(ErrorCode::Config, "M and N must be distinct");
        }
        if (!allow_composite && (!is_prime(M) || !is_prime(N))) {
            throw Error(ErrorCode::Config,
                        "M and N must be prime (M=" + std::to_string(M) +
                            ", N=" + std::to_string(N) + ")");
        }
        if (gcd(M, N) != 1) {
            throw Error(ErrorCode::Config, "M and N must be coprime");
        }
        if (M > kMaxMN / N) {
            throw Error(ErrorCode::Config, "MN exceeds the 64-bit safe range");
        }
        return Modulus(M, N);
    }

    constexpr std::int64_t M() const noexcept { return M_; }
    constexpr std::int64_t N() const noexcept { return N_; }
    constexpr std::int64_t MN() const noexcept { return M_ * N_; }
    constexpr std::int64_t twoMN() const noexcept { return 2 * M_ * N_; }

    constexpr std::int64_t reduce(std::int64_t x) const noexcept { return mod_floor(x, MN()); }
    constexpr PhaseIndex phase(std::int64_t p) const noexcept { return {mod_floor(p, twoMN())}; }

    /// Phase index of the whole phase exp(j*2*pi*m/MN).
    constexpr PhaseIndex whole_phase(std::int64_t m) const noexcept {
        return {2 * mod_floor(m, MN())};
    }

    /// Phase index of exp(j*2*pi*(m/2)/MN) where 1/2 is the inverse of 2 mod MN.
    /// This is the unique even index congruent to m modulo MN, so it agrees
    /// with exp(j*pi*m/MN) whenever m is even and stays MN-periodic otherwise.
    constexpr PhaseIndex half_phase(std::int64_t m) const noexcept {
        const std::int64_t half = (MN() + 1) / 2;
        return {2 * mul_mod(half, m, MN())};
    }

    friend constexpr bool operator==(const Modulus&, const Modulus&) = default;

private:
    constexpr Modulus(std::int64_t M, std::int64_t N) : M_(M), N_(N) {}

    std::int64_t M_;
    std::int64_t N_;
};

inline std::string describe(const Modulus& mod) {
    return "(M=" + std::to_string(mod.M()) + ", N=" + std::to_string(mod.N()) + ")";
}

inline void require_same(const Modulus& a, const Modulus& b) {
    if (a != b) {
        throw Error(ErrorCode::ModulusMismatch, describe(a) + " vs " + describe(b));
    }
}

/// Decomposition x = (M^-1 mod N)*a*M + (N^-1 mod M)*b*N (mod MN).
struct CrtParts {
    std::int64_t a;  ///< in Z_N
    std::int64_t b;  ///< in Z_M
};

inline CrtParts crt_split(std::int64_t x, const Modulus& mod) {
    // Modulo N the second term vanishes and the first reduces to a; likewise for b.
    return {mod_floor(x, mod.N()), mod_floor(x, mod.M())};
}

inline std::int64_t crt_join(const CrtParts& parts, const Modulus& mod) {
    const std::int64_t m_inv = mod_inv(mod.M(), mod.N());
    const std::int64_t n_inv = mod_inv(mod.N(), mod.M());
    const std::int64_t t1 = mul_mod(mul_mod(m_inv, parts.a, mod.MN()), mod.M(), mod.MN());
    const std::int64_t t2 = mul_mod(mul_mod(n_inv, parts.b, mod.MN()), mod.N(), mod.MN());
    return mod.reduce(t1 + t2);
}

inline PhaseIndex phase_mul(const Modulus& mod, PhaseIndex p1, PhaseIndex p2) {
    return mod.phase(p1.value + p2.value);
}

/// exp(j*pi*p/period_half) for an index p taken modulo 2*period_half.
/// Evaluated on [0, pi/2] and unfolded by symmetry, so p = 0 and
/// p = period_half come out as exactly 1 and -1, and conjugate indices give
/// exactly conjugate values.
inline cplx unit_root(std::int64_t p, std::int64_t period_half) {
    const std::int64_t full = 2 * period_half;
    std::int64_t r = mod_floor(p, full);
    bool conj = false;
    if (r > period_half) {
        r = full - r;
        conj = true;
    }
    bool negate = false;
    if (2 * r > period_half) {
        r = period_half - r;
        negate = true;
        conj = !conj;
    }
    const double angle = std::numbers::pi * static_cast<double>(r) / static_cast<double>(period_half);
    cplx z = r == 0 ? cplx(1.0, 0.0) : cplx(std::cos(angle), std::sin(angle));
    if (conj) {
        z = std::conj(z);
    }
    return negate ? -z : z;
}

inline cplx to_complex(const Modulus& mod, PhaseIndex p) {
    return unit_root(p.value, mod.MN());
}

/// exp(j*2*pi*m/n) through the same symmetric evaluation.
inline cplx root_of_unity(std::int64_t m, std::int64_t n) {
    return unit_root(2 * mod_floor(m, n), n);
}

}  // namespace ddradar
