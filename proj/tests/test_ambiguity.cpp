#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ddradar;

namespace {

const Modulus kSmall = Modulus::make(3, 5);
const Modulus kDesk = Modulus::make(31, 37);

double surface_vs_oracle(const AmbiguitySurface& s, std::span<const cplx> x, std::span<const cplx> y) {
    double worst = 0.0;
    for (std::int64_t k = 0; k < s.rows(); ++k) {
        for (std::int64_t l = 0; l < s.cols(); ++l) {
            worst = std::max(worst, std::abs(s(k, l) - oracle::ambiguity(x, y, k, l)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("naive and dense engines match the oracle") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 5; ++t) {
        const auto x = oracle::random_sequence(kSmall, rng);
        const auto y = oracle::random_sequence(kSmall, rng);
        CHECK(surface_vs_oracle(cross_ambiguity_naive(x, y), x.samples(), y.samples()) < 1e-12);
        CHECK(surface_vs_oracle(cross_ambiguity_naive(x, y, Grid::Fundamental), x.samples(), y.samples()) < 1e-12);
        CHECK(surface_vs_oracle(cross_ambiguity_dense(x.samples(), y.samples()), x.samples(), y.samples()) < 1e-12);
        CHECK(std::abs(cross_ambiguity_naive(x, x)(0, 0) - 1.0) < 1e-12);
    }
    const auto x = oracle::random_vector(60, rng);
    const auto y = oracle::random_vector(60, rng);
    CHECK(surface_vs_oracle(cross_ambiguity_dense(x, y), x, y) < 1e-12);
    CHECK_THROWS_AS(cross_ambiguity_naive(x, std::span<const cplx>(y).first(59)), Error);
}

TEST_CASE("threaded engines give identical results") {
    std::mt19937_64 rng(2);
    const auto x = oracle::random_sequence(kSmall, rng);
    const auto y = oracle::random_sequence(kSmall, rng);
    const auto a = cross_ambiguity_naive(x, y, Grid::Full, Execution{1});
    const auto b = cross_ambiguity_naive(x, y, Grid::Full, Execution{4});
    CHECK(oracle::max_diff(a.values(), b.values()) == 0.0);
    const auto c = cross_ambiguity_dense(x.samples(), y.samples(), Execution{3});
    const auto d = cross_ambiguity_dense(x.samples(), y.samples(), Execution{1});
    CHECK(oracle::max_diff(c.values(), d.values()) == 0.0);
}

TEST_CASE("non-unit inputs trigger a warning, not a failure") {
    std::vector<std::string> seen;
    auto saved = warning_handler();
    warning_handler() = [&](std::string_view m) { seen.emplace_back(m); };
    const PeriodicSequence twice = 2.0 * pulsone(kSmall, 0, 0);
    const auto s = cross_ambiguity_naive(twice, twice);
    warning_handler() = saved;
    CHECK(seen.size() == 2);
    CHECK(std::abs(s(0, 0) - 4.0) < 1e-12);
}

TEST_CASE("bed of nails for pulsones and chirps") {
    const auto p = pulsone(kSmall, 0, 0);
    const auto ap = cross_ambiguity_naive(p, p);
    for (std::int64_t k = 0; k < 15; ++k) {
        for (std::int64_t l = 0; l < 15; ++l) {
            const double m = std::abs(ap(k, l));
            if (k % 3 == 0 && l % 5 == 0) {
                CHECK(std::abs(m - 1.0) < 1e-12);
            } else {
                CHECK(m < 1e-12);
            }
        }
    }
    for (std::int64_t alpha : {1, 2, 7}) {
        const auto c = chirp(kSmall, alpha, 3);
        const auto ac = cross_ambiguity_naive(c, c);
        for (std::int64_t k = 0; k < 15; ++k) {
            for (std::int64_t l = 0; l < 15; ++l) {
                const double m = std::abs(ac(k, l));
                if (l == mod_floor(2 * alpha * k, 15)) {
                    CHECK(std::abs(m - 1.0) < 1e-12);
                } else {
                    CHECK(m < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("fast pulsone precompute") {
    const auto pre = fast_pulsone_precompute(PeriodicSequence::unit(kSmall, 0), 0, 0);
    for (std::int64_t m = 0; m < 5; ++m) {
        CHECK(std::abs(pre.rowfft(0, m) - 1.0 / std::sqrt(5.0)) < 1e-15);
        CHECK(std::abs(pre.rowfft(1, m)) == 0.0);
        CHECK(std::abs(pre.rowfft(2, m)) == 0.0);
    }
    CHECK_THROWS_AS(fast_pulsone_precompute(PeriodicSequence::unit(kSmall, 0), 3, 0), Error);
    for (std::int64_t k0 = 0; k0 < 3; ++k0) {
        for (std::int64_t l0 = 0; l0 < 5; ++l0) {
            const auto p = pulsone(kSmall, k0, l0);
            CHECK(std::abs(fast_pulsone_query(fast_pulsone_precompute(p, k0, l0), 0, 0) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("fast pulsone query matches naive everywhere at MN=15") {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto x = oracle::random_sequence(kSmall, rng);
        const std::int64_t k0 = static_cast<std::int64_t>(rng() % 3);
        const std::int64_t l0 = static_cast<std::int64_t>(rng() % 5);
        const auto p = pulsone(kSmall, k0, l0);
        const auto pre = fast_pulsone_precompute(x, k0, l0);
        for (std::int64_t k = 0; k < 15; ++k) {
            for (std::int64_t l = 0; l < 15; ++l) {
                worst = std::max(worst, std::abs(fast_pulsone_query(pre, k, l) - oracle::ambiguity(x.samples(), p.samples(), k, l)));
            }
        }
        // queries accept any integer and reduce
        CHECK(fast_pulsone_query(pre, -1, 17) == fast_pulsone_query(pre, 14, 2));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("fast engine for symplectic images of pulsones") {
    std::mt19937_64 rng(4);
    const std::vector<std::optional<SymplecticOperator>> ops = {
        std::nullopt,
        SymplecticOperator::lfm(kSmall, 2),
        SymplecticOperator::for_element(SL2Element::make(kSmall, 1, 1, 0, 1)),
        SymplecticOperator::for_element(SL2Element::make(kSmall, 2, 7, 1, 4)),
        SymplecticOperator::for_element(SL2Element::make(kSmall, 4, 0, 0, 4)),
        SymplecticOperator::lfm(kSmall, 1).after(SymplecticOperator::for_element(SL2Element::make(kSmall, 1, 3, 0, 1))),
    };
    for (const auto& op : ops) {
        const auto y = Waveform::from_pulsone(kSmall, 2, 3, op, "y");
        const auto x = oracle::random_sequence(kSmall, rng);
        FastAmbiguityEngine engine(x, 2, 3, op);
        CHECK(surface_vs_oracle(engine.materialize(Grid::Full), x.samples(), y.samples.samples()) < 1e-10);
        CHECK(surface_vs_oracle(cross_ambiguity(x, y, Grid::Fundamental), x.samples(), y.samples.samples()) < 1e-10);
    }
}

TEST_CASE("fast engine on eigenbases of every line") {
    std::mt19937_64 rng(5);
    for (const auto& T : oracle::all_lines(kSmall)) {
        const auto basis = eigenbasis_for_line(T);
        const auto y = Waveform::from_eigenbasis(basis, 7, "eigen");
        if (!y.fast_capable()) {
            CHECK(basis.kind == EigenBasis::Kind::Chirp);
            continue;
        }
        const auto x = oracle::random_sequence(kSmall, rng);
        CHECK(surface_vs_oracle(cross_ambiguity(x, y, Grid::Full), x.samples(), y.samples.samples()) < 1e-10);
    }
}

TEST_CASE("fast path spot checks at MN=1147") {
    std::mt19937_64 rng(6);
    const auto x = oracle::random_sequence(kDesk, rng);
    const auto op = SymplecticOperator::for_element(SL2Element::make(kDesk, 2, 5, 1, 3));
    const auto y0 = pulsone(kDesk, 4, 9);
    const auto y1 = op.apply(y0);
    FastAmbiguityEngine plain(x, 4, 9);
    FastAmbiguityEngine rotated(x, 4, 9, op);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto k = static_cast<std::int64_t>(rng() % 1147);
        const auto l = static_cast<std::int64_t>(rng() % 1147);
        worst = std::max(worst, std::abs(plain.query(k, l) - oracle::ambiguity(x.samples(), y0.samples(), k, l)));
        worst = std::max(worst, std::abs(rotated.query(k, l) - oracle::ambiguity(x.samples(), y1.samples(), k, l)));
    }
    CHECK(worst < 1e-10);
    const auto fund = plain.materialize(Grid::Fundamental, Execution{4});
    CHECK(fund.rows() == 31);
    CHECK(fund.cols() == 37);
    CHECK(oracle::max_diff(fund.values(), cross_ambiguity_naive(x, y0, Grid::Fundamental).values()) < 1e-10);
}

TEST_CASE("Moyal identity and unimodular counts") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const auto x = oracle::random_sequence(kSmall, rng);
        CHECK(moyal_residual(x, x) < 1e-10);
        const auto y = oracle::random_sequence(kSmall, rng);
        CHECK(moyal_residual(x, y) < 1e-10);
        if (t < 50) {
            CHECK(unimodular_count(cross_ambiguity_naive(x, x)) <= 15);
        }
    }
    CHECK(moyal_residual(pulsone(kSmall, 0, 0), pulsone(kSmall, 1, 2)) < 1e-10);
    CHECK(unimodular_count(cross_ambiguity_naive(pulsone(kSmall, 0, 0), pulsone(kSmall, 0, 0))) == 15);
    for (int t = 0; t < 10; ++t) {
        const auto x = oracle::random_sequence(kDesk, rng);
        CHECK(moyal_residual(x, x) < 1e-10);
    }
}

TEST_CASE("Moyal through the literal definition at MN=15") {
    std::mt19937_64 rng(8);
    const auto x = oracle::random_sequence(kSmall, rng);
    const auto y = oracle::random_sequence(kSmall, rng);
    const auto ax = oracle::ambiguity_surface(x.samples(), x.samples());
    const auto ay = oracle::ambiguity_surface(y.samples(), y.samples());
    cplx acc{};
    for (std::size_t i = 0; i < ax.size(); ++i) {
        acc += std::conj(ax[i]) * ay[i];
    }
    CHECK(std::abs(acc / 15.0 - std::norm(oracle::inner(x.samples(), y.samples()))) < 1e-12);
}

TEST_CASE("Cauchy-Schwarz bound") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        const auto x = oracle::random_sequence(kSmall, rng);
        const auto y = oracle::random_sequence(kSmall, rng);
        for (const auto& v : cross_ambiguity_dense(x.samples(), y.samples()).values()) {
            CHECK(std::abs(v) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("Zadoff-Chu") {
    const auto z = zc_sequence(1, 3);
    const double s = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(z[0] - s) < 1e-15);
    CHECK(std::abs(z[1] - s * oracle::expj(-oracle::kTwoPi / 3.0)) < 1e-15);
    CHECK(std::abs(z[2] - s) < 1e-15);
    CHECK_THROWS_AS(zc_sequence(3, 15), Error);
    CHECK_THROWS_AS(zc_sequence(1, 16), Error);

    for (std::int64_t L : {15, 35, 1147}) {
        for (std::int64_t root : {1, 2, 4}) {
            const auto zz = zc_sequence(root, L);
            for (const auto& v : zz) {
                CHECK(std::abs(std::abs(v) - 1.0 / std::sqrt(static_cast<double>(L))) < 1e-15);
            }
            if (L <= 35) {
                for (std::int64_t k = 1; k < L; ++k) {
                    CHECK(std::abs(oracle::ambiguity(zz, zz, k, 0)) < 1e-10);
                }
            }
            // direct formula with a real-valued phase
            for (std::int64_t n = 0; n < L; n += 7) {
                const double ph = -std::numbers::pi * static_cast<double>(root * ((n * (n + 1)) % (2 * L))) / static_cast<double>(L);
                CHECK(std::abs(zz[static_cast<std::size_t>(n)] - std::polar(1.0 / std::sqrt(static_cast<double>(L)), ph)) < 1e-12);
            }
        }
    }
}

TEST_CASE("coded waveforms") {
    const std::vector<cplx> ones(15, 1.0);
    const auto y = coded_waveform(ones, std::vector<double>{1.0});
    for (const auto& v : y) {
        CHECK(std::abs(v - 1.0 / std::sqrt(15.0)) < 1e-15);
    }
    const auto z = zc_sequence(1, 15);
    CHECK(oracle::max_diff(coded_waveform(z, std::vector<double>{1.0}), z) < 1e-15);
    CHECK_THROWS_AS(coded_waveform(z, std::vector<double>{}), Error);
    CHECK_THROWS_AS(coded_waveform(std::vector<cplx>(4), std::vector<double>{1.0}), Error);

    const auto y4 = coded_waveform(z, std::vector<double>(4, 1.0));
    REQUIRE(y4.size() == 60);
    const auto a = cross_ambiguity_dense(y4, y4);
    const CodedRidge ridge{1, 15, 4};
    CHECK(ridge.contains(0, 0));
    CHECK(ridge.contains(4, 14));
    CHECK_FALSE(ridge.contains(2, 0));
    CHECK(max_off_ridge_db(a, [&](std::int64_t k, std::int64_t l) { return ridge.contains(k, l); }) > -40.0);
}

TEST_CASE("ZC sequences are chirps of slope -root") {
    const auto z = zc_sequence(2, 15);
    const auto alpha = mul_mod(-2, mod_inv(2, 15), 15);
    CHECK(oracle::max_diff(z, chirp(kSmall, alpha, alpha).samples()) < 1e-14);
    const auto a = cross_ambiguity_naive(z, z);
    const auto line = LineSubgroup::from_slope(kSmall, -2);
    CHECK(max_off_ridge_db(a, [&](std::int64_t k, std::int64_t l) { return line.contains(k, l); }) < -180.0);
}

TEST_CASE("surface indexing") {
    auto s = AmbiguitySurface::fundamental(kSmall);
    CHECK(s.rows() == 3);
    CHECK(s.cols() == 5);
    CHECK_THROWS_AS(s(3, 0), Error);
    s(1, 2) = 5.0;
    CHECK(s.at(16, 17) == cplx(5.0, 0.0));
}
