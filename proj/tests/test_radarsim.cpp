#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ddradar;

namespace {

const Modulus kSmall = Modulus::make(3, 5);

ScatteringEnvironment random_env(const Modulus& mod, std::mt19937_64& rng, int taps) {
    std::vector<Tap> out;
    std::set<std::pair<std::int64_t, std::int64_t>> used;
    std::normal_distribution<double> g(0.0, 1.0);
    while (static_cast<int>(out.size()) < taps) {
        const auto k = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(mod.MN()));
        const auto l = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(mod.MN()));
        if (used.emplace(k, l).second) {
            const double re = g(rng);
            const double im = g(rng);
            out.push_back({k, l, {re, im}});
        }
    }
    return ScatteringEnvironment::make(mod, out);
}

}  // namespace

TEST_CASE("apply_channel examples") {
    std::mt19937_64 rng(1);
    const auto x = oracle::random_sequence(kSmall, rng);
    CHECK(apply_channel(ScatteringEnvironment::make(kSmall, {}), x).norm() == 0.0);
    CHECK(oracle::max_diff(apply_channel(ScatteringEnvironment::make(kSmall, {{0, 0, 1.0}}), x), x) == 0.0);
    const auto y = apply_channel(ScatteringEnvironment::make(kSmall, {{2, 3, 1.0}}), PeriodicSequence::unit(kSmall, 0));
    CHECK(oracle::max_diff(y, PeriodicSequence::unit(kSmall, 2)) < 1e-15);
    CHECK_THROWS_AS(ScatteringEnvironment::make(kSmall, {{1, 1, 1.0}, {16, 1, 2.0}}), Error);
    CHECK_THROWS_AS(apply_channel(ScatteringEnvironment::make(Modulus::make(5, 7), {}), x), Error);
}

TEST_CASE("apply_channel matches the defining sum, is linear and bounded") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto env = random_env(kSmall, rng, 4);
        const auto x = oracle::random_sequence(kSmall, rng);
        const auto x2 = oracle::random_sequence(kSmall, rng);
        const auto y = apply_channel(env, x);
        std::vector<cplx> want(15);
        double hsum = 0.0;
        for (const auto& tap : env.taps()) {
            const auto s = oracle::shift(x.samples(), tap.k, tap.l);
            for (std::size_t n = 0; n < 15; ++n) {
                want[n] += tap.h * s[n];
            }
            hsum += std::abs(tap.h);
        }
        CHECK(oracle::max_diff(y.samples(), want) < 1e-12);
        CHECK(y.norm() <= hsum * x.norm() + 1e-12);
        const cplx a(0.3, -1.2);
        const auto lhs = apply_channel(env, x + a * x2);
        const auto rhs = y + a * apply_channel(env, x2);
        CHECK(oracle::max_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("add_noise") {
    std::mt19937_64 rng(3);
    const auto y = oracle::random_sequence(kSmall, rng);
    CHECK(oracle::max_diff(add_noise(y, std::numeric_limits<double>::infinity(), 1), y) == 0.0);
    CHECK(oracle::max_diff(add_noise(y, 10.0, 42), add_noise(y, 10.0, 42)) == 0.0);
    CHECK(oracle::max_diff(add_noise(y, 10.0, 42), add_noise(y, 10.0, 43)) > 0.0);
    CHECK_THROWS_AS(add_noise(PeriodicSequence(kSmall), 10.0, 1), Error);

    const auto mod = Modulus::make(31, 37);
    const auto x = oracle::random_sequence(mod, rng);
    for (double snr : {0.0, 10.0, 20.0}) {
        double noise = 0.0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            auto w = add_noise(x, snr, seed);
            w += -1.0 * x;
            noise += w.norm_squared();
        }
        const double measured = 10.0 * std::log10(x.norm_squared() / (noise / 1000.0));
        CHECK(std::abs(measured - snr) < 0.5);
    }
}

TEST_CASE("form_image equals the predicted image") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
        const auto env = random_env(kSmall, rng, 3);
        const auto x = Waveform::plain(oracle::random_sequence(kSmall, rng), "random");
        const auto img = form_image(apply_channel(env, x.samples), x);
        const auto pred = predicted_image(env, cross_ambiguity_naive(x.samples, x.samples));
        CHECK(oracle::max_diff(img.surface.values(), pred.values()) < 1e-10);
        // and the image is literally A_{y,x}
        const auto y = apply_channel(env, x.samples);
        const auto lit = oracle::ambiguity_surface(y.samples(), x.samples.samples());
        CHECK(oracle::max_diff(img.surface.values(), lit) < 1e-10);
    }
    const auto env = random_env(kSmall, rng, 3);
    CHECK_THROWS_AS(predicted_image(env, AmbiguitySurface::fundamental(kSmall)), Error);
    const auto ax = cross_ambiguity_naive(pulsone(kSmall, 0, 0), pulsone(kSmall, 0, 0));
    CHECK(predicted_image(ScatteringEnvironment::make(kSmall, {}), ax).values()[0] == cplx(0.0, 0.0));
    CHECK(oracle::max_diff(predicted_image(ScatteringEnvironment::make(kSmall, {{0, 0, 1.0}}), ax).values(), ax.values()) ==
          0.0);
}

TEST_CASE("form_image uses the fast path for pulsone waveforms") {
    std::mt19937_64 rng(5);
    const auto op = SymplecticOperator::for_element(SL2Element::make(kSmall, 2, 7, 1, 4));
    for (const auto& x : {Waveform::from_pulsone(kSmall, 1, 3, std::nullopt, "p"),
                          Waveform::from_pulsone(kSmall, 1, 3, op, "gp")}) {
        const auto env = random_env(kSmall, rng, 3);
        const auto y = apply_channel(env, x.samples);
        const auto fast = form_image(y, x);
        const auto slow = form_image(y, Waveform::plain(x.samples, "plain"));
        CHECK(oracle::max_diff(fast.surface.values(), slow.surface.values()) < 1e-10);
        CHECK(oracle::max_diff(fast.surface.values(), predicted_image(env, cross_ambiguity_naive(x.samples, x.samples)).values()) <
              1e-10);
    }
}

TEST_CASE("single-tap image value equals the tap") {
    const auto x = Waveform::from_pulsone(kSmall, 0, 0, std::nullopt, "p");
    const cplx h(0.4, -0.7);
    const auto env = ScatteringEnvironment::make(kSmall, {{2, 3, h}});
    const auto img = form_image(apply_channel(env, x.samples), x);
    CHECK(std::abs(img.surface(2, 3) - h) < 1e-12);
}

TEST_CASE("noiseless readout is exact on a crystallized region") {
    const auto mod = Modulus::make(31, 37);
    const auto T = LineSubgroup::rectangular(mod);
    const auto C = DDRegion::make(mod, 0, 30, 0, 36);
    const std::vector<Tap> truth = {{3, 4, {1.0, 0.0}}, {10, 20, {0.0, 0.8}}, {17, 9, {-0.6, 0.3}}, {25, 30, {0.5, -0.5}}};
    const auto env = ScatteringEnvironment::make(mod, truth);
    for (std::int64_t i : {0, 100, 1146}) {
        const auto x = Waveform::from_eigenbasis(eigenbasis_for_line(T), i, "pulsone");
        const auto img = form_image(apply_channel(env, x.samples), x);
        const auto found = readout_targets(img, T, C, 0.25);
        REQUIRE(found.size() == 4);
        for (std::size_t j = 0; j < 4; ++j) {
            // readout scans k then l, which is the order of `truth`
            CHECK(found[j].k == truth[j].k);
            CHECK(found[j].l == truth[j].l);
            CHECK(std::abs(found[j].h - truth[j].h) < 1e-9);
        }
    }
}

TEST_CASE("readout on a tilted line") {
    const auto T = LineSubgroup::make(kSmall, 3, 1);
    const auto basis = eigenbasis_for_line(T);
    // line points (3x, x): the only translates with |dk| <= 2 have dl = +-5
    const auto C = DDRegion::make(kSmall, 0, 2, 0, 4);
    REQUIRE(crystallization_check(T, C));
    const auto env = ScatteringEnvironment::make(kSmall, {{0, 2, 1.0}, {2, 4, cplx(0.0, -0.5)}});
    const auto x = Waveform::from_eigenbasis(basis, 4, "eigen");
    const auto found = readout_targets(form_image(apply_channel(env, x.samples), x), T, C, 0.25);
    REQUIRE(found.size() == 2);
    CHECK(std::abs(found[0].h - 1.0) < 1e-9);
    CHECK(std::abs(found[1].h - cplx(0.0, -0.5)) < 1e-9);
}

TEST_CASE("readout refuses an aliased region") {
    const auto T = LineSubgroup::rectangular(kSmall);
    const auto x = Waveform::from_pulsone(kSmall, 0, 0, std::nullopt, "p");
    const auto img = form_image(x.samples, x);
    try {
        readout_targets(img, T, DDRegion::make(kSmall, 0, 3, 0, 4), 0.5);
        FAIL("expected NotCrystallized");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotCrystallized);
    }
}

TEST_CASE("noisy four-target scene") {
    const auto mod = Modulus::make(31, 37);
    const auto T = LineSubgroup::rectangular(mod);
    const auto C = DDRegion::make(mod, 0, 30, 0, 36);
    const std::vector<Tap> truth = {{3, 4, {1.0, 0.0}}, {10, 20, {0.0, 1.0}}, {17, 9, {-1.0, 0.0}}, {25, 30, {0.0, -1.0}}};
    const auto env = ScatteringEnvironment::make(mod, truth);
    const auto x = Waveform::from_pulsone(mod, 0, 0, std::nullopt, "p");
    const auto clean = apply_channel(env, x.samples);
    int all_found = 0, clean_runs = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto img = form_image(add_noise(clean, 20.0, seed), x);
        const auto found = readout_targets(img, T, C, 0.5);
        int hits = 0;
        for (const auto& t : truth) {
            hits += std::any_of(found.begin(), found.end(), [&](const Tap& f) { return f.k == t.k && f.l == t.l; });
        }
        all_found += hits == 4;
        clean_runs += found.size() == 4;
    }
    CHECK(all_found == 100);
    CHECK(clean_runs >= 95);
}

TEST_CASE("form_image only warns about the waveform norm") {
    std::vector<std::string> seen;
    auto saved = warning_handler();
    warning_handler() = [&](std::string_view m) { seen.emplace_back(m); };
    const auto x = Waveform::from_pulsone(kSmall, 0, 0, std::nullopt, "p");
    const auto env = ScatteringEnvironment::make(kSmall, {{1, 1, 3.0}});
    (void)form_image(apply_channel(env, x.samples), x);
    const auto loud = Waveform::plain(2.0 * x.samples, "loud");
    (void)form_image(x.samples, loud);
    warning_handler() = saved;
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].rfind("waveform", 0) == 0);
}
