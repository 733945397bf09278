#pragma once

// ddradar command line. All outputs land in --out DIR under fixed names:
//   waveform    waveform.csv, waveform_ambiguity.pgm (--pgm)
//   ambiguity   ambiguity.csv, ambiguity.pgm
//   simulate    image.csv, image.pgm, targets.json
//   bench       bench.csv
//
// Waveform spec strings (used by --x, --y, --waveform):
//   pulsone:k0,l0 | chirp:alpha[,beta] | zc:root[,chip] | eigen:c,d[,index]
//   random:seed | csv:path
// optionally followed by transforms applied left to right: @sl2:a,b,c,d  @lfm:A

#include "ddradar/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>

namespace ddradar::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kPrecondition = 3, kNumeric = 4 };

/// A parsed waveform: raw samples plus whatever structure is known about them.
struct Signal {
    std::vector<cplx> samples;
    std::optional<Waveform> waveform;       ///< set when the period is MN
    std::optional<LineSubgroup> line;       ///< line whose eigenvector this is, if any
    std::optional<CodedRidge> ridge;        ///< chip-oversampled ZC only
    std::int64_t oversample = 1;
    std::string label;
};

namespace detail {

inline std::vector<std::int64_t> parse_ints(const std::string& text, std::size_t min_count, std::size_t max_count,
                                            const std::string& what) {
    std::vector<std::int64_t> out;
    for (const auto& f : io::detail::split(text, ',')) {
        out.push_back(io::detail::parse_int(f));
    }
    if (out.size() < min_count || out.size() > max_count) {
        throw Error(ErrorCode::Config, what + " expects " + std::to_string(min_count) +
                                           (max_count != min_count ? "-" + std::to_string(max_count) : "") +
                                           " comma-separated integers, got '" + text + "'");
    }
    return out;
}

inline std::vector<cplx> random_unit(std::int64_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> x(static_cast<std::size_t>(length));
    double e = 0.0;
    for (auto& z : x) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z = {re, im};
        e += std::norm(z);
    }
    for (auto& z : x) {
        z /= std::sqrt(e);
    }
    return x;
}

inline LineSubgroup map_line(const LineSubgroup& T, const SL2Element& g) {
    const auto [c, d] = g.apply(T.c(), T.d());
    return LineSubgroup::make(T.modulus(), c, d);
}

}  // namespace detail

inline Signal parse_signal(const std::string& spec, const Modulus& mod) {
    const auto parts = io::detail::split(spec, '@');
    if (parts.empty() || parts[0].empty()) {
        throw Error(ErrorCode::Config, "empty waveform spec");
    }
    const auto colon = parts[0].find(':');
    const std::string kind = parts[0].substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : parts[0].substr(colon + 1);
    const std::int64_t L = mod.MN();

    Signal sig;
    sig.label = spec;
    if (kind == "pulsone") {
        const auto v = detail::parse_ints(args, 2, 2, "pulsone");
        sig.waveform = Waveform::from_pulsone(mod, v[0], v[1], std::nullopt, spec);
        sig.line = LineSubgroup::rectangular(mod);
    } else if (kind == "chirp") {
        const auto v = detail::parse_ints(args, 1, 2, "chirp");
        const std::int64_t beta = v.size() > 1 ? v[1] : 0;
        sig.waveform = Waveform::plain(chirp(mod, v[0], beta), spec);
        sig.line = LineSubgroup::from_slope(mod, 2 * v[0]);
    } else if (kind == "zc") {
        const auto v = detail::parse_ints(args, 1, 2, "zc");
        const std::int64_t s = v.size() > 1 ? v[1] : 1;
        if (s < 1) {
            throw Error(ErrorCode::EmptyChip, "chip oversampling must be at least 1");
        }
        const auto z = zc_sequence(v[0], L);
        if (s == 1) {
            sig.waveform = Waveform::plain(PeriodicSequence(mod, z), spec);
            sig.line = LineSubgroup::from_slope(mod, -v[0]);
        } else {
            const std::vector<double> chip(static_cast<std::size_t>(s), 1.0);
            sig.samples = coded_waveform(z, chip);
            sig.oversample = s;
            sig.ridge = CodedRidge{v[0], L, s};
        }
    } else if (kind == "eigen") {
        const auto v = detail::parse_ints(args, 2, 3, "eigen");
        const auto T = LineSubgroup::make(mod, v[0], v[1]);
        const auto basis = eigenbasis_for_line(T);
        sig.waveform = Waveform::from_eigenbasis(basis, v.size() > 2 ? v[2] : 0, spec);
        sig.line = T;
    } else if (kind == "random") {
        const auto v = detail::parse_ints(args, 1, 1, "random");
        sig.waveform = Waveform::plain(PeriodicSequence(mod, detail::random_unit(L, static_cast<std::uint64_t>(v[0]))), spec);
    } else if (kind == "csv") {
        std::istringstream in(io::read_file(args));
        auto x = io::read_sequence_csv(in);
        if (static_cast<std::int64_t>(x.size()) == L) {
            sig.waveform = Waveform::plain(PeriodicSequence(mod, std::move(x)), spec);
        } else {
            sig.samples = std::move(x);
        }
    } else {
        throw Error(ErrorCode::Config, "unknown waveform kind '" + kind + "'");
    }

    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (!sig.waveform) {
            throw Error(ErrorCode::Config, "transforms need a waveform of period MN");
        }
        const auto c = parts[i].find(':');
        const std::string tk = parts[i].substr(0, c);
        const std::string targs = c == std::string::npos ? "" : parts[i].substr(c + 1);
        std::optional<SymplecticOperator> op;
        if (tk == "sl2") {
            const auto v = detail::parse_ints(targs, 4, 4, "sl2");
            op = SymplecticOperator::for_element(SL2Element::make(mod, v[0], v[1], v[2], v[3]));
        } else if (tk == "lfm") {
            op = SymplecticOperator::lfm(mod, detail::parse_ints(targs, 1, 1, "lfm")[0]);
        } else {
            throw Error(ErrorCode::Config, "unknown transform '" + tk + "'");
        }
        Waveform& w = *sig.waveform;
        w.samples = op->apply(w.samples);
        if (w.origin) {
            w.origin->op = w.origin->op ? op->after(*w.origin->op) : *op;
        }
        if (sig.line) {
            sig.line = detail::map_line(*sig.line, op->element());
        }
        w.label = spec;
    }
    if (sig.waveform) {
        const auto s = sig.waveform->samples.samples();
        sig.samples.assign(s.begin(), s.end());
    }
    return sig;
}

inline DDRegion parse_region(const std::string& text, const Modulus& mod) {
    // kmin:kmax,lmin:lmax
    const auto axes = io::detail::split(text, ',');
    if (axes.size() != 2) {
        throw Error(ErrorCode::Config, "region must look like kmin:kmax,lmin:lmax");
    }
    std::array<std::int64_t, 4> v{};
    for (std::size_t a = 0; a < 2; ++a) {
        const auto ends = io::detail::split(axes[a], ':');
        if (ends.size() != 2) {
            throw Error(ErrorCode::Config, "region must look like kmin:kmax,lmin:lmax");
        }
        v[2 * a] = io::detail::parse_int(ends[0]);
        v[2 * a + 1] = io::detail::parse_int(ends[1]);
    }
    return DDRegion::make(mod, v[0], v[1], v[2], v[3]);
}

inline Execution execution_from_env() {
    Execution exec;
    if (const char* t = std::getenv("DDRADAR_THREADS")) {
        const long n = std::strtol(t, nullptr, 10);
        if (n > 0) {
            exec.threads = static_cast<unsigned>(n);
        }
    }
    return exec;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::Config, "cannot write " + (dir / name).string());
    }
    return f;
}

struct Common {
    std::int64_t M = 3;
    std::int64_t N = 5;
    bool allow_composite = false;
    std::string out = ".";

    void add_to(CLI::App* app) {
        app->add_option("--M", M, "delay bins (odd prime)");
        app->add_option("--N", N, "Doppler bins (odd prime)");
        app->add_flag("--allow-composite", allow_composite,
                      "accept odd coprime non-prime M, N (no maximality guarantees)");
        app->add_option("--out", out, "output directory");
    }

    Modulus modulus() const { return Modulus::make(M, N, allow_composite); }
};

struct Plot {
    std::string scale = "db";
    double floor_db = -120.0;

    void add_to(CLI::App* app) {
        app->add_option("--scale", scale, "PGM scaling")->check(CLI::IsMember({"linear", "db"}));
        app->add_option("--floor", floor_db, "dB floor of the PGM scale");
    }

    io::Scale kind() const { return scale == "db" ? io::Scale::Db : io::Scale::Linear; }
};

inline AmbiguitySurface self_surface(const Signal& s, const Execution& exec) {
    if (s.waveform && s.waveform->fast_capable()) {
        return cross_ambiguity(s.waveform->samples, *s.waveform, Grid::Full, exec);
    }
    return cross_ambiguity_dense(s.samples, s.samples, exec);
}

}  // namespace detail

/// Runs the CLI; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Discrete delay-Doppler radar toolkit"};
    app.require_subcommand(1);
    const Execution exec = execution_from_env();

    // waveform
    auto* wf = app.add_subcommand("waveform", "generate a waveform");
    detail::Common wf_common;
    detail::Plot wf_plot;
    std::string wf_kind, wf_base = "pulsone", wf_sl2, wf_line = "";
    std::int64_t k0 = 0, l0 = 0, alpha = 1, beta = 0, root = 1, chip = 1, lfm_rate = 1, eigen_index = 0;
    std::uint64_t wf_seed = 0;
    bool wf_pgm = false;
    wf_common.add_to(wf);
    wf_plot.add_to(wf);
    wf->add_option("kind", wf_kind, "pulsone|chirp|zc|eigen|random|gdaft-of|lfm-of")
        ->required()
        ->check(CLI::IsMember({"pulsone", "chirp", "zc", "eigen", "random", "gdaft-of", "lfm-of"}));
    wf->add_option("base", wf_base, "base kind for gdaft-of / lfm-of")
        ->check(CLI::IsMember({"pulsone", "chirp", "zc", "eigen", "random"}));
    wf->add_option("--k0", k0);
    wf->add_option("--l0", l0);
    wf->add_option("--alpha", alpha);
    wf->add_option("--beta", beta);
    wf->add_option("--root", root);
    wf->add_option("--chip", chip, "ZC chip oversampling (rectangular chip)");
    wf->add_option("--line", wf_line, "line c,d for eigen");
    wf->add_option("--eigen-index", eigen_index);
    wf->add_option("--sl2", wf_sl2, "a,b,c,d for gdaft-of");
    wf->add_option("--lfm", lfm_rate, "rate A for lfm-of");
    wf->add_option("--seed", wf_seed);
    wf->add_flag("--pgm", wf_pgm, "also write the self-ambiguity heatmap");

    // ambiguity
    auto* amb = app.add_subcommand("ambiguity", "cross-ambiguity surface");
    detail::Common amb_common;
    detail::Plot amb_plot;
    std::string x_spec, y_spec, engine = "naive", grid_name = "full";
    double round_step = 0.0;
    amb_common.add_to(amb);
    amb_plot.add_to(amb);
    amb->add_option("--x", x_spec, "waveform spec of x")->required();
    amb->add_option("--y", y_spec, "waveform spec of y (default: x)");
    amb->add_option("--engine", engine)->check(CLI::IsMember({"naive", "fast"}));
    amb->add_option("--grid", grid_name)->check(CLI::IsMember({"full", "fundamental"}));
    amb->add_option("--round", round_step, "round CSV values to this step");

    // simulate
    auto* sim = app.add_subcommand("simulate", "radar scene simulation and readout");
    detail::Plot sim_plot;
    std::string scene_path, sim_spec, region_text, sim_line, sim_out = ".";
    std::optional<double> snr_db, threshold;
    std::uint64_t sim_seed = 0;
    bool sim_composite = false;
    sim_plot.add_to(sim);
    sim->add_option("--scene", scene_path, "scene JSON")->required();
    sim->add_option("--waveform", sim_spec, "waveform spec")->required();
    sim->add_option("--snr", snr_db, "SNR in dB (default: noiseless)");
    sim->add_option("--seed", sim_seed);
    sim->add_option("--region", region_text, "kmin:kmax,lmin:lmax")->required();
    sim->add_option("--line", sim_line, "ambiguity support line c,d (default: the waveform's)");
    sim->add_option("--threshold", threshold, "absolute readout threshold (default: half the peak in the region)");
    sim->add_option("--out", sim_out);
    sim->add_flag("--allow-composite", sim_composite);

    // crystallize
    auto* cry = app.add_subcommand("crystallize", "check the crystallization condition");
    detail::Common cry_common;
    std::string cry_line, cry_region;
    cry_common.add_to(cry);
    cry->add_option("--line", cry_line)->required();
    cry->add_option("--region", cry_region)->required();

    // bench
    auto* bench = app.add_subcommand("bench", "fast vs naive fundamental-grid ambiguity");
    std::vector<std::string> sizes{"3x5", "11x13", "31x37"};
    std::string bench_out = ".";
    std::uint64_t bench_seed = 1;
    int repeats = 3;
    bench->add_option("--sizes", sizes, "list of MxN");
    bench->add_option("--seed", bench_seed);
    bench->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*wf) {
            const Modulus mod = wf_common.modulus();
            auto base_spec = [&](const std::string& kind) -> std::string {
                if (kind == "pulsone") return "pulsone:" + std::to_string(k0) + "," + std::to_string(l0);
                if (kind == "chirp") return "chirp:" + std::to_string(alpha) + "," + std::to_string(beta);
                if (kind == "zc") return "zc:" + std::to_string(root) + "," + std::to_string(chip);
                if (kind == "random") return "random:" + std::to_string(wf_seed);
                if (wf_line.empty()) {
                    throw Error(ErrorCode::Config, "eigen needs --line c,d");
                }
                return "eigen:" + wf_line + "," + std::to_string(eigen_index);
            };
            std::string spec;
            if (wf_kind == "gdaft-of") {
                if (wf_sl2.empty()) {
                    throw Error(ErrorCode::Config, "gdaft-of needs --sl2 a,b,c,d");
                }
                spec = base_spec(wf_base) + "@sl2:" + wf_sl2;
            } else if (wf_kind == "lfm-of") {
                spec = base_spec(wf_base) + "@lfm:" + std::to_string(lfm_rate);
            } else {
                spec = base_spec(wf_kind);
            }
            const Signal sig = parse_signal(spec, mod);
            auto f = detail::open_out(wf_common.out, "waveform.csv");
            io::write_sequence_csv(f, sig.samples);
            out << "spec=" << spec << " length=" << sig.samples.size()
                << " papr_db=" << io::format_real(io::round_to(papr_db(sig.samples), 1e-12)) << '\n';
            if (wf_pgm) {
                auto p = detail::open_out(wf_common.out, "waveform_ambiguity.pgm");
                io::write_pgm(p, detail::self_surface(sig, exec), wf_plot.kind(), wf_plot.floor_db);
            }
            return kOk;
        }

        if (*amb) {
            const Modulus mod = amb_common.modulus();
            const Signal x = parse_signal(x_spec, mod);
            const Signal y = y_spec.empty() ? x : parse_signal(y_spec, mod);
            const Grid grid = grid_name == "full" ? Grid::Full : Grid::Fundamental;
            std::optional<AmbiguitySurface> surf;
            if (engine == "fast") {
                if (!y.waveform || !y.waveform->fast_capable() || !x.waveform) {
                    throw Error(ErrorCode::EngineUnsupported,
                                "the fast engine needs y to be a pulsone or a symplectic image of one "
                                "(pulsone:..., eigen:... or @sl2/@lfm of those)");
                }
                surf = cross_ambiguity(x.waveform->samples, *y.waveform, grid, exec);
            } else if (x.waveform && y.waveform) {
                surf = cross_ambiguity_naive(x.waveform->samples, y.waveform->samples, grid, exec);
            } else {
                if (grid != Grid::Full) {
                    throw Error(ErrorCode::Config, "the fundamental grid needs waveforms of period MN");
                }
                surf = cross_ambiguity_naive(x.samples, y.samples, exec);
            }
            auto c = detail::open_out(amb_common.out, "ambiguity.csv");
            io::write_surface_csv(c, *surf, round_step);
            auto p = detail::open_out(amb_common.out, "ambiguity.pgm");
            io::write_pgm(p, *surf, amb_plot.kind(), amb_plot.floor_db);
            out << "engine=" << engine << " rows=" << surf->rows() << " cols=" << surf->cols()
                << " unimodular=" << unimodular_count(*surf) << '\n';
            return kOk;
        }

        if (*sim) {
            const auto env = io::parse_scene(io::read_file(scene_path), sim_composite);
            const Modulus& mod = env.modulus();
            const Signal sig = parse_signal(sim_spec, mod);
            if (!sig.waveform) {
                throw Error(ErrorCode::Config, "simulate needs a waveform of period MN");
            }
            const DDRegion C = parse_region(region_text, mod);
            std::optional<LineSubgroup> line = sig.line;
            if (!sim_line.empty()) {
                const auto v = detail::parse_ints(sim_line, 2, 2, "line");
                line = LineSubgroup::make(mod, v[0], v[1]);
            }
            if (!line) {
                throw Error(ErrorCode::Config, "waveform has no known ambiguity line; pass --line c,d");
            }
            if (!crystallization_check(*line, C)) {
                throw Error(ErrorCode::NotCrystallized,
                            "region " + region_text + " is not crystallized by line (" + std::to_string(line->c()) +
                                "," + std::to_string(line->d()) + "); readout would alias");
            }
            PeriodicSequence y = apply_channel(env, sig.waveform->samples);
            if (snr_db) {
                y = add_noise(y, *snr_db, sim_seed);
            }
            RadarImage img = form_image(y, *sig.waveform, Grid::Full, exec);
            img.snr_db = snr_db;
            img.seed = sim_seed;
            const double thr = threshold ? *threshold : default_threshold(img, mod, C);
            const auto targets = readout_targets(img, *line, C, thr);

            auto c = detail::open_out(sim_out, "image.csv");
            io::write_surface_csv(c, img.surface);
            auto p = detail::open_out(sim_out, "image.pgm");
            io::write_pgm(p, img.surface, sim_plot.kind(), sim_plot.floor_db);
            nlohmann::json j;
            j["M"] = mod.M();
            j["N"] = mod.N();
            j["waveform"] = sig.label;
            j["line"] = {line->c(), line->d()};
            j["region"] = {C.k_min, C.k_max, C.l_min, C.l_max};
            j["snr_db"] = snr_db ? nlohmann::json(*snr_db) : nlohmann::json(nullptr);
            j["seed"] = sim_seed;
            j["threshold"] = thr;
            j["targets"] = io::taps_to_json(targets);
            auto t = detail::open_out(sim_out, "targets.json");
            t << j.dump(2) << '\n';
            out << "targets=" << targets.size() << '\n';
            return kOk;
        }

        if (*cry) {
            const Modulus mod = cry_common.modulus();
            const auto v = detail::parse_ints(cry_line, 2, 2, "line");
            const bool ok = crystallization_check(LineSubgroup::make(mod, v[0], v[1]), parse_region(cry_region, mod));
            out << "crystallized=" << (ok ? "true" : "false") << '\n';
            return kOk;
        }

        if (*bench) {
            auto f = detail::open_out(bench_out, "bench.csv");
            f << "M,N,naive_ms,fast_ms,ratio,max_abs_diff\n";
            for (const auto& size : sizes) {
                const auto mn = io::detail::split(size, 'x');
                if (mn.size() != 2) {
                    throw Error(ErrorCode::Config, "size must look like MxN, got '" + size + "'");
                }
                const Modulus mod = Modulus::make(io::detail::parse_int(mn[0]), io::detail::parse_int(mn[1]));
                const PeriodicSequence x(mod, detail::random_unit(mod.MN(), bench_seed));
                const Waveform y = Waveform::from_pulsone(mod, 0, 0, std::nullopt, "pulsone:0,0");
                using clock = std::chrono::steady_clock;
                double naive_ms = 1e300, fast_ms = 1e300, diff = 0.0;
                for (int r = 0; r < repeats; ++r) {
                    auto t0 = clock::now();
                    const auto a = cross_ambiguity_naive(x, y.samples, Grid::Fundamental);
                    auto t1 = clock::now();
                    const auto b = FastAmbiguityEngine(x, 0, 0).materialize(Grid::Fundamental);
                    auto t2 = clock::now();
                    naive_ms = std::min(naive_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
                    fast_ms = std::min(fast_ms, std::chrono::duration<double, std::milli>(t2 - t1).count());
                    for (std::size_t i = 0; i < a.values().size(); ++i) {
                        diff = std::max(diff, std::abs(a.values()[i] - b.values()[i]));
                    }
                }
                if (diff > 1e-10) {
                    err << "fast and naive surfaces disagree at " << size << " (max diff " << diff << ")\n";
                    return kNumeric;
                }
                const double ratio = naive_ms / std::max(fast_ms, 1e-9);
                f << mod.M() << ',' << mod.N() << ',' << io::format_real(naive_ms) << ','
                  << io::format_real(fast_ms) << ',' << io::format_real(ratio) << ',' << io::format_real(diff)
                  << '\n';
                out << size << ": naive " << naive_ms << " ms, fast " << fast_ms << " ms, ratio " << ratio << '\n';
            }
            return kOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::NotCrystallized ? kPrecondition : kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace ddradar::cli
