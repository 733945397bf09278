#pragma once

// File formats:
//   sequence CSV   n,re,im
//   array CSV      k,l,re,im
//   surface CSV    k,l,re,im,abs
//   heatmap        8-bit binary PGM (P5) of |A|, linear or dB scale
//   scene JSON     {"M":3,"N":5,"taps":[{"k":2,"l":3,"re":1.0,"im":0.0}]}
// Reals are printed with 17 significant digits so parsing reproduces them bit-exactly.

#include "ddradar/radarsim.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddradar::io {

inline std::string format_real(double v) {
    if (v == 0.0) {
        v = 0.0;  // drop the sign of negative zero
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Rounds to the nearest multiple of `step` (no-op for step <= 0).
inline double round_to(double v, double step) {
    if (step <= 0.0) {
        return v;
    }
    const double r = std::round(v / step) * step;
    return r == 0.0 ? 0.0 : r;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

inline double parse_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::Format, "not a number: '" + s + "'");
    }
    if (used != s.size()) {
        throw Error(ErrorCode::Format, "trailing characters in '" + s + "'");
    }
    return v;
}

inline std::int64_t parse_int(const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::Format, "not an integer: '" + s + "'");
    }
    if (used != s.size()) {
        throw Error(ErrorCode::Format, "trailing characters in '" + s + "'");
    }
    return v;
}

/// Reads the header and rows of a CSV with a fixed column list.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw Error(ErrorCode::Format, "expected CSV header '" + header + "'");
    }
    const auto width = split(header, ',').size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != width) {
            throw Error(ErrorCode::Format, "expected " + std::to_string(width) + " fields: '" + line + "'");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace detail

// -- Sequences ----------------------------------------------------------------

inline void write_sequence_csv(std::ostream& out, std::span<const cplx> x, double step = 0.0) {
    out << "n,re,im\n";
    for (std::size_t n = 0; n < x.size(); ++n) {
        out << n << ',' << format_real(round_to(x[n].real(), step)) << ','
            << format_real(round_to(x[n].imag(), step)) << '\n';
    }
}

inline std::vector<cplx> read_sequence_csv(std::istream& in) {
    const auto rows = detail::read_csv(in, "n,re,im");
    std::vector<cplx> x(rows.size());
    std::vector<bool> filled(rows.size(), false);
    for (const auto& r : rows) {
        const auto n = detail::parse_int(r[0]);
        if (n < 0 || n >= static_cast<std::int64_t>(rows.size()) || filled[static_cast<std::size_t>(n)]) {
            throw Error(ErrorCode::Format, "bad or repeated sample index " + r[0]);
        }
        x[static_cast<std::size_t>(n)] = {detail::parse_real(r[1]), detail::parse_real(r[2])};
        filled[static_cast<std::size_t>(n)] = true;
    }
    return x;
}

// -- Quasi-periodic arrays -------------------------------------------------------

inline void write_array_csv(std::ostream& out, const QuasiPeriodicArray& X) {
    out << "k,l,re,im\n";
    for (std::int64_t k = 0; k < X.rows(); ++k) {
        for (std::int64_t l = 0; l < X.cols(); ++l) {
            out << k << ',' << l << ',' << format_real(X(k, l).real()) << ',' << format_real(X(k, l).imag())
                << '\n';
        }
    }
}

inline QuasiPeriodicArray read_array_csv(std::istream& in, const Modulus& mod) {
    const auto rows = detail::read_csv(in, "k,l,re,im");
    if (static_cast<std::int64_t>(rows.size()) != mod.MN()) {
        throw Error(ErrorCode::Format, "expected M*N rows");
    }
    QuasiPeriodicArray X(mod);
    for (const auto& r : rows) {
        X(detail::parse_int(r[0]), detail::parse_int(r[1])) = {detail::parse_real(r[2]),
                                                                detail::parse_real(r[3])};
    }
    return X;
}

// -- Surfaces ------------------------------------------------------------------

inline void write_surface_csv(std::ostream& out, const AmbiguitySurface& s, double step = 0.0) {
    out << "k,l,re,im,abs\n";
    for (std::int64_t k = 0; k < s.rows(); ++k) {
        for (std::int64_t l = 0; l < s.cols(); ++l) {
            const cplx v = s(k, l);
            const double re = round_to(v.real(), step);
            const double im = round_to(v.imag(), step);
            out << k << ',' << l << ',' << format_real(re) << ',' << format_real(im) << ','
                << format_real(round_to(std::abs(v), step)) << '\n';
        }
    }
}

/// Reads a surface written by write_surface_csv; shape comes from the largest indices.
inline AmbiguitySurface read_surface_csv(std::istream& in, std::int64_t period, Grid grid) {
    const auto rows = detail::read_csv(in, "k,l,re,im,abs");
    std::int64_t nk = 0, nl = 0;
    for (const auto& r : rows) {
        nk = std::max(nk, detail::parse_int(r[0]) + 1);
        nl = std::max(nl, detail::parse_int(r[1]) + 1);
    }
    if (nk * nl != static_cast<std::int64_t>(rows.size())) {
        throw Error(ErrorCode::Format, "surface CSV is not a full rectangle");
    }
    AmbiguitySurface s(period, nk, nl, grid);
    for (const auto& r : rows) {
        s(detail::parse_int(r[0]), detail::parse_int(r[1])) = {detail::parse_real(r[2]), detail::parse_real(r[3])};
    }
    return s;
}

// -- PGM ------------------------------------------------------------------------

enum class Scale { Linear, Db };

/// Gray levels of |A| relative to the peak, one row per delay.
inline std::vector<std::uint8_t> heatmap_levels(const AmbiguitySurface& s, Scale scale, double floor_db = -120.0) {
    double peak = 0.0;
    for (const auto& v : s.values()) {
        peak = std::max(peak, std::abs(v));
    }
    std::vector<std::uint8_t> px(s.values().size(), 0);
    if (peak == 0.0) {
        return px;
    }
    for (std::size_t i = 0; i < px.size(); ++i) {
        const double rel = std::abs(s.values()[i]) / peak;
        double t = rel;
        if (scale == Scale::Db) {
            const double db = rel > 0.0 ? 20.0 * std::log10(rel) : floor_db;
            t = (std::max(db, floor_db) - floor_db) / -floor_db;
        }
        px[i] = static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
    return px;
}

inline void write_pgm(std::ostream& out, const AmbiguitySurface& s, Scale scale, double floor_db = -120.0) {
    if (!(floor_db < 0.0)) {
        throw Error(ErrorCode::Config, "dB floor must be negative");
    }
    const auto px = heatmap_levels(s, scale, floor_db);
    out << "P5\n" << s.cols() << ' ' << s.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

struct Pgm {
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::vector<std::uint8_t> pixels;
};

inline Pgm read_pgm(std::istream& in) {
    std::string magic;
    Pgm img;
    int maxval = 0;
    in >> magic >> img.width >> img.height >> maxval;
    if (!in || magic != "P5" || maxval != 255 || img.width <= 0 || img.height <= 0) {
        throw Error(ErrorCode::Format, "not an 8-bit binary PGM");
    }
    in.get();  // single whitespace before the raster
    img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw Error(ErrorCode::Format, "truncated PGM raster");
    }
    return img;
}

// -- JSON ------------------------------------------------------------------------

inline nlohmann::json taps_to_json(const std::vector<Tap>& taps) {
    auto arr = nlohmann::json::array();
    for (const auto& t : taps) {
        arr.push_back({{"k", t.k}, {"l", t.l}, {"re", t.h.real()}, {"im", t.h.imag()}});
    }
    return arr;
}

inline std::vector<Tap> taps_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) {
        throw Error(ErrorCode::Format, "taps must be a JSON array");
    }
    std::vector<Tap> taps;
    for (const auto& t : arr) {
        try {
            taps.push_back({t.at("k").get<std::int64_t>(), t.at("l").get<std::int64_t>(),
                            {t.at("re").get<double>(), t.value("im", 0.0)}});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Format, std::string("bad tap entry: ") + e.what());
        }
    }
    return taps;
}

/// Parses a scene. The modulus is validated like any other (M, N) input.
inline ScatteringEnvironment parse_scene(const std::string& text, bool allow_composite = false) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Format, std::string("scene is not valid JSON: ") + e.what());
    }
    if (!j.contains("M") || !j.contains("N")) {
        throw Error(ErrorCode::Format, "scene needs integer fields M and N");
    }
    const auto mod = Modulus::make(j["M"].get<std::int64_t>(), j["N"].get<std::int64_t>(), allow_composite);
    return ScatteringEnvironment::make(mod, taps_from_json(j.value("taps", nlohmann::json::array())));
}

inline std::string scene_to_json(const ScatteringEnvironment& env) {
    nlohmann::json j;
    j["M"] = env.modulus().M();
    j["N"] = env.modulus().N();
    j["taps"] = taps_to_json(env.taps());
    return j.dump(2) + "\n";
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Config, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ddradar::io
