#pragma once

// Thin FFTW wrapper. Plans are created once per (length, direction) and cached;
// planning is serialized, execution uses the thread-safe new-array interface.

#include "ddradar/modmath.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace ddradar::fft {

enum class Direction { Forward, Backward };

namespace detail {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, Direction dir) {
        std::lock_guard lock(mutex_);
        const auto key = std::pair{n, dir};
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        // Planning needs scratch arrays; FFTW_UNALIGNED allows executing on any buffer.
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized DFT: out[m] = sum_n in[n] * exp(-+ j*2*pi*m*n/L).
/// `in` and `out` must not alias.
inline void transform(std::span<const cplx> in, std::span<cplx> out, Direction dir) {
    const std::size_t n = in.size();
    if (n == 0) {
        return;
    }
    fftw_plan plan = detail::PlanCache::instance().get(n, dir);
    // fftw_execute_dft never writes to its input for out-of-place plans.
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

inline std::vector<cplx> forward(std::span<const cplx> in) {
    std::vector<cplx> out(in.size());
    transform(in, out, Direction::Forward);
    return out;
}

inline std::vector<cplx> backward(std::span<const cplx> in) {
    std::vector<cplx> out(in.size());
    transform(in, out, Direction::Backward);
    return out;
}

}  // namespace ddradar::fft
