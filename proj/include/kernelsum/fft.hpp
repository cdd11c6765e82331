#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "errors.hpp"

namespace kernelsum::fft {

struct FftwFree {
    void operator()(std::complex<double>* p) const noexcept { fftw_free(p); }
};

/// SIMD-aligned complex buffer from fftw_malloc.
using Buffer = std::unique_ptr<std::complex<double>[], FftwFree>;

inline Buffer make_buffer(std::size_t n) {
    auto* p = static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * n));
    if (!p) throw std::bad_alloc();
    for (std::size_t i = 0; i < n; ++i) p[i] = 0.0;
    return Buffer(p);
}

enum class Direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

/// In-place complex DFT of length n, y_k = Σ_j x_j e^{∓2πijk/n} (unnormalized).
/// Plans are created once per (n, direction) and kept for the process
/// lifetime; creation is serialized, execution is reentrant.
inline void transform(std::complex<double>* data, std::size_t n, Direction dir) {
    static std::mutex planner_mutex;
    static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(planner_mutex);
        auto key = std::make_pair(n, static_cast<int>(dir));
        auto it = plans.find(key);
        if (it == plans.end()) {
            Buffer scratch = make_buffer(n);
            auto* s = reinterpret_cast<fftw_complex*>(scratch.get());
            plan = fftw_plan_dft_1d(static_cast<int>(n), s, s, static_cast<int>(dir), FFTW_ESTIMATE);
            if (!plan) throw ConfigurationError("fft: FFTW could not create a plan");
            plans.emplace(key, plan);
        } else {
            plan = it->second;
        }
    }
    auto* p = reinterpret_cast<fftw_complex*>(data);
    if (fftw_alignment_of(reinterpret_cast<double*>(p)) != 0)
        throw ContractError("fft: buffer must come from fft::make_buffer");
    fftw_execute_dft(plan, p, p);
}

}  // namespace kernelsum::fft
