#include "kdiff/fft.hpp"

#include <cassert>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace kdiff {
namespace {

struct PlanPair {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit PlanPair(std::size_t n) {
        buf = fftw_alloc_complex(n);
        const int ni = static_cast<int>(n);
        fwd = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    PlanPair(const PlanPair&) = delete;
    ~PlanPair() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

std::mutex g_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
             bool forward) {
    assert(in.size() == out.size());
    const std::size_t n = in.size();
    std::lock_guard<std::mutex> lock(g_mutex);
    auto it = plan_cache().find(n);
    if (it == plan_cache().end())
        it = plan_cache().try_emplace(n, n).first;
    PlanPair& pp = it->second;
    auto* buf = reinterpret_cast<std::complex<double>*>(pp.buf);
    for (std::size_t i = 0; i < n; ++i) buf[i] = in[i];
    fftw_execute(forward ? pp.fwd : pp.bwd);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i];
}

} // namespace

void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    execute(in, out, true);
}

void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    execute(in, out, false);
}

} // namespace kdiff
